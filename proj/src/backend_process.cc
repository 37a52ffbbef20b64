// Copyright (c) 2026 ovlinf project authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstring>
#include <string>

#include "ovlinf/decoder.h"

namespace ovlinf {

namespace {

void set_nonblocking(int fd) {
  const int flags = fcntl(fd, F_GETFL, 0);
  fcntl(fd, F_SETFL, flags | O_NONBLOCK);
}

[[noreturn]] void kill_and_throw(pid_t pid, const std::string& what) {
  kill(pid, SIGKILL);
  int status = 0;
  waitpid(pid, &status, 0);
  throw DecodeError(what);
}

}  // namespace

std::string run_process_io(const std::string& command, const std::string& input,
                           double timeout_s) {
  // A backend that never reads stdin would otherwise kill us mid-write.
  static const bool sigpipe_ignored = [] {
    std::signal(SIGPIPE, SIG_IGN);
    return true;
  }();
  (void)sigpipe_ignored;

  int to_child[2];
  int from_child[2];
  if (pipe(to_child) != 0) {
    throw DecodeError(std::string("pipe failed: ") + std::strerror(errno));
  }
  if (pipe(from_child) != 0) {
    close(to_child[0]);
    close(to_child[1]);
    throw DecodeError(std::string("pipe failed: ") + std::strerror(errno));
  }

  const pid_t pid = fork();
  if (pid < 0) {
    close(to_child[0]);
    close(to_child[1]);
    close(from_child[0]);
    close(from_child[1]);
    throw DecodeError(std::string("fork failed: ") + std::strerror(errno));
  }
  if (pid == 0) {
    dup2(to_child[0], STDIN_FILENO);
    dup2(from_child[1], STDOUT_FILENO);
    close(to_child[0]);
    close(to_child[1]);
    close(from_child[0]);
    close(from_child[1]);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }

  close(to_child[0]);
  close(from_child[1]);
  int in_fd = to_child[1];
  const int out_fd = from_child[0];
  set_nonblocking(in_fd);
  set_nonblocking(out_fd);

  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::duration<double>(timeout_s);
  const std::string timeout_msg =
      "backend timed out after " + std::to_string(timeout_s) + " s";

  std::string output;
  std::size_t written = 0;
  bool out_open = true;
  char buf[65536];

  while (out_open || in_fd >= 0) {
    const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (remaining.count() <= 0) {
      if (in_fd >= 0) close(in_fd);
      close(out_fd);
      kill_and_throw(pid, timeout_msg);
    }

    pollfd fds[2];
    nfds_t nfds = 0;
    int out_slot = -1;
    int in_slot = -1;
    if (out_open) {
      out_slot = static_cast<int>(nfds);
      fds[nfds++] = {out_fd, POLLIN, 0};
    }
    if (in_fd >= 0) {
      in_slot = static_cast<int>(nfds);
      fds[nfds++] = {in_fd, POLLOUT, 0};
    }

    const int rc = poll(fds, nfds, static_cast<int>(remaining.count()));
    if (rc < 0) {
      if (errno == EINTR) continue;
      if (in_fd >= 0) close(in_fd);
      close(out_fd);
      kill_and_throw(pid, std::string("poll failed: ") + std::strerror(errno));
    }

    if (in_slot >= 0 && (fds[in_slot].revents & (POLLOUT | POLLERR | POLLHUP))) {
      if (fds[in_slot].revents & (POLLERR | POLLHUP)) {
        close(in_fd);
        in_fd = -1;
      } else {
        const ssize_t n =
            write(in_fd, input.data() + written, input.size() - written);
        if (n > 0) {
          written += static_cast<std::size_t>(n);
        } else if (n < 0 && errno != EAGAIN && errno != EINTR) {
          close(in_fd);
          in_fd = -1;
        }
        if (in_fd >= 0 && written == input.size()) {
          close(in_fd);
          in_fd = -1;
        }
      }
    }

    if (out_slot >= 0 && (fds[out_slot].revents & (POLLIN | POLLHUP))) {
      const ssize_t n = read(out_fd, buf, sizeof(buf));
      if (n > 0) {
        output.append(buf, static_cast<std::size_t>(n));
      } else if (n == 0) {
        out_open = false;
      } else if (errno != EAGAIN && errno != EINTR) {
        out_open = false;
      }
    }
  }
  close(out_fd);

  int status = 0;
  for (;;) {
    const pid_t done = waitpid(pid, &status, WNOHANG);
    if (done == pid) break;
    if (done < 0) {
      throw DecodeError(std::string("waitpid failed: ") + std::strerror(errno));
    }
    if (std::chrono::steady_clock::now() >= deadline) {
      kill_and_throw(pid, timeout_msg);
    }
    usleep(2000);
  }

  if (WIFSIGNALED(status)) {
    throw DecodeError("backend killed by signal " +
                      std::to_string(WTERMSIG(status)));
  }
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    throw DecodeError("backend exited with code " +
                      std::to_string(WIFEXITED(status) ? WEXITSTATUS(status) : -1));
  }
  return output;
}

}  // namespace ovlinf
