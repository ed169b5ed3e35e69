// Copyright 2026 The commbench Authors
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

#include "subprocess.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <csignal>
#include <cstring>
#include <mutex>
#include <thread>

#include "commbench/error.hpp"

namespace commbench::detail {
namespace {

constexpr std::size_t kStderrTail = 4096;

int ms_until(Clock::time_point deadline) {
  const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
  return static_cast<int>(std::clamp<std::int64_t>(left.count(), 0, 1000));
}

void close_fd(int& fd) {
  if (fd >= 0) ::close(fd);
  fd = -1;
}

void set_nonblocking(int fd) { ::fcntl(fd, F_SETFL, ::fcntl(fd, F_GETFL) | O_NONBLOCK); }

}  // namespace

ChildProcess::ChildProcess(const std::vector<std::string>& argv, std::uint64_t memory_bytes) {
  static std::once_flag ignore_sigpipe;
  std::call_once(ignore_sigpipe, [] { std::signal(SIGPIPE, SIG_IGN); });
  if (argv.empty()) throw Error(ErrorKind::kConfig, "runner launch command is empty");

  std::vector<char*> args;
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);

  int in[2], out[2], err[2];
  if (::pipe2(in, O_CLOEXEC) != 0) throw Error(ErrorKind::kIo, "pipe failed");
  if (::pipe2(out, O_CLOEXEC) != 0) {
    ::close(in[0]);
    ::close(in[1]);
    throw Error(ErrorKind::kIo, "pipe failed");
  }
  if (::pipe2(err, O_CLOEXEC) != 0) {
    for (int fd : {in[0], in[1], out[0], out[1]}) ::close(fd);
    throw Error(ErrorKind::kIo, "pipe failed");
  }

  pid_ = ::fork();
  if (pid_ < 0) {
    for (int fd : {in[0], in[1], out[0], out[1], err[0], err[1]}) ::close(fd);
    throw Error(ErrorKind::kIo, std::string("fork failed: ") + std::strerror(errno));
  }
  if (pid_ == 0) {
    // Only async-signal-safe calls from here on.
    ::setpgid(0, 0);
    ::signal(SIGPIPE, SIG_DFL);
    if (memory_bytes > 0) {
      struct rlimit lim{static_cast<rlim_t>(memory_bytes), static_cast<rlim_t>(memory_bytes)};
      ::setrlimit(RLIMIT_AS, &lim);
    }
    ::dup2(in[0], STDIN_FILENO);
    ::dup2(out[1], STDOUT_FILENO);
    ::dup2(err[1], STDERR_FILENO);
    ::execvp(args[0], args.data());
    ::_exit(127);
  }
  ::setpgid(pid_, pid_);  // also done by the child; whichever runs first wins
  ::close(in[0]);
  ::close(out[1]);
  ::close(err[1]);
  stdin_fd_ = in[1];
  stdout_fd_ = out[0];
  stderr_fd_ = err[0];
  set_nonblocking(stdin_fd_);
  set_nonblocking(stdout_fd_);
  set_nonblocking(stderr_fd_);
}

ChildProcess::~ChildProcess() {
  if (!reaped_ && pid_ > 0) {
    kill_group();
    ::waitpid(pid_, nullptr, 0);
  }
  close_fd(stdin_fd_);
  close_fd(stdout_fd_);
  close_fd(stderr_fd_);
}

void ChildProcess::append_stderr(std::string_view bytes) {
  stderr_tail_.append(bytes);
  if (stderr_tail_.size() > kStderrTail) stderr_tail_.erase(0, stderr_tail_.size() - kStderrTail);
}

void ChildProcess::pump(int timeout_ms, bool want_stdout) {
  pollfd fds[2];
  nfds_t n = 0;
  if (want_stdout && stdout_fd_ >= 0) fds[n++] = {stdout_fd_, POLLIN, 0};
  if (stderr_fd_ >= 0) fds[n++] = {stderr_fd_, POLLIN, 0};
  if (n == 0) {
    std::this_thread::sleep_for(std::chrono::milliseconds(std::min(timeout_ms, 10)));
    return;
  }
  if (::poll(fds, n, timeout_ms) <= 0) return;
  char buf[65536];
  for (nfds_t i = 0; i < n; ++i) {
    if (!(fds[i].revents & (POLLIN | POLLHUP | POLLERR))) continue;
    const ssize_t got = ::read(fds[i].fd, buf, sizeof buf);
    if (got > 0) {
      if (fds[i].fd == stdout_fd_) {
        decoder_.feed({buf, static_cast<std::size_t>(got)});
      } else {
        append_stderr({buf, static_cast<std::size_t>(got)});
      }
    } else if (got == 0 || (errno != EAGAIN && errno != EINTR)) {
      if (fds[i].fd == stdout_fd_) {
        close_fd(stdout_fd_);
      } else {
        close_fd(stderr_fd_);
      }
    }
  }
}

bool ChildProcess::send(std::string_view bytes, Clock::time_point deadline) {
  while (!bytes.empty()) {
    if (stdin_fd_ < 0) return false;
    if (Clock::now() >= deadline) throw DeadlineExceeded{};
    pollfd fd{stdin_fd_, POLLOUT, 0};
    if (::poll(&fd, 1, std::min(ms_until(deadline), 20)) > 0) {
      if (fd.revents & (POLLERR | POLLHUP)) return false;
      const ssize_t put = ::write(stdin_fd_, bytes.data(), bytes.size());
      if (put > 0) {
        bytes.remove_prefix(static_cast<std::size_t>(put));
      } else if (errno == EPIPE) {
        return false;
      }
    }
    // Keep the child's output pipes drained so it cannot block on them.
    pump(0, true);
  }
  return true;
}

std::optional<nlohmann::json> ChildProcess::receive(Clock::time_point deadline) {
  for (;;) {
    if (auto m = decoder_.next()) return m;
    if (stdout_fd_ < 0) {
      if (!decoder_.empty()) throw Error(ErrorKind::kProtocol, "stream ended inside a message");
      return std::nullopt;
    }
    if (Clock::now() >= deadline) throw DeadlineExceeded{};
    pump(ms_until(deadline), true);
  }
}

void ChildProcess::close_stdin() { close_fd(stdin_fd_); }

void ChildProcess::kill_group() {
  if (pid_ > 0 && !reaped_) {
    ::kill(-pid_, SIGKILL);
    status_.killed = true;
  }
}

ExitStatus ChildProcess::wait(Clock::time_point deadline) {
  if (reaped_) return status_;
  int raw = 0;
  for (;;) {
    const pid_t r = ::waitpid(pid_, &raw, WNOHANG);
    if (r == pid_) break;
    if (r < 0 && errno != EINTR) {
      reaped_ = true;
      return status_;
    }
    if (Clock::now() >= deadline) {
      kill_group();
      ::waitpid(pid_, &raw, 0);
      break;
    }
    pump(std::min(ms_until(deadline), 10), true);
  }
  reaped_ = true;
  // Leftover members of the group must not outlive the job.
  ::kill(-pid_, SIGKILL);
  const auto drain_until = Clock::now() + std::chrono::milliseconds(200);
  while (stderr_fd_ >= 0 && Clock::now() < drain_until) pump(10, false);
  if (WIFEXITED(raw)) status_.code = WEXITSTATUS(raw);
  if (WIFSIGNALED(raw)) status_.signal = WTERMSIG(raw);
  return status_;
}

}  // namespace commbench::detail
