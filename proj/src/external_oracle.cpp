#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdio>
#include <cstring>

#include "northrt/errors.hpp"
#include "northrt/oracle.hpp"

namespace northrt {

std::string format_oracle_request(std::span<const double> x, const PriorityAssignment& p) {
  std::string out;
  char buf[32];
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.12g", x[i]);
    if (i) out += ' ';
    out += buf;
  }
  out += '\n';
  for (std::size_t i = 0; i < p.order().size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(p.order()[i]);
  }
  out += '\n';
  return out;
}

ExternalProcessOracle::ExternalProcessOracle(const std::string& command,
                                             std::chrono::milliseconds timeout)
    : command_(command), timeout_(timeout) {
  int fds[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, fds) != 0) {
    throw OracleError(std::string("socketpair failed: ") + std::strerror(errno));
  }
  const pid_t pid = ::fork();
  if (pid < 0) {
    ::close(fds[0]);
    ::close(fds[1]);
    throw OracleError(std::string("fork failed: ") + std::strerror(errno));
  }
  if (pid == 0) {
    ::dup2(fds[1], STDIN_FILENO);
    ::dup2(fds[1], STDOUT_FILENO);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(fds[1]);
  pid_ = pid;
  fd_ = fds[0];
}

ExternalProcessOracle::~ExternalProcessOracle() { shutdown(); }

void ExternalProcessOracle::shutdown() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
  if (pid_ > 0) {
    ::kill(pid_, SIGTERM);
    int status = 0;
    ::waitpid(pid_, &status, 0);
    pid_ = -1;
  }
}

std::string ExternalProcessOracle::read_line() {
  const auto deadline = std::chrono::steady_clock::now() + timeout_;
  while (true) {
    const auto newline = pending_.find('\n');
    if (newline != std::string::npos) {
      std::string line = pending_.substr(0, newline);
      pending_.erase(0, newline + 1);
      return line;
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) throw OracleError("external oracle timed out");
    pollfd pfd{fd_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, static_cast<int>(left.count()));
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw OracleError(std::string("poll failed: ") + std::strerror(errno));
    }
    if (ready == 0) throw OracleError("external oracle timed out");
    char buf[256];
    const ssize_t got = ::recv(fd_, buf, sizeof(buf), 0);
    if (got < 0) {
      if (errno == EINTR) continue;
      throw OracleError(std::string("read failed: ") + std::strerror(errno));
    }
    if (got == 0) throw OracleError("external oracle exited");
    pending_.append(buf, static_cast<std::size_t>(got));
  }
}

bool ExternalProcessOracle::query(std::span<const double> x, const PriorityAssignment& p) {
  if (broken_) throw OracleError("external oracle unusable after an earlier failure");
  try {
    const std::string request = format_oracle_request(x, p);
    std::size_t sent = 0;
    while (sent < request.size()) {
      const ssize_t n = ::send(fd_, request.data() + sent, request.size() - sent, MSG_NOSIGNAL);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw OracleError("external oracle exited");
      }
      sent += static_cast<std::size_t>(n);
    }
    std::string reply = read_line();
    while (!reply.empty() && (reply.back() == '\r' || reply.back() == ' ')) reply.pop_back();
    if (reply == "0") return true;
    if (reply == "1") return false;
    throw OracleError("malformed external oracle reply: '" + reply + "'");
  } catch (const OracleError&) {
    broken_ = true;
    shutdown();
    throw;
  }
}

std::unique_ptr<SchedulabilityOracle> spawn_external_oracle(const std::string& command,
                                                            std::chrono::milliseconds timeout) {
  return std::make_unique<ExternalProcessOracle>(command, timeout);
}

}  // namespace northrt
