#include <signal.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>

#include "gplan/policy.hpp"

namespace gplan {

using nlohmann::json;

namespace {

[[noreturn]] void sys_fail(const std::string& what) {
  throw ScorerError(what + ": " + std::strerror(errno));
}

void write_all(int fd, const char* data, std::size_t n) {
  while (n > 0) {
    ssize_t w = ::write(fd, data, n);
    if (w < 0) {
      if (errno == EINTR) continue;
      sys_fail("scorer write failed");
    }
    data += w;
    n -= static_cast<std::size_t>(w);
  }
}

// Returns false on end of stream before any byte was read.
bool read_exact(int fd, char* data, std::size_t n) {
  std::size_t got = 0;
  while (got < n) {
    ssize_t r = ::read(fd, data + got, n - got);
    if (r < 0) {
      if (errno == EINTR) continue;
      sys_fail("scorer read failed");
    }
    if (r == 0) {
      if (got == 0) return false;
      throw ScorerError("scorer stream ended mid-frame");
    }
    got += static_cast<std::size_t>(r);
  }
  return true;
}

}  // namespace

void write_frame(int fd, const std::string& payload) {
  std::string header = std::to_string(payload.size()) + "\n";
  write_all(fd, header.data(), header.size());
  write_all(fd, payload.data(), payload.size());
  write_all(fd, "\n", 1);
}

std::optional<std::string> read_frame(int fd) {
  std::string header;
  char c;
  for (;;) {
    if (!read_exact(fd, &c, 1)) {
      if (header.empty()) return std::nullopt;
      throw ScorerError("scorer stream ended inside a frame header");
    }
    if (c == '\n') break;
    if (c < '0' || c > '9' || header.size() > 12)
      throw ScorerError("malformed frame header from scorer");
    header.push_back(c);
  }
  if (header.empty()) throw ScorerError("empty frame header from scorer");
  std::string payload(std::stoull(header), '\0');
  if (!payload.empty() && !read_exact(fd, payload.data(), payload.size()))
    throw ScorerError("scorer stream ended mid-frame");
  if (!read_exact(fd, &c, 1) || c != '\n') throw ScorerError("frame not terminated by newline");
  return payload;
}

StreamScorer::StreamScorer(int read_fd, int write_fd, int child_pid)
    : read_fd_(read_fd), write_fd_(write_fd), child_pid_(child_pid) {}

StreamScorer::~StreamScorer() {
  if (write_fd_ >= 0) ::close(write_fd_);
  if (read_fd_ >= 0 && read_fd_ != write_fd_) ::close(read_fd_);
  if (child_pid_ > 0) {
    int status = 0;
    ::waitpid(child_pid_, &status, 0);
  }
}

std::unique_ptr<StreamScorer> StreamScorer::spawn(const std::string& command) {
  int to_child[2], from_child[2];
  if (::pipe(to_child) != 0) sys_fail("pipe");
  if (::pipe(from_child) != 0) {
    ::close(to_child[0]);
    ::close(to_child[1]);
    sys_fail("pipe");
  }
  // A scorer that dies must surface as an error, not kill the executor.
  ::signal(SIGPIPE, SIG_IGN);
  pid_t pid = ::fork();
  if (pid < 0) sys_fail("fork");
  if (pid == 0) {
    ::dup2(to_child[0], STDIN_FILENO);
    ::dup2(from_child[1], STDOUT_FILENO);
    ::close(to_child[0]);
    ::close(to_child[1]);
    ::close(from_child[0]);
    ::close(from_child[1]);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(to_child[0]);
  ::close(from_child[1]);
  return std::make_unique<StreamScorer>(from_child[0], to_child[1], pid);
}

std::unique_ptr<StreamScorer> StreamScorer::connect_unix(const std::string& path) {
  int fd = ::socket(AF_UNIX, SOCK_STREAM, 0);
  if (fd < 0) sys_fail("socket");
  sockaddr_un addr{};
  addr.sun_family = AF_UNIX;
  if (path.size() >= sizeof(addr.sun_path)) {
    ::close(fd);
    throw ScorerError("socket path too long: " + path);
  }
  std::strncpy(addr.sun_path, path.c_str(), sizeof(addr.sun_path) - 1);
  if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    int err = errno;
    ::close(fd);
    errno = err;
    sys_fail("cannot connect to scorer at " + path);
  }
  ::signal(SIGPIPE, SIG_IGN);
  return std::make_unique<StreamScorer>(fd, fd);
}

json StreamScorer::round_trip(const json& request) {
  write_frame(write_fd_, request.dump());
  auto payload = read_frame(read_fd_);
  if (!payload) throw ScorerError("scorer closed the connection");
  json response;
  try {
    response = json::parse(*payload);
  } catch (const json::parse_error& e) {
    throw ScorerError(std::string("scorer sent invalid JSON: ") + e.what());
  }
  return response;
}

std::vector<double> StreamScorer::score(const ScoringRequest& request) {
  json response = round_trip(request.wire());
  if (!response.is_object() || response.value("v", 0) != 1)
    throw ScorerError("scorer response has an unsupported version");
  const std::string kind = response.value("kind", "");
  if (kind == "error") throw ScorerError("scorer error: " + response.value("message", ""));
  if (kind != "q") throw ScorerError("unexpected scorer response kind '" + kind + "'");
  auto it = response.find("values");
  if (it == response.end()) throw ScorerError("scorer response has no values");
  const json& values = *it;
  if (!values.is_array() || values.size() != request.candidates.size())
    throw ScorerError("scorer returned " + std::to_string(values.size()) + " values for " +
                      std::to_string(request.candidates.size()) + " candidates");
  std::vector<double> q;
  q.reserve(values.size());
  for (const json& v : values) {
    if (!v.is_number() || !std::isfinite(v.get<double>()))
      throw ScorerError("scorer returned a non-finite value");
    q.push_back(v.get<double>());
  }
  return q;
}

}  // namespace gplan
