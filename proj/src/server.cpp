#include "qmuse/server.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <stdexcept>
#include <utility>

#include "qmuse/backend.hpp"
#include "qmuse/hyperdie.hpp"

namespace qmuse::net {

namespace {

constexpr std::size_t kMaxLineBytes = 1 << 20;
constexpr std::uint64_t kMaxShots = 1000000;
constexpr int kPollIntervalMs = 200;

void write_all(int fd, const std::string& data) {
  std::size_t sent = 0;
  while (sent < data.size()) {
    const ssize_t n = ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      return;  // peer vanished; connection loop will notice on next read
    }
    sent += static_cast<std::size_t>(n);
  }
}

}  // namespace

BackendServer::BackendServer(std::uint16_t port, std::string bind_address)
    : bind_address_(std::move(bind_address)), port_(port) {}

BackendServer::~BackendServer() { stop(); }

void BackendServer::start() {
  if (running_.load()) return;

  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw std::runtime_error("socket() failed");

  const int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);

  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port_);
  if (::inet_pton(AF_INET, bind_address_.c_str(), &addr.sin_addr) != 1) {
    ::close(listen_fd_);
    listen_fd_ = -1;
    throw std::runtime_error("invalid bind address: " + bind_address_);
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    const std::string reason = std::strerror(errno);
    ::close(listen_fd_);
    listen_fd_ = -1;
    throw std::runtime_error("cannot bind " + bind_address_ + ":" +
                             std::to_string(port_) + ": " + reason);
  }
  if (::listen(listen_fd_, 16) != 0) {
    ::close(listen_fd_);
    listen_fd_ = -1;
    throw std::runtime_error("listen() failed");
  }

  sockaddr_in bound{};
  socklen_t len = sizeof bound;
  if (::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&bound), &len) == 0) {
    port_ = ntohs(bound.sin_port);
  }

  running_.store(true);
  accept_thread_ = std::thread(&BackendServer::accept_loop, this);
}

void BackendServer::stop() {
  if (!running_.exchange(false)) {
    if (accept_thread_.joinable()) accept_thread_.join();
    return;
  }
  if (listen_fd_ >= 0) {
    ::shutdown(listen_fd_, SHUT_RDWR);
    ::close(listen_fd_);
    listen_fd_ = -1;
  }
  if (accept_thread_.joinable()) accept_thread_.join();
  std::vector<std::thread> workers;
  {
    std::lock_guard<std::mutex> lock(connections_mutex_);
    workers.swap(connection_threads_);
  }
  for (std::thread& worker : workers) {
    if (worker.joinable()) worker.join();
  }
}

void BackendServer::accept_loop() {
  while (running_.load()) {
    pollfd pfd{listen_fd_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, kPollIntervalMs);
    if (!running_.load()) break;
    if (ready <= 0) continue;
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) continue;
    std::lock_guard<std::mutex> lock(connections_mutex_);
    connection_threads_.emplace_back(&BackendServer::serve_connection, this, fd);
  }
}

void BackendServer::serve_connection(int fd) {
  std::string buffer;
  char chunk[4096];
  while (running_.load()) {
    pollfd pfd{fd, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, kPollIntervalMs);
    if (!running_.load()) break;
    if (ready <= 0) continue;
    const ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
    if (n == 0) break;  // peer closed
    if (n < 0) {
      if (errno == EINTR) continue;
      break;
    }
    buffer.append(chunk, static_cast<std::size_t>(n));

    std::size_t newline;
    while ((newline = buffer.find('\n')) != std::string::npos) {
      std::string line = buffer.substr(0, newline);
      buffer.erase(0, newline + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      write_all(fd, handle_line(line) + "\n");
    }
    if (buffer.size() > kMaxLineBytes) {
      Response overflow;
      overflow.ok = false;
      overflow.error_message = "request line exceeds 1 MiB";
      write_all(fd, serialize_response(overflow) + "\n");
      break;
    }
  }
  ::close(fd);
}

std::string BackendServer::handle_line(const std::string& line) {
  Response response;
  try {
    response = handle(parse_request(line));
  } catch (const std::exception& e) {
    response.ok = false;
    response.error_message = e.what();
  }
  return serialize_response(response);
}

Response BackendServer::handle(const Request& request) {
  Response response;
  response.kind = to_string(request.kind);

  if (request.kind == RequestKind::ping) {
    response.ok = true;
    return response;
  }
  if (request.shots > kMaxShots) {
    response.ok = false;
    response.error_message = "shots exceed the per-request limit of " +
                             std::to_string(kMaxShots);
    return response;
  }

  Session* session = nullptr;
  {
    std::lock_guard<std::mutex> lock(sessions_mutex_);
    auto it = sessions_.find(request.session);
    if (it == sessions_.end()) {
      it = sessions_
               .emplace(request.session,
                        std::make_unique<Session>(request.seed.value_or(0)))
               .first;
    } else if (request.seed && *request.seed != it->second->resolved_seed) {
      // A different explicit seed resets the session's stream.
      it->second->rng = Rng(*request.seed);
      it->second->resolved_seed = it->second->rng.seed();
    }
    session = it->second.get();
  }

  try {
    std::lock_guard<std::mutex> lock(session->m);
    if (request.kind == RequestKind::hyperdie) {
      for (std::uint64_t s = 0; s < request.shots; ++s) {
        response.measurements.push_back(die::roll_hyperdie(session->rng));
      }
    } else {
      backend::TransitionSpec spec;
      spec.angles = *request.angles;
      spec.armed_bits = request.armed_bits;
      for (std::uint64_t s = 0; s < request.shots; ++s) {
        response.measurements.push_back(backend::run_transition_round(spec, session->rng));
      }
    }
    response.seed = session->resolved_seed;
    response.ok = true;
  } catch (const std::exception& e) {
    response.ok = false;
    response.measurements.clear();
    response.error_message = e.what();
  }
  return response;
}

}  // namespace qmuse::net
