#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "qmuse/protocol.hpp"
#include "qmuse/rng.hpp"

namespace qmuse::net {

// TCP circuit-execution service: one request per line, one response per
// line. Each session token owns an isolated seeded random stream, so a
// fixed seed reproduces the same measurements as a local run. Malformed
// requests produce error responses and leave the connection open.
class BackendServer {
 public:
  // Port 0 picks a free port (see port() after start).
  explicit BackendServer(std::uint16_t port, std::string bind_address = "127.0.0.1");
  ~BackendServer();

  BackendServer(const BackendServer&) = delete;
  BackendServer& operator=(const BackendServer&) = delete;

  // Binds and starts the accept loop; throws std::runtime_error when the
  // port cannot be bound.
  void start();
  void stop();

  std::uint16_t port() const { return port_; }
  bool running() const { return running_.load(); }

  // Request execution, shared with tests; thread-safe.
  Response handle(const Request& request);

 private:
  struct Session {
    explicit Session(std::uint64_t seed) : rng(seed), resolved_seed(rng.seed()) {}

    Rng rng;
    std::uint64_t resolved_seed;
    std::mutex m;  // serializes this session's request stream
  };

  void accept_loop();
  void serve_connection(int fd);
  std::string handle_line(const std::string& line);

  std::string bind_address_;
  std::uint16_t port_;
  int listen_fd_ = -1;
  std::atomic<bool> running_{false};
  std::thread accept_thread_;

  std::mutex connections_mutex_;
  std::vector<std::thread> connection_threads_;

  std::mutex sessions_mutex_;
  std::map<std::string, std::unique_ptr<Session>> sessions_;
};

}  // namespace qmuse::net
