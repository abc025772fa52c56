#include "qmuse/client.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <sstream>

#include "qmuse/rng.hpp"

namespace qmuse::net {

namespace {

class Socket {
 public:
  explicit Socket(int fd) : fd_(fd) {}
  ~Socket() {
    if (fd_ >= 0) ::close(fd_);
  }
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  int get() const { return fd_; }

 private:
  int fd_;
};

int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace

Endpoint parse_endpoint(const std::string& address) {
  Endpoint endpoint;
  const auto colon = address.find_last_of(':');
  std::string port_text;
  if (colon == std::string::npos) {
    port_text = address;
  } else {
    if (colon > 0) endpoint.host = address.substr(0, colon);
    port_text = address.substr(colon + 1);
  }
  try {
    const int port = std::stoi(port_text);
    if (port < 1 || port > 65535) throw std::out_of_range("port");
    endpoint.port = static_cast<std::uint16_t>(port);
  } catch (const std::exception&) {
    throw ConnectError("invalid backend address '" + address +
                       "' (expected host:port)");
  }
  return endpoint;
}

Response client_run(const Endpoint& endpoint, const Request& request, int timeout_ms) {
  Socket sock(::socket(AF_INET, SOCK_STREAM, 0));
  if (sock.get() < 0) throw ConnectError("socket() failed");

  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(endpoint.port);
  if (::inet_pton(AF_INET, endpoint.host.c_str(), &addr.sin_addr) != 1) {
    throw ConnectError("cannot parse host address '" + endpoint.host + "'");
  }
  if (::connect(sock.get(), reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    throw ConnectError("cannot connect to " + endpoint.host + ":" +
                       std::to_string(endpoint.port) + ": " + std::strerror(errno));
  }

  const std::string line = serialize_request(request) + "\n";
  std::size_t sent = 0;
  while (sent < line.size()) {
    const ssize_t n =
        ::send(sock.get(), line.data() + sent, line.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ConnectError(std::string("send failed: ") + std::strerror(errno));
    }
    sent += static_cast<std::size_t>(n);
  }

  std::string buffer;
  char chunk[4096];
  const int64_t deadline = now_ms() + timeout_ms;
  for (;;) {
    const int64_t remaining = deadline - now_ms();
    if (remaining <= 0) {
      throw TimeoutError("no response within " + std::to_string(timeout_ms) + " ms");
    }
    pollfd pfd{sock.get(), POLLIN, 0};
    const int ready = ::poll(&pfd, 1, static_cast<int>(remaining));
    if (ready == 0) {
      throw TimeoutError("no response within " + std::to_string(timeout_ms) + " ms");
    }
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw ConnectError(std::string("poll failed: ") + std::strerror(errno));
    }
    const ssize_t n = ::recv(sock.get(), chunk, sizeof chunk, 0);
    if (n == 0) throw ConnectError("server closed the connection mid-response");
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ConnectError(std::string("recv failed: ") + std::strerror(errno));
    }
    buffer.append(chunk, static_cast<std::size_t>(n));
    const auto newline = buffer.find('\n');
    if (newline != std::string::npos) {
      return parse_response(buffer.substr(0, newline));
    }
  }
}

RemoteBackend::RemoteBackend(Endpoint endpoint, std::uint64_t seed, int timeout_ms)
    : endpoint_(std::move(endpoint)), seed_(Rng(seed).seed()), timeout_ms_(timeout_ms) {
  // Unique per instance so an earlier run with the same seed cannot leave
  // a half-used stream behind on a long-running server.
  Rng token_source(Rng::kEntropySeed);
  std::ostringstream token;
  token << std::hex << seed_ << "-" << token_source.next_u64();
  session_ = token.str();
}

std::vector<qc::MeasurementRecord> RemoteBackend::exchange(Request request,
                                                           std::size_t shots) {
  request.version = kProtocolVersion;
  request.shots = shots;
  request.seed = seed_;
  request.session = session_;
  const Response response = client_run(endpoint_, request, timeout_ms_);
  if (!response.ok) {
    throw BackendError("backend error: " + response.error_message);
  }
  if (response.measurements.size() != shots) {
    throw ProtocolError("backend returned " +
                        std::to_string(response.measurements.size()) +
                        " measurements for " + std::to_string(shots) + " shots");
  }
  return response.measurements;
}

std::vector<qc::MeasurementRecord> RemoteBackend::run_hyperdie(std::size_t shots) {
  Request request;
  request.kind = RequestKind::hyperdie;
  return exchange(std::move(request), shots);
}

std::vector<qc::MeasurementRecord> RemoteBackend::run_transition(
    const backend::TransitionSpec& spec, std::size_t shots) {
  Request request;
  request.kind = RequestKind::transition;
  request.angles = spec.angles;
  request.armed_bits = spec.armed_bits;
  return exchange(std::move(request), shots);
}

}  // namespace qmuse::net
