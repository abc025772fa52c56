#pragma once

#include <cstdint>
#include <string>

#include "qmuse/backend.hpp"
#include "qmuse/protocol.hpp"

namespace qmuse::net {

// Could not reach the server (refused, unresolved, broken connection).
class ConnectError : public BackendError {
 public:
  using BackendError::BackendError;
};

// The server was reached but did not answer within the deadline.
class TimeoutError : public BackendError {
 public:
  using BackendError::BackendError;
};

struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;
};

// "host:port" (host optional, defaults to 127.0.0.1).
Endpoint parse_endpoint(const std::string& address);

// One request/response exchange on a fresh connection.
Response client_run(const Endpoint& endpoint, const Request& request,
                    int timeout_ms = 10000);

// QuantumBackend that forwards circuits to a service. The seed is resolved
// locally (0 means entropy) and sent with every request, so a remote run
// with a recorded seed replays bit-identically; each instance uses a
// unique session token to get an untouched stream.
class RemoteBackend : public backend::QuantumBackend {
 public:
  RemoteBackend(Endpoint endpoint, std::uint64_t seed, int timeout_ms = 10000);

  std::uint64_t seed() const { return seed_; }
  const std::string& session() const { return session_; }

  std::vector<qc::MeasurementRecord> run_hyperdie(std::size_t shots) override;
  std::vector<qc::MeasurementRecord> run_transition(
      const backend::TransitionSpec& spec, std::size_t shots) override;

 private:
  std::vector<qc::MeasurementRecord> exchange(Request request, std::size_t shots);

  Endpoint endpoint_;
  std::uint64_t seed_;
  std::string session_;
  int timeout_ms_;
};

}  // namespace qmuse::net
