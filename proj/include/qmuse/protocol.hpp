#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmuse/qcsim.hpp"

namespace qmuse::net {

inline constexpr int kProtocolVersion = 1;

// Malformed wire data (either direction).
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A status=error response surfaced to the caller.
class BackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class RequestKind { hyperdie, transition, ping };

std::string to_string(RequestKind kind);

// One request line. `session` scopes the random stream: the first request
// for a token seeds it, matching seeds continue it, a different seed
// resets it. Seed 0 asks the server for fresh entropy.
struct Request {
  int version = kProtocolVersion;
  RequestKind kind = RequestKind::ping;
  std::uint64_t shots = 1;
  std::optional<std::uint64_t> seed;
  std::string session;
  std::optional<std::array<std::array<double, 6>, 3>> angles;  // transition only
  std::optional<std::array<int, 6>> armed_bits;                // transition only
};

struct Response {
  bool ok = false;
  std::string kind;
  std::vector<qc::MeasurementRecord> measurements;
  std::optional<std::uint64_t> seed;  // resolved session seed
  std::string error_message;
};

// Serialized forms are single lines without the trailing newline.
std::string serialize_request(const Request& request);
Request parse_request(const std::string& line);

std::string serialize_response(const Response& response);
Response parse_response(const std::string& line);

}  // namespace qmuse::net
