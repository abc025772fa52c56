#include "qmuse/protocol.hpp"

#include <json.hpp>

namespace qmuse::net {

namespace {

using nlohmann::json;

RequestKind kind_from_string(const std::string& name) {
  if (name == "hyperdie") return RequestKind::hyperdie;
  if (name == "transition") return RequestKind::transition;
  if (name == "ping") return RequestKind::ping;
  throw ProtocolError("unknown request kind '" + name + "'");
}

std::array<int, 6> parse_bits(const json& j) {
  if (!j.is_array() || j.size() != 6) {
    throw ProtocolError("armed_bits must be an array of 6 bits");
  }
  std::array<int, 6> bits{};
  for (std::size_t i = 0; i < 6; ++i) {
    if (!j[i].is_number_integer()) throw ProtocolError("armed_bits must be integers");
    const int b = j[i].get<int>();
    if (b != 0 && b != 1) throw ProtocolError("armed_bits must be 0 or 1");
    bits[i] = b;
  }
  return bits;
}

std::array<std::array<double, 6>, 3> parse_angles(const json& j) {
  if (!j.is_array() || j.size() != 3) {
    throw ProtocolError("angles must be an array of 3 registers");
  }
  std::array<std::array<double, 6>, 3> angles{};
  for (std::size_t reg = 0; reg < 3; ++reg) {
    if (!j[reg].is_array() || j[reg].size() != 6) {
      throw ProtocolError("each register needs 6 angles");
    }
    for (std::size_t k = 0; k < 6; ++k) {
      if (!j[reg][k].is_number()) throw ProtocolError("angles must be numbers");
      angles[reg][k] = j[reg][k].get<double>();
    }
  }
  return angles;
}

void validate(const Request& request) {
  if (request.version != kProtocolVersion) {
    throw ProtocolError("unsupported protocol version " + std::to_string(request.version));
  }
  if (request.shots < 1) throw ProtocolError("shots must be at least 1");
  if (request.kind == RequestKind::transition) {
    if (!request.angles) throw ProtocolError("transition requests require angles");
  } else {
    if (request.angles) throw ProtocolError("angles only apply to transition requests");
    if (request.armed_bits) {
      throw ProtocolError("armed_bits only apply to transition requests");
    }
  }
}

}  // namespace

std::string to_string(RequestKind kind) {
  switch (kind) {
    case RequestKind::hyperdie:
      return "hyperdie";
    case RequestKind::transition:
      return "transition";
    case RequestKind::ping:
      return "ping";
  }
  throw std::logic_error("unreachable");
}

std::string serialize_request(const Request& request) {
  validate(request);
  json j;
  j["version"] = request.version;
  j["kind"] = to_string(request.kind);
  j["shots"] = request.shots;
  if (request.seed) j["seed"] = *request.seed;
  if (!request.session.empty()) j["session"] = request.session;
  if (request.angles) {
    json regs = json::array();
    for (const auto& reg : *request.angles) regs.push_back(reg);
    j["angles"] = std::move(regs);
  }
  if (request.armed_bits) j["armed_bits"] = *request.armed_bits;
  return j.dump();
}

Request parse_request(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("invalid request: ") + e.what());
  }
  if (!j.is_object()) throw ProtocolError("request must be an object");

  Request request;
  if (!j.contains("version") || !j["version"].is_number_integer()) {
    throw ProtocolError("request requires an integer version");
  }
  request.version = j["version"].get<int>();
  if (!j.contains("kind") || !j["kind"].is_string()) {
    throw ProtocolError("request requires a kind");
  }
  request.kind = kind_from_string(j["kind"].get<std::string>());
  if (j.contains("shots")) {
    if (!j["shots"].is_number_unsigned() && !j["shots"].is_number_integer()) {
      throw ProtocolError("shots must be an integer");
    }
    const auto shots = j["shots"].get<std::int64_t>();
    if (shots < 1) throw ProtocolError("shots must be at least 1");
    request.shots = static_cast<std::uint64_t>(shots);
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer()) {
      throw ProtocolError("seed must be an integer");
    }
    request.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("session")) {
    if (!j["session"].is_string()) throw ProtocolError("session must be a string");
    request.session = j["session"].get<std::string>();
  }
  if (j.contains("angles")) request.angles = parse_angles(j["angles"]);
  if (j.contains("armed_bits")) request.armed_bits = parse_bits(j["armed_bits"]);
  validate(request);
  return request;
}

std::string serialize_response(const Response& response) {
  json j;
  j["status"] = response.ok ? "ok" : "error";
  if (response.ok) {
    j["kind"] = response.kind;
    json records = json::array();
    for (const qc::MeasurementRecord& record : response.measurements) {
      records.push_back(record.bits);
    }
    j["measurements"] = std::move(records);
    if (response.seed) j["seed"] = *response.seed;
  } else {
    j["error_message"] = response.error_message;
  }
  return j.dump();
}

Response parse_response(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("invalid response: ") + e.what());
  }
  if (!j.is_object() || !j.contains("status") || !j["status"].is_string()) {
    throw ProtocolError("response requires a status");
  }

  Response response;
  const std::string status = j["status"].get<std::string>();
  if (status == "ok") {
    response.ok = true;
  } else if (status == "error") {
    response.ok = false;
  } else {
    throw ProtocolError("unknown status '" + status + "'");
  }

  if (!response.ok) {
    if (j.contains("error_message") && j["error_message"].is_string()) {
      response.error_message = j["error_message"].get<std::string>();
    }
    return response;
  }

  if (j.contains("kind") && j["kind"].is_string()) {
    response.kind = j["kind"].get<std::string>();
  }
  if (j.contains("seed") && j["seed"].is_number()) {
    response.seed = j["seed"].get<std::uint64_t>();
  }
  if (!j.contains("measurements") || !j["measurements"].is_array()) {
    throw ProtocolError("ok response requires measurements");
  }
  for (const json& rec : j["measurements"]) {
    if (!rec.is_array()) throw ProtocolError("each measurement must be a bit array");
    qc::MeasurementRecord record;
    for (const json& bit : rec) {
      if (!bit.is_number_integer()) throw ProtocolError("bits must be integers");
      const int b = bit.get<int>();
      if (b != 0 && b != 1) throw ProtocolError("bits must be 0 or 1");
      record.bits.push_back(b);
    }
    response.measurements.push_back(std::move(record));
  }
  return response;
}

}  // namespace qmuse::net
