#include <doctest.h>

#include <array>
#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "qmuse/backend.hpp"
#include "qmuse/client.hpp"
#include "qmuse/hyperdie.hpp"
#include "qmuse/protocol.hpp"
#include "qmuse/rng.hpp"
#include "qmuse/server.hpp"
#include "rawsocket.hpp"

using namespace qmuse;
using namespace qmuse::net;
using testsupport::RawClient;
using testsupport::ScratchListener;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::array<std::array<double, 6>, 3> identity_angles() { return {}; }

// Non-trivial but exactly orthogonal gate angles for register X.
std::array<std::array<double, 6>, 3> mixed_angles() {
  auto angles = identity_angles();
  angles[0] = {243.0, 197.0, 243.0, 186.0, 180.0, 249.0};
  for (double& a : angles[0]) a *= kPi / 180.0;
  angles[1] = {kPi / 2, 0.0, 0.0, 0.0, 0.0, 0.0};
  return angles;
}

Request make_transition(std::uint64_t shots, std::uint64_t seed,
                        const std::string& session) {
  Request request;
  request.kind = RequestKind::transition;
  request.shots = shots;
  request.seed = seed;
  request.session = session;
  request.angles = identity_angles();
  return request;
}

Request make_hyperdie(std::uint64_t shots, std::optional<std::uint64_t> seed,
                      const std::string& session) {
  Request request;
  request.kind = RequestKind::hyperdie;
  request.shots = shots;
  request.seed = seed;
  request.session = session;
  return request;
}

std::vector<qc::MeasurementRecord> concat(std::vector<qc::MeasurementRecord> a,
                                          const std::vector<qc::MeasurementRecord>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

TEST_CASE("request serialization round-trips every field") {
  SUBCASE("minimal ping") {
    Request ping;
    const std::string line = serialize_request(ping);
    CHECK(line.find("\"kind\":\"ping\"") != std::string::npos);
    CHECK(line.find("\"version\":1") != std::string::npos);
    CHECK(line.find('\n') == std::string::npos);

    const Request back = parse_request(line);
    CHECK(back.version == kProtocolVersion);
    CHECK(back.kind == RequestKind::ping);
    CHECK(back.shots == 1);
    CHECK_FALSE(back.seed.has_value());
    CHECK(back.session.empty());
    CHECK_FALSE(back.angles.has_value());
    CHECK_FALSE(back.armed_bits.has_value());
  }

  SUBCASE("hyperdie with seed and session") {
    const Request back =
        parse_request(serialize_request(make_hyperdie(32, 77, "abc")));
    CHECK(back.kind == RequestKind::hyperdie);
    CHECK(back.shots == 32);
    REQUIRE(back.seed.has_value());
    CHECK(*back.seed == 77);
    CHECK(back.session == "abc");
  }

  SUBCASE("transition with angles and arming") {
    Request request = make_transition(3, 11, "s");
    auto angles = identity_angles();
    for (std::size_t reg = 0; reg < 3; ++reg) {
      for (std::size_t k = 0; k < 6; ++k) {
        angles[reg][k] = 0.1 * static_cast<double>(reg) +
                         0.01 * static_cast<double>(k);
      }
    }
    request.angles = angles;
    request.armed_bits = std::array<int, 6>{1, 0, 1, 1, 0, 0};

    const Request back = parse_request(serialize_request(request));
    CHECK(back.kind == RequestKind::transition);
    REQUIRE(back.angles.has_value());
    for (std::size_t reg = 0; reg < 3; ++reg) {
      for (std::size_t k = 0; k < 6; ++k) {
        CHECK((*back.angles)[reg][k] == doctest::Approx(angles[reg][k]).epsilon(1e-15));
      }
    }
    REQUIRE(back.armed_bits.has_value());
    CHECK(*back.armed_bits == std::array<int, 6>{1, 0, 1, 1, 0, 0});
  }

  SUBCASE("unarmed transitions omit the arming field") {
    const std::string line = serialize_request(make_transition(1, 1, "s"));
    CHECK(line.find("armed_bits") == std::string::npos);
    CHECK_FALSE(parse_request(line).armed_bits.has_value());
  }
}

TEST_CASE("malformed requests raise protocol errors") {
  CHECK_THROWS_AS(parse_request("{"), ProtocolError);
  CHECK_THROWS_AS(parse_request(""), ProtocolError);
  CHECK_THROWS_AS(parse_request("[]"), ProtocolError);
  CHECK_THROWS_AS(parse_request("42"), ProtocolError);

  CHECK_THROWS_WITH_AS(parse_request(R"({"kind":"ping"})"),
                       doctest::Contains("version"), ProtocolError);
  CHECK_THROWS_WITH_AS(parse_request(R"({"version":2,"kind":"ping"})"),
                       doctest::Contains("version"), ProtocolError);
  CHECK_THROWS_AS(parse_request(R"({"version":"1","kind":"ping"})"), ProtocolError);
  CHECK_THROWS_WITH_AS(parse_request(R"({"version":1})"),
                       doctest::Contains("kind"), ProtocolError);
  CHECK_THROWS_WITH_AS(parse_request(R"({"version":1,"kind":"coin"})"),
                       doctest::Contains("coin"), ProtocolError);

  CHECK_THROWS_WITH_AS(parse_request(R"({"version":1,"kind":"hyperdie","shots":0})"),
                       doctest::Contains("shots"), ProtocolError);
  CHECK_THROWS_AS(parse_request(R"({"version":1,"kind":"hyperdie","shots":-3})"),
                  ProtocolError);
  CHECK_THROWS_AS(parse_request(R"({"version":1,"kind":"hyperdie","shots":"many"})"),
                  ProtocolError);
  CHECK_THROWS_AS(parse_request(R"({"version":1,"kind":"hyperdie","seed":"x"})"),
                  ProtocolError);
  CHECK_THROWS_AS(parse_request(R"({"version":1,"kind":"hyperdie","session":5})"),
                  ProtocolError);

  // Kind/field consistency.
  CHECK_THROWS_WITH_AS(parse_request(R"({"version":1,"kind":"transition"})"),
                       doctest::Contains("angles"), ProtocolError);
  const std::string zero_angles =
      R"([[0,0,0,0,0,0],[0,0,0,0,0,0],[0,0,0,0,0,0]])";
  CHECK_THROWS_WITH_AS(
      parse_request(R"({"version":1,"kind":"hyperdie","angles":)" + zero_angles + "}"),
      doctest::Contains("angles only apply"), ProtocolError);
  CHECK_THROWS_WITH_AS(
      parse_request(R"({"version":1,"kind":"ping","armed_bits":[0,0,0,0,0,0]})"),
      doctest::Contains("armed_bits only apply"), ProtocolError);

  // Field shapes.
  CHECK_THROWS_WITH_AS(
      parse_request(R"({"version":1,"kind":"transition","angles":[[0,0,0,0,0,0],[0,0,0,0,0,0]]})"),
      doctest::Contains("3 registers"), ProtocolError);
  CHECK_THROWS_WITH_AS(
      parse_request(R"({"version":1,"kind":"transition","angles":[[0,0,0,0,0],[0,0,0,0,0,0],[0,0,0,0,0,0]]})"),
      doctest::Contains("6 angles"), ProtocolError);
  CHECK_THROWS_AS(
      parse_request(R"({"version":1,"kind":"transition","angles":[[0,0,0,0,0,"x"],[0,0,0,0,0,0],[0,0,0,0,0,0]]})"),
      ProtocolError);
  CHECK_THROWS_WITH_AS(
      parse_request(R"({"version":1,"kind":"transition","angles":)" + zero_angles +
                    R"(,"armed_bits":[0,1]})"),
      doctest::Contains("6 bits"), ProtocolError);
  CHECK_THROWS_WITH_AS(
      parse_request(R"({"version":1,"kind":"transition","angles":)" + zero_angles +
                    R"(,"armed_bits":[0,1,2,0,0,0]})"),
      doctest::Contains("0 or 1"), ProtocolError);

  SUBCASE("serialization validates too") {
    Request no_angles;
    no_angles.kind = RequestKind::transition;
    CHECK_THROWS_WITH_AS(serialize_request(no_angles),
                         doctest::Contains("angles"), ProtocolError);

    Request zero_shots;
    zero_shots.shots = 0;
    CHECK_THROWS_AS(serialize_request(zero_shots), ProtocolError);

    Request stray_bits;
    stray_bits.kind = RequestKind::hyperdie;
    stray_bits.armed_bits = std::array<int, 6>{};
    CHECK_THROWS_AS(serialize_request(stray_bits), ProtocolError);
  }
}

TEST_CASE("response serialization round-trips") {
  SUBCASE("ok with measurements and seed") {
    Response response;
    response.ok = true;
    response.kind = "transition";
    response.measurements = {qc::MeasurementRecord{{1, 0, 1, 1, 0, 0}},
                             qc::MeasurementRecord{{0, 0, 0, 0, 0, 0}}};
    response.seed = 99;

    const std::string line = serialize_response(response);
    CHECK(line.find("\"status\":\"ok\"") != std::string::npos);
    CHECK(line.find('\n') == std::string::npos);

    const Response back = parse_response(line);
    CHECK(back.ok);
    CHECK(back.kind == "transition");
    CHECK(back.measurements == response.measurements);
    REQUIRE(back.seed.has_value());
    CHECK(*back.seed == 99);
  }

  SUBCASE("ok with no shots keeps an empty array") {
    Response response;
    response.ok = true;
    response.kind = "ping";
    const std::string line = serialize_response(response);
    CHECK(line.find("\"measurements\":[]") != std::string::npos);
    const Response back = parse_response(line);
    CHECK(back.ok);
    CHECK(back.measurements.empty());
    CHECK_FALSE(back.seed.has_value());
  }

  SUBCASE("errors carry the message and nothing else") {
    Response response;
    response.ok = false;
    response.error_message = "broken";
    const std::string line = serialize_response(response);
    CHECK(line.find("measurements") == std::string::npos);
    const Response back = parse_response(line);
    CHECK_FALSE(back.ok);
    CHECK(back.error_message == "broken");
  }

  SUBCASE("malformed responses raise protocol errors") {
    CHECK_THROWS_AS(parse_response("{"), ProtocolError);
    CHECK_THROWS_AS(parse_response("[]"), ProtocolError);
    CHECK_THROWS_WITH_AS(parse_response(R"({"kind":"ping"})"),
                         doctest::Contains("status"), ProtocolError);
    CHECK_THROWS_WITH_AS(parse_response(R"({"status":"maybe"})"),
                         doctest::Contains("maybe"), ProtocolError);
    CHECK_THROWS_WITH_AS(parse_response(R"({"status":"ok"})"),
                         doctest::Contains("measurements"), ProtocolError);
    CHECK_THROWS_AS(parse_response(R"({"status":"ok","measurements":42})"),
                    ProtocolError);
    CHECK_THROWS_AS(parse_response(R"({"status":"ok","measurements":[7]})"),
                    ProtocolError);
    CHECK_THROWS_AS(parse_response(R"({"status":"ok","measurements":[[2]]})"),
                    ProtocolError);
    CHECK_THROWS_AS(parse_response(R"({"status":"ok","measurements":[["1"]]})"),
                    ProtocolError);
  }

  SUBCASE("an error response may omit the message") {
    const Response back = parse_response(R"({"status":"error"})");
    CHECK_FALSE(back.ok);
    CHECK(back.error_message.empty());
  }
}

TEST_CASE("the local backend reproduces the seeded die stream") {
  backend::LocalBackend a(4001);
  backend::LocalBackend b(4001);
  const auto from_a = a.run_hyperdie(5);
  CHECK(from_a == b.run_hyperdie(5));

  Rng rng(4001);
  std::vector<qc::MeasurementRecord> expected;
  for (int i = 0; i < 5; ++i) expected.push_back(die::roll_hyperdie(rng));
  CHECK(from_a == expected);
  for (const auto& record : from_a) CHECK(record.size() == 9);

  SUBCASE("the stream continues across calls") {
    backend::LocalBackend split(4001);
    const auto head = split.run_hyperdie(2);
    const auto tail = split.run_hyperdie(3);
    CHECK(concat(head, tail) == from_a);
  }

  SUBCASE("seeds resolve like the generator") {
    CHECK(backend::LocalBackend(7).seed() == 7);
    CHECK(backend::LocalBackend(0).seed() != 0);
  }
}

TEST_CASE("transition rounds honor arming and the shared round helper") {
  SUBCASE("identity angles echo the armed bits") {
    backend::TransitionSpec spec;
    spec.angles = identity_angles();
    spec.armed_bits = std::array<int, 6>{1, 0, 1, 1, 0, 1};

    backend::LocalBackend local(12);
    for (const auto& record : local.run_transition(spec, 10)) {
      REQUIRE(record.size() == 6);
      CHECK(record.bits == std::vector<int>{1, 0, 1, 1, 0, 1});
    }
  }

  SUBCASE("the backend matches the standalone round helper") {
    backend::TransitionSpec spec;
    spec.angles = mixed_angles();

    backend::LocalBackend local(31);
    Rng rng(31);
    std::vector<qc::MeasurementRecord> expected;
    for (int i = 0; i < 4; ++i) {
      expected.push_back(backend::run_transition_round(spec, rng));
    }
    CHECK(local.run_transition(spec, 4) == expected);
  }

  SUBCASE("unarmed rounds are seeded and well-formed") {
    backend::TransitionSpec spec;
    spec.angles = identity_angles();

    backend::LocalBackend a(77);
    backend::LocalBackend b(77);
    const auto rounds = a.run_transition(spec, 8);
    CHECK(rounds == b.run_transition(spec, 8));
    for (const auto& record : rounds) {
      REQUIRE(record.size() == 6);
      for (int bit : record.bits) CHECK((bit == 0 || bit == 1));
    }
  }
}

TEST_CASE("the server executes session-scoped requests") {
  BackendServer server(0);  // handle() needs no sockets

  SUBCASE("ping answers immediately") {
    Request ping;
    const Response response = server.handle(ping);
    CHECK(response.ok);
    CHECK(response.kind == "ping");
    CHECK(response.measurements.empty());
    CHECK_FALSE(response.seed.has_value());
  }

  SUBCASE("a fixed seed continues its session stream") {
    const Response first = server.handle(make_hyperdie(2, 123, "s1"));
    REQUIRE(first.ok);
    REQUIRE(first.seed.has_value());
    CHECK(*first.seed == 123);

    const Response second = server.handle(make_hyperdie(1, 123, "s1"));
    REQUIRE(second.ok);

    CHECK(concat(first.measurements, second.measurements) ==
          backend::LocalBackend(123).run_hyperdie(3));
  }

  SUBCASE("omitting the seed continues the stream too") {
    const Response first = server.handle(make_hyperdie(2, 123, "s2"));
    REQUIRE(first.ok);
    const Response second = server.handle(make_hyperdie(1, std::nullopt, "s2"));
    REQUIRE(second.ok);
    CHECK(concat(first.measurements, second.measurements) ==
          backend::LocalBackend(123).run_hyperdie(3));
  }

  SUBCASE("a different seed resets the stream") {
    REQUIRE(server.handle(make_hyperdie(2, 5, "s3")).ok);
    const Response reset = server.handle(make_hyperdie(2, 6, "s3"));
    REQUIRE(reset.ok);
    REQUIRE(reset.seed.has_value());
    CHECK(*reset.seed == 6);
    const Response more = server.handle(make_hyperdie(1, 6, "s3"));
    REQUIRE(more.ok);
    CHECK(concat(reset.measurements, more.measurements) ==
          backend::LocalBackend(6).run_hyperdie(3));
  }

  SUBCASE("absent or zero seeds draw entropy yet stay replayable") {
    const Response fresh = server.handle(make_hyperdie(3, std::nullopt, "s4"));
    REQUIRE(fresh.ok);
    REQUIRE(fresh.seed.has_value());
    CHECK(*fresh.seed != 0);
    CHECK(fresh.measurements == backend::LocalBackend(*fresh.seed).run_hyperdie(3));

    const Response zero = server.handle(make_hyperdie(3, 0, "s5"));
    REQUIRE(zero.ok);
    REQUIRE(zero.seed.has_value());
    CHECK(*zero.seed != 0);
    CHECK(zero.measurements == backend::LocalBackend(*zero.seed).run_hyperdie(3));
  }

  SUBCASE("sessions are isolated from each other") {
    std::vector<qc::MeasurementRecord> left;
    std::vector<qc::MeasurementRecord> right;
    for (int i = 0; i < 2; ++i) {
      const Response l = server.handle(make_hyperdie(1, 42, "left"));
      REQUIRE(l.ok);
      left = concat(left, l.measurements);
      const Response r = server.handle(make_hyperdie(1, 42, "right"));
      REQUIRE(r.ok);
      right = concat(right, r.measurements);
    }
    const auto expected = backend::LocalBackend(42).run_hyperdie(2);
    CHECK(left == expected);
    CHECK(right == expected);
  }

  SUBCASE("transition requests run armed rounds") {
    Request request = make_transition(3, 9, "t");
    request.armed_bits = std::array<int, 6>{0, 1, 1, 0, 1, 0};
    const Response response = server.handle(request);
    REQUIRE(response.ok);
    CHECK(response.kind == "transition");
    REQUIRE(response.measurements.size() == 3);
    for (const auto& record : response.measurements) {
      CHECK(record.bits == std::vector<int>{0, 1, 1, 0, 1, 0});
    }
  }

  SUBCASE("the per-request shot cap is enforced") {
    const Response response = server.handle(make_hyperdie(1000001, 1, "cap"));
    CHECK_FALSE(response.ok);
    CHECK(response.measurements.empty());
    CHECK(response.error_message.find("1000000") != std::string::npos);
  }
}

TEST_CASE("the wire protocol serves and survives hostile lines") {
  BackendServer server(0);
  server.start();
  REQUIRE(server.running());
  REQUIRE(server.port() != 0);
  const Endpoint endpoint{"127.0.0.1", server.port()};

  SUBCASE("client_run exchanges one request") {
    const Response response = client_run(endpoint, make_hyperdie(4, 99, "wire"));
    REQUIRE(response.ok);
    CHECK(response.measurements == backend::LocalBackend(99).run_hyperdie(4));
    REQUIRE(response.seed.has_value());
    CHECK(*response.seed == 99);

    const Response pong = client_run(endpoint, Request{});
    CHECK(pong.ok);
    CHECK(pong.kind == "ping");
  }

  SUBCASE("a malformed line leaves the connection usable") {
    RawClient raw(server.port());
    raw.send_line("this is not json");
    const Response error = parse_response(raw.read_line());
    CHECK_FALSE(error.ok);
    CHECK(error.error_message.find("invalid request") != std::string::npos);

    raw.send_line(serialize_request(Request{}));
    const Response pong = parse_response(raw.read_line());
    CHECK(pong.ok);
    CHECK(pong.kind == "ping");
  }

  SUBCASE("blank lines are skipped without a response") {
    RawClient raw(server.port());
    raw.send_raw("\r\n\n");
    raw.send_line(serialize_request(Request{}));
    const Response pong = parse_response(raw.read_line());
    CHECK(pong.ok);
    CHECK(pong.kind == "ping");
  }

  SUBCASE("one connection can carry a whole session") {
    RawClient raw(server.port());
    raw.send_line(serialize_request(make_hyperdie(2, 321, "conn")));
    raw.send_line(serialize_request(make_hyperdie(3, 321, "conn")));
    const Response first = parse_response(raw.read_line());
    const Response second = parse_response(raw.read_line());
    REQUIRE(first.ok);
    REQUIRE(second.ok);
    CHECK(concat(first.measurements, second.measurements) ==
          backend::LocalBackend(321).run_hyperdie(5));
  }

  SUBCASE("an unterminated flood is refused and the connection closed") {
    RawClient raw(server.port());
    raw.send_raw(std::string(1 << 20, 'x'));
    // Let the server drain the full megabyte before the overflowing tail
    // arrives, so the refusal is written against an empty receive queue.
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
    raw.send_raw("!!");
    const Response error = parse_response(raw.read_line());
    CHECK_FALSE(error.ok);
    CHECK(error.error_message.find("1 MiB") != std::string::npos);
    CHECK(raw.closed_by_peer());
  }

  SUBCASE("fuzzed garbage lines each get an error and never wedge the server") {
    RawClient raw(server.port());
    Rng fuzz(31337);
    for (int i = 0; i < 40; ++i) {
      const std::size_t length = 1 + fuzz.below(60);
      std::string line;
      for (std::size_t k = 0; k < length; ++k) {
        line.push_back(static_cast<char>(32 + fuzz.below(95)));
      }
      raw.send_line(line);
      const Response response = parse_response(raw.read_line());
      CHECK_FALSE(response.ok);
      CHECK_FALSE(response.error_message.empty());
    }
    raw.send_line(serialize_request(Request{}));
    CHECK(parse_response(raw.read_line()).ok);
  }
}

TEST_CASE("client failures distinguish refusal from silence") {
  SUBCASE("a closed port raises ConnectError") {
    ScratchListener scratch;
    const std::uint16_t dead_port = scratch.port();
    scratch.close();
    CHECK_THROWS_WITH_AS(
        client_run(Endpoint{"127.0.0.1", dead_port}, Request{}, 500),
        doctest::Contains("cannot connect"), ConnectError);
  }

  SUBCASE("a silent server raises TimeoutError") {
    ScratchListener silent;  // accepts at the TCP level, never answers
    CHECK_THROWS_WITH_AS(
        client_run(Endpoint{"127.0.0.1", silent.port()}, Request{}, 200),
        doctest::Contains("no response within 200 ms"), TimeoutError);
  }

  SUBCASE("hostnames are rejected before any connection attempt") {
    CHECK_THROWS_WITH_AS(client_run(Endpoint{"example.com", 80}, Request{}, 200),
                         doctest::Contains("cannot parse host"), ConnectError);
  }
}

TEST_CASE("endpoint strings parse with an optional host") {
  const Endpoint full = parse_endpoint("10.0.0.5:8080");
  CHECK(full.host == "10.0.0.5");
  CHECK(full.port == 8080);

  const Endpoint bare = parse_endpoint("7453");
  CHECK(bare.host == "127.0.0.1");
  CHECK(bare.port == 7453);

  const Endpoint anon = parse_endpoint(":9001");
  CHECK(anon.host == "127.0.0.1");
  CHECK(anon.port == 9001);

  for (const std::string bad : {"", "abc", "host:", "host:port", "host:0",
                                "host:65536", "1.2.3.4:-1"}) {
    CHECK_THROWS_WITH_AS(parse_endpoint(bad),
                         doctest::Contains("invalid backend address"),
                         ConnectError);
  }
}

TEST_CASE("the remote backend is indistinguishable from a local one") {
  BackendServer server(0);
  server.start();
  const Endpoint endpoint{"127.0.0.1", server.port()};

  SUBCASE("hyperdie streams match record for record") {
    RemoteBackend remote(endpoint, 2026);
    backend::LocalBackend local(2026);
    CHECK(remote.seed() == 2026);
    CHECK(remote.session().rfind("7ea-", 0) == 0);  // hex seed prefix
    CHECK(remote.run_hyperdie(5) == local.run_hyperdie(5));
  }

  SUBCASE("the stream continues across calls") {
    RemoteBackend remote(endpoint, 2026);
    const auto head = remote.run_hyperdie(2);
    const auto tail = remote.run_hyperdie(3);
    CHECK(concat(head, tail) == backend::LocalBackend(2026).run_hyperdie(5));
  }

  SUBCASE("transition rounds match, arming included") {
    backend::TransitionSpec spec;
    spec.angles = mixed_angles();
    RemoteBackend remote(endpoint, 808);
    backend::LocalBackend local(808);
    CHECK(remote.run_transition(spec, 4) == local.run_transition(spec, 4));

    spec.armed_bits = std::array<int, 6>{1, 1, 0, 0, 1, 0};
    CHECK(remote.run_transition(spec, 2) == local.run_transition(spec, 2));
  }

  SUBCASE("entropy seeds resolve client-side and stay replayable") {
    RemoteBackend remote(endpoint, 0);
    CHECK(remote.seed() != 0);
    const auto records = remote.run_hyperdie(3);
    CHECK(records == backend::LocalBackend(remote.seed()).run_hyperdie(3));
  }

  SUBCASE("equal seeds in separate instances get untouched streams") {
    RemoteBackend first(endpoint, 555);
    RemoteBackend second(endpoint, 555);
    CHECK(first.session() != second.session());

    const auto head = first.run_hyperdie(2);
    CHECK(second.run_hyperdie(2) == head);  // unaffected by first's draws

    const auto full = backend::LocalBackend(555).run_hyperdie(3);
    CHECK(head == std::vector<qc::MeasurementRecord>(full.begin(), full.begin() + 2));
    CHECK(first.run_hyperdie(1).front() == full.back());
  }

  SUBCASE("server-side failures surface as BackendError") {
    RemoteBackend remote(endpoint, 1);
    CHECK_THROWS_WITH_AS(remote.run_hyperdie(1000001),
                         doctest::Contains("per-request limit"), BackendError);
  }
}
