#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "qmuse/qcsim.hpp"
#include "qmuse/rng.hpp"

namespace qmuse::backend {

// One qSeq round across the three 2-qubit registers X, Y, Z. armed_bits is
// the full 6-bit arming pattern [c5 .. c0] (X = c5 c4, Y = c3 c2,
// Z = c1 c0); when absent each register is prepared as H|0> (x) H|0>.
struct TransitionSpec {
  std::array<std::array<double, 6>, 3> angles{};  // Givens angles per register
  std::optional<std::array<int, 6>> armed_bits;
};

// Circuit executor. Implementations own their random stream; a fixed seed
// and call sequence reproduces the same measurement records no matter
// whether the circuits run in-process or behind the TCP service.
class QuantumBackend {
 public:
  virtual ~QuantumBackend() = default;

  // 9-bit records [c8 .. c0] from the all-Hadamard hyper-die.
  virtual std::vector<qc::MeasurementRecord> run_hyperdie(std::size_t shots) = 0;

  // 6-bit records [c5 .. c0]; registers execute in X, Y, Z order per shot.
  virtual std::vector<qc::MeasurementRecord> run_transition(
      const TransitionSpec& spec, std::size_t shots) = 0;
};

class LocalBackend : public QuantumBackend {
 public:
  explicit LocalBackend(std::uint64_t seed);

  // The resolved seed (never 0), recorded in run manifests.
  std::uint64_t seed() const { return rng_.seed(); }

  std::vector<qc::MeasurementRecord> run_hyperdie(std::size_t shots) override;
  std::vector<qc::MeasurementRecord> run_transition(const TransitionSpec& spec,
                                                    std::size_t shots) override;

 private:
  Rng rng_;
};

// Shared by LocalBackend and the service: run one 3-register round.
qc::MeasurementRecord run_transition_round(const TransitionSpec& spec, Rng& rng);

}  // namespace qmuse::backend
