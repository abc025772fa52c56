#include "qmuse/backend.hpp"

#include <stdexcept>

#include "qmuse/hyperdie.hpp"

namespace qmuse::backend {

qc::MeasurementRecord run_transition_round(const TransitionSpec& spec, Rng& rng) {
  if (spec.armed_bits) {
    for (int bit : *spec.armed_bits) {
      if (bit != 0 && bit != 1) {
        throw std::invalid_argument("armed bits must be 0 or 1");
      }
    }
  }

  qc::MeasurementRecord combined;
  combined.bits.reserve(6);
  for (std::size_t reg = 0; reg < 3; ++reg) {
    qc::StateVector state(2);
    if (spec.armed_bits) {
      const auto& bits = *spec.armed_bits;
      state = qc::StateVector(2, {bits[2 * reg], bits[2 * reg + 1]});
    } else {
      state.apply_hadamard_all();
    }
    state.apply_transition_gate(qc::compose_givens(spec.angles[reg]));
    const qc::MeasurementRecord result = state.measure_all(rng);
    combined.bits.push_back(result.bits[0]);
    combined.bits.push_back(result.bits[1]);
  }
  return combined;
}

LocalBackend::LocalBackend(std::uint64_t seed) : rng_(seed) {}

std::vector<qc::MeasurementRecord> LocalBackend::run_hyperdie(std::size_t shots) {
  std::vector<qc::MeasurementRecord> records;
  records.reserve(shots);
  for (std::size_t s = 0; s < shots; ++s) {
    records.push_back(die::roll_hyperdie(rng_));
  }
  return records;
}

std::vector<qc::MeasurementRecord> LocalBackend::run_transition(
    const TransitionSpec& spec, std::size_t shots) {
  std::vector<qc::MeasurementRecord> records;
  records.reserve(shots);
  for (std::size_t s = 0; s < shots; ++s) {
    records.push_back(run_transition_round(spec, rng_));
  }
  return records;
}

}  // namespace qmuse::backend
