#include "qmuse/hyperdie.hpp"

#include <stdexcept>
#include <string>

#include "qmuse/config.hpp"

namespace qmuse::die {

namespace {

constexpr double kMinFreq = 50.0;
constexpr double kMaxFreq = 8000.0;

void check_freq(double hz, const std::string& field) {
  if (!(hz >= kMinFreq && hz <= kMaxFreq)) {
    throw std::invalid_argument(field + ": frequency " + std::to_string(hz) +
                                " outside 50..8000 Hz");
  }
}

void check_unit(double v, const std::string& field) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw std::invalid_argument(field + ": value " + std::to_string(v) +
                                " outside 0..1");
  }
}

void check_positive(double v, const std::string& field) {
  if (!(v > 0.0)) {
    throw std::invalid_argument(field + ": value must be strictly positive");
  }
}

}  // namespace

ParameterBank ParameterBank::defaults() {
  ParameterBank bank;
  bank.freq = {{
      {55.0, 277.18, 220.0, 329.63, 164.81, 277.18, 220.0, 329.63},
      {82.4, 369.99, 293.67, 196.0, 466.16, 369.99, 293.67, 196.0},
      {87.3, 349.23, 277.18, 440.0, 87.3, 349.23, 277.18, 440.0},
      {92.49, 415.3, 329.63, 233.08, 523.25, 329.63, 233.08, 523.25},
      {435.53, 1468.32, 1038.26, 1959.97, 2330.81, 1468.32, 1038.26, 1959.97},
      {440.0, 2217.46, 1760.0, 2637.02, 1318.51, 2217.46, 1760.0, 2637.02},
      {435.53, 1746.14, 1385.91, 2200.0, 435.53, 1746.14, 1385.91, 2200.0},
      {741.66, 2354.63, 1571.52, 3143.05, 3960.0, 2354.63, 1571.52, 3143.05},
  }};
  bank.amp = {0.06, 0.08, 0.1, 0.12, 0.14, 0.16, 0.18, 0.2};
  bank.dur = {0.5, 0.75, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0};
  bank.silence = {0.1, 0.2, 0.3, 0.5, 0.75, 1.0, 1.5, 2.0};
  bank.vibrato_rate = {4.0, 4.5, 5.0, 5.5, 6.0, 6.5, 7.0, 8.0};
  bank.vibrato_depth = 0.01;
  bank.envelope = Envelope{};
  return bank;
}

ParameterBank ParameterBank::load(const std::string& path) {
  const config::KeyValueFile kv = config::KeyValueFile::load(path);
  ParameterBank bank = defaults();

  for (int k = 0; k < 8; ++k) {
    const std::string key = "freq" + std::to_string(k + 1);
    if (kv.has(key)) {
      const auto vals = kv.numbers(key, 8);
      for (int i = 0; i < 8; ++i) bank.freq[k][i] = vals[i];
    }
  }
  const auto load8 = [&](const char* key, std::array<double, 8>& dst) {
    if (kv.has(key)) {
      const auto vals = kv.numbers(key, 8);
      for (int i = 0; i < 8; ++i) dst[i] = vals[i];
    }
  };
  load8("amp", bank.amp);
  load8("dur", bank.dur);
  load8("silence", bank.silence);
  load8("vibrato_rate", bank.vibrato_rate);
  if (kv.has("vibrato_depth")) bank.vibrato_depth = kv.number("vibrato_depth");
  if (kv.has("adsr")) {
    const auto vals = kv.numbers("adsr", 4);
    bank.envelope = Envelope{vals[0], vals[1], vals[2], vals[3]};
  }

  try {
    bank.validate();
  } catch (const std::invalid_argument& e) {
    throw config::ParseError(path, 0, e.what());
  }
  return bank;
}

void ParameterBank::validate() const {
  for (int k = 0; k < 8; ++k) {
    for (int i = 0; i < 8; ++i) {
      check_freq(freq[k][i], "freq" + std::to_string(k + 1) + "[" + std::to_string(i) + "]");
    }
  }
  for (int i = 0; i < 8; ++i) {
    check_unit(amp[i], "amp[" + std::to_string(i) + "]");
    check_positive(dur[i], "dur[" + std::to_string(i) + "]");
    check_positive(silence[i], "silence[" + std::to_string(i) + "]");
    check_positive(vibrato_rate[i], "vibrato_rate[" + std::to_string(i) + "]");
  }
  check_unit(vibrato_depth, "vibrato_depth");
  check_unit(envelope.attack, "adsr.attack");
  check_unit(envelope.decay, "adsr.decay");
  check_unit(envelope.sustain, "adsr.sustain");
  check_unit(envelope.release, "adsr.release");
  if (envelope.attack + envelope.decay + envelope.release > 1.0) {
    throw std::invalid_argument("adsr: attack + decay + release exceeds 1");
  }
}

qc::MeasurementRecord roll_hyperdie(Rng& rng) {
  qc::StateVector state(9);
  state.apply_hadamard_all();
  return state.measure_all(rng);
}

int decode_triplet(const qc::MeasurementRecord& record, const TripletCode& code) {
  if (record.size() != 9) {
    throw std::invalid_argument("hyper-die records have 9 bits");
  }
  int value = 0;
  for (int position : code.positions) {
    if (position < 0 || position > 8) {
      throw std::out_of_range("triplet position outside 0..8");
    }
    value = (value << 1) | record.c(static_cast<std::size_t>(position));
  }
  return value;
}

const std::array<TripletCode, 16>& frequency_codes() {
  static const std::array<TripletCode, 16> codes{{
      {{8, 7, 6}}, {{6, 7, 8}},  // osc 1
      {{5, 4, 3}}, {{3, 4, 5}},  // osc 2
      {{2, 1, 0}}, {{0, 1, 2}},  // osc 3
      {{7, 6, 5}}, {{5, 6, 7}},  // osc 4
      {{4, 3, 2}}, {{2, 3, 4}},  // osc 5
      {{8, 5, 2}}, {{2, 5, 8}},  // osc 6
      {{7, 4, 3}}, {{3, 4, 7}},  // osc 7
      {{6, 3, 0}}, {{0, 3, 6}},  // osc 8
  }};
  return codes;
}

const std::array<TripletCode, 16>& amplitude_codes() {
  // Same position patterns as the frequency codes, read from the D record.
  return frequency_codes();
}

TripletCode duration_code() { return TripletCode{{8, 4, 0}}; }
TripletCode silence_code() { return TripletCode{{6, 4, 2}}; }
TripletCode vibrato_rate_code() { return TripletCode{{5, 4, 3}}; }

SynthPatch build_patch(const qc::MeasurementRecord& c_record,
                       const qc::MeasurementRecord& d_record,
                       const ParameterBank& bank) {
  bank.validate();
  const auto& fcodes = frequency_codes();
  const auto& acodes = amplitude_codes();

  SynthPatch patch;
  for (int k = 0; k < 8; ++k) {
    OscillatorParams& osc = patch.oscillators[static_cast<std::size_t>(k)];
    osc.freq_start = bank.freq[k][decode_triplet(c_record, fcodes[2 * k])];
    osc.freq_end = bank.freq[k][decode_triplet(c_record, fcodes[2 * k + 1])];
    osc.amp_start = bank.amp[decode_triplet(d_record, acodes[2 * k])];
    osc.amp_end = bank.amp[decode_triplet(d_record, acodes[2 * k + 1])];
  }
  patch.duration = bank.dur[decode_triplet(d_record, duration_code())];
  patch.silence_after = bank.silence[decode_triplet(d_record, silence_code())];
  patch.vibrato_rate = bank.vibrato_rate[decode_triplet(d_record, vibrato_rate_code())];
  patch.vibrato_depth = bank.vibrato_depth;
  patch.envelope = bank.envelope;
  return patch;
}

}  // namespace qmuse::die
