#pragma once

#include <array>
#include <cstddef>
#include <string>

#include "qmuse/qcsim.hpp"
#include "qmuse/rng.hpp"

namespace qmuse::die {

// Three bit subscripts into a 9-bit record; the first listed position is
// the most significant bit of the decoded value.
struct TripletCode {
  std::array<int, 3> positions;

  bool operator==(const TripletCode&) const = default;
};

struct Envelope {
  double attack = 0.1;    // fraction of duration
  double decay = 0.1;     // fraction of duration
  double sustain = 0.8;   // level, 0..1
  double release = 0.2;   // fraction of duration
};

// Lookup tables the hyper-die indexes into. All values are validated on
// construction/load: frequencies 50..8000 Hz, amplitudes 0..1, durations
// and silences strictly positive.
struct ParameterBank {
  std::array<std::array<double, 8>, 8> freq;  // freq[k] serves oscillator k+1
  std::array<double, 8> amp;                  // shared by all oscillators
  std::array<double, 8> dur;                  // seconds
  std::array<double, 8> silence;              // seconds
  std::array<double, 8> vibrato_rate;         // Hz
  double vibrato_depth = 0.01;                // fraction of carrier frequency
  Envelope envelope;

  static ParameterBank defaults();
  static ParameterBank load(const std::string& path);

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct OscillatorParams {
  double freq_start = 0.0;
  double freq_end = 0.0;
  double amp_start = 0.0;
  double amp_end = 0.0;
};

// Everything the synth needs to render one sound.
struct SynthPatch {
  std::array<OscillatorParams, 8> oscillators;
  double duration = 0.0;       // seconds
  double silence_after = 0.0;  // seconds
  double vibrato_rate = 0.0;   // Hz
  double vibrato_depth = 0.0;
  Envelope envelope;
};

// Measure H^(x)9 |0...0>; returns [c8 ... c0].
qc::MeasurementRecord roll_hyperdie(Rng& rng);

// 4*b2 + 2*b1 + b0 for the bits at the code's positions in listed order.
int decode_triplet(const qc::MeasurementRecord& record, const TripletCode& code);

// The fixed code pairs in oscillator order: osc1 start, osc1 end, ...,
// osc8 end. Amplitude codes use the same position patterns on the D record.
const std::array<TripletCode, 16>& frequency_codes();
const std::array<TripletCode, 16>& amplitude_codes();

// Auxiliary codes resolved on the D record.
TripletCode duration_code();       // (d8 d4 d0)
TripletCode silence_code();        // (d6 d4 d2)
TripletCode vibrato_rate_code();   // (d5 d4 d3)

// Resolve a full patch from one C record (frequencies) and one D record
// (amplitudes, duration, silence, vibrato).
SynthPatch build_patch(const qc::MeasurementRecord& c_record,
                       const qc::MeasurementRecord& d_record,
                       const ParameterBank& bank);

}  // namespace qmuse::die
