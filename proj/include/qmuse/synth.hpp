#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qmuse/hyperdie.hpp"

namespace qmuse::synth {

struct SampleBuffer {
  double sample_rate = 44100.0;
  std::vector<double> samples;  // each within -1..1

  std::size_t size() const { return samples.size(); }
};

// Additive render of one patch: 8 phase-accumulating sine oscillators with
// linear frequency/amplitude ramps, multiplicative vibrato FM, piecewise-
// linear ADSR over fractions of the duration. A rendered peak above 1.0 is
// an error; no implicit normalization.
SampleBuffer render(const die::SynthPatch& patch, double sample_rate = 44100.0);

// Each patch's render followed by silence_after seconds of zeros.
SampleBuffer render_sequence(const std::vector<die::SynthPatch>& patches,
                             double sample_rate = 44100.0);

// Canonical RIFF/WAVE PCM 16-bit mono little-endian.
void write_wav(const SampleBuffer& buffer, const std::string& path);

// Reads files written by write_wav (PCM16 mono); used for round-trips.
SampleBuffer read_wav(const std::string& path);

}  // namespace qmuse::synth
