#include "qmuse/synth.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qmuse::synth {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_patch(const die::SynthPatch& patch, double sample_rate) {
  if (sample_rate < 8000.0) {
    throw std::invalid_argument("sample rate must be at least 8000 Hz");
  }
  if (!(patch.duration > 0.0)) {
    throw std::invalid_argument("patch duration must be strictly positive");
  }
  if (patch.silence_after < 0.0) {
    throw std::invalid_argument("silence_after must be non-negative");
  }
  for (const die::OscillatorParams& osc : patch.oscillators) {
    const bool silent = osc.amp_start == 0.0 && osc.amp_end == 0.0;
    for (double hz : {osc.freq_start, osc.freq_end}) {
      if (!silent && !(hz >= 50.0 && hz <= 8000.0)) {
        throw std::invalid_argument("oscillator frequency outside 50..8000 Hz");
      }
    }
    for (double a : {osc.amp_start, osc.amp_end}) {
      if (!(a >= 0.0 && a <= 1.0)) {
        throw std::invalid_argument("oscillator amplitude outside 0..1");
      }
    }
  }
  const die::Envelope& env = patch.envelope;
  for (double v : {env.attack, env.decay, env.sustain, env.release}) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument("envelope values must lie in 0..1");
    }
  }
  if (env.attack + env.decay + env.release > 1.0) {
    throw std::invalid_argument("envelope attack + decay + release exceeds 1");
  }
}

// Piecewise-linear ADSR; segment lengths are fractions of the duration.
double envelope_at(const die::Envelope& env, double t, double duration) {
  const double a_end = env.attack * duration;
  const double d_end = a_end + env.decay * duration;
  const double r_start = duration * (1.0 - env.release);
  if (t < a_end) return env.attack > 0.0 ? t / a_end : 1.0;
  if (t < d_end) {
    return 1.0 + (env.sustain - 1.0) * (t - a_end) / (d_end - a_end);
  }
  if (t < r_start) return env.sustain;
  if (env.release > 0.0 && t < duration) {
    return env.sustain * (duration - t) / (duration - r_start);
  }
  return env.release > 0.0 ? 0.0 : env.sustain;
}

}  // namespace

SampleBuffer render(const die::SynthPatch& patch, double sample_rate) {
  check_patch(patch, sample_rate);

  const double duration = patch.duration;
  const auto n_samples = static_cast<std::size_t>(std::llround(duration * sample_rate));
  const double dt = 1.0 / sample_rate;

  SampleBuffer buffer;
  buffer.sample_rate = sample_rate;
  buffer.samples.assign(n_samples, 0.0);

  std::array<double, 8> phase{};  // all oscillators start in phase
  double peak = 0.0;
  for (std::size_t n = 0; n < n_samples; ++n) {
    const double t = static_cast<double>(n) * dt;
    const double progress = t / duration;
    const double vibrato =
        1.0 + patch.vibrato_depth * std::sin(kTwoPi * patch.vibrato_rate * t);

    double sum = 0.0;
    for (std::size_t k = 0; k < patch.oscillators.size(); ++k) {
      const die::OscillatorParams& osc = patch.oscillators[k];
      const double amp = osc.amp_start + (osc.amp_end - osc.amp_start) * progress;
      sum += amp * std::sin(phase[k]);
      const double freq = osc.freq_start + (osc.freq_end - osc.freq_start) * progress;
      phase[k] += kTwoPi * freq * vibrato * dt;
    }

    const double sample = envelope_at(patch.envelope, t, duration) * sum;
    buffer.samples[n] = sample;
    peak = std::max(peak, std::abs(sample));
  }

  if (peak > 1.0) {
    throw std::domain_error("rendered peak " + std::to_string(peak) +
                            " exceeds 1.0; lower the patch amplitudes");
  }
  return buffer;
}

SampleBuffer render_sequence(const std::vector<die::SynthPatch>& patches,
                             double sample_rate) {
  if (patches.empty()) {
    throw std::invalid_argument("render_sequence needs at least one patch");
  }
  SampleBuffer out;
  out.sample_rate = sample_rate;
  for (const die::SynthPatch& patch : patches) {
    const SampleBuffer rendered = render(patch, sample_rate);
    out.samples.insert(out.samples.end(), rendered.samples.begin(),
                       rendered.samples.end());
    const auto gap =
        static_cast<std::size_t>(std::llround(patch.silence_after * sample_rate));
    out.samples.insert(out.samples.end(), gap, 0.0);
  }
  return out;
}

}  // namespace qmuse::synth
