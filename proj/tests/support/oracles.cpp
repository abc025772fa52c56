#include "oracles.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace oracle {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<std::complex<double>> windowed_slice(const std::vector<double>& samples,
                                                 std::size_t start, std::size_t window) {
  std::vector<std::complex<double>> data(window);
  for (std::size_t i = 0; i < window; ++i) {
    const double hann = 0.5 - 0.5 * std::cos(2.0 * kPi * i / (window - 1));
    data[i] = samples.at(start + i) * hann;
  }
  return data;
}

}  // namespace

void fft(std::vector<std::complex<double>>& data) {
  const std::size_t n = data.size();
  if (n == 0 || (n & (n - 1)) != 0) {
    throw std::invalid_argument("fft size must be a power of two");
  }
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double angle = -2.0 * kPi / static_cast<double>(len);
    const std::complex<double> w_len(std::cos(angle), std::sin(angle));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = data[i + k];
        const std::complex<double> v = data[i + k + len / 2] * w;
        data[i + k] = u + v;
        data[i + k + len / 2] = u - v;
        w *= w_len;
      }
    }
  }
}

double fft_peak_hz(const std::vector<double>& samples, double sample_rate,
                   std::size_t window) {
  auto data = windowed_slice(samples, 0, window);
  fft(data);
  std::size_t peak = 1;
  double peak_mag = 0.0;
  for (std::size_t k = 1; k < window / 2; ++k) {
    const double mag = std::abs(data[k]);
    if (mag > peak_mag) {
      peak_mag = mag;
      peak = k;
    }
  }
  return static_cast<double>(peak) * sample_rate / static_cast<double>(window);
}

double stft_centroid_hz(const std::vector<double>& samples, double sample_rate,
                        std::size_t center, std::size_t window, double floor_ratio) {
  if (center < window / 2) throw std::invalid_argument("slice would underflow");
  auto data = windowed_slice(samples, center - window / 2, window);
  fft(data);

  double peak_power = 0.0;
  for (std::size_t k = 1; k < window / 2; ++k) {
    peak_power = std::max(peak_power, std::norm(data[k]));
  }
  const double floor = peak_power * floor_ratio;
  double weighted = 0.0;
  double total = 0.0;
  for (std::size_t k = 1; k < window / 2; ++k) {
    const double power = std::norm(data[k]);
    if (power < floor) continue;
    const double hz = static_cast<double>(k) * sample_rate / static_cast<double>(window);
    weighted += hz * power;
    total += power;
  }
  if (total == 0.0) throw std::runtime_error("silent slice");
  return weighted / total;
}

std::vector<std::complex<double>> kron_state(
    const std::vector<std::vector<std::complex<double>>>& factors) {
  std::vector<std::complex<double>> state{1.0};
  for (const auto& factor : factors) {
    std::vector<std::complex<double>> next;
    next.reserve(state.size() * factor.size());
    for (const auto& a : state) {
      for (const auto& b : factor) next.push_back(a * b);
    }
    state = std::move(next);
  }
  return state;
}

double chi_square_uniform(const std::vector<std::size_t>& counts, double expected) {
  double stat = 0.0;
  for (std::size_t c : counts) {
    const double diff = static_cast<double>(c) - expected;
    stat += diff * diff / expected;
  }
  return stat;
}

std::size_t count_rms_segments(const std::vector<double>& samples, std::size_t window,
                               double threshold) {
  std::size_t segments = 0;
  bool inside = false;
  for (std::size_t start = 0; start + window <= samples.size(); start += window) {
    double energy = 0.0;
    for (std::size_t i = start; i < start + window; ++i) energy += samples[i] * samples[i];
    const double rms = std::sqrt(energy / static_cast<double>(window));
    if (rms > threshold) {
      if (!inside) ++segments;
      inside = true;
    } else {
      inside = false;
    }
  }
  return segments;
}

}  // namespace oracle
