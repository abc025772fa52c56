#pragma once

// Independent numerical oracles used to verify library output. These are
// deliberately written from first principles (textbook radix-2 FFT, direct
// tensor products, direct statistics) so they share no code with the
// implementations under test.

#include <complex>
#include <cstddef>
#include <vector>

namespace oracle {

// In-place radix-2 Cooley-Tukey; size must be a power of two.
void fft(std::vector<std::complex<double>>& data);

// Frequency (Hz) of the strongest positive-frequency bin of a Hann-windowed
// FFT over the first `window` samples (power of two).
double fft_peak_hz(const std::vector<double>& samples, double sample_rate,
                   std::size_t window);

// Power-weighted spectral centroid (Hz) of a Hann-windowed slice centered
// at `center`; bins below `floor_ratio` of the peak power are ignored so
// leakage far from the tone cannot bias the estimate.
double stft_centroid_hz(const std::vector<double>& samples, double sample_rate,
                        std::size_t center, std::size_t window,
                        double floor_ratio = 0.01);

// Tensor (Kronecker) product of per-qubit 2-vectors, first factor most
// significant; independent check for multi-qubit state preparation.
std::vector<std::complex<double>> kron_state(
    const std::vector<std::vector<std::complex<double>>>& factors);

// Pearson chi-square statistic against a uniform expectation.
double chi_square_uniform(const std::vector<std::size_t>& counts, double expected);

// Number of contiguous regions whose windowed RMS exceeds `threshold`.
std::size_t count_rms_segments(const std::vector<double>& samples,
                               std::size_t window, double threshold);

}  // namespace oracle
