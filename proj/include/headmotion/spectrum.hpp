#pragma once

#include <cstddef>
#include <vector>

namespace hm {

/// |X_k|^2 for k = 0 .. n/2 of the length-n DFT of `x` (no windowing, no
/// mean removal, no scaling).
std::vector<double> power_spectrum(const std::vector<double>& x);

/// |X_k| for k = 0 .. nfft/2 of `x` zero-padded to `nfft` samples.
std::vector<double> magnitude_spectrum(const std::vector<double>& x, std::size_t nfft);

/// Frequency in Hz of bin k for an `n`-point transform at `sample_rate`.
inline double bin_frequency(std::size_t k, std::size_t n, double sample_rate) {
  return static_cast<double>(k) * sample_rate / static_cast<double>(n);
}

}  // namespace hm
