#include "headmotion/spectrum.hpp"

#include <complex>

#include <unsupported/Eigen/FFT>

namespace hm {

namespace {

std::vector<std::complex<double>> half_spectrum(std::vector<double> x, std::size_t nfft) {
  x.resize(nfft, 0.0);
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<std::complex<double>> out;
  fft.fwd(out, x);
  out.resize(nfft / 2 + 1);
  return out;
}

}  // namespace

std::vector<double> power_spectrum(const std::vector<double>& x) {
  if (x.empty()) return {};
  const auto spec = half_spectrum(x, x.size());
  std::vector<double> p(spec.size());
  for (std::size_t k = 0; k < spec.size(); ++k) p[k] = std::norm(spec[k]);
  return p;
}

std::vector<double> magnitude_spectrum(const std::vector<double>& x, std::size_t nfft) {
  if (x.empty() || nfft == 0) return {};
  const auto spec = half_spectrum(x, std::max(nfft, x.size()));
  std::vector<double> m(spec.size());
  for (std::size_t k = 0; k < spec.size(); ++k) m[k] = std::abs(spec[k]);
  return m;
}

}  // namespace hm
