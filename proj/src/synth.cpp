#include "headmotion/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "headmotion/error.hpp"
#include "headmotion/random.hpp"

namespace hm {

Trajectory synth_trajectory(std::uint64_t seed, const SynthConfig& cfg) {
  if (!(cfg.duration_s >= 1.0)) throw DataError("duration must be at least 1 s");
  if (!(cfg.sample_rate > 0.0)) throw DataError("sample rate must be positive");

  const auto n = static_cast<std::size_t>(std::llround(cfg.duration_s * cfg.sample_rate));
  constexpr double two_pi = 2.0 * std::numbers::pi;
  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  std::vector<Frame> frames(n, Frame{0.0, 0.0, 0.0});

  for (int c = 0; c < kChannels; ++c) {
    const int count = std::uniform_int_distribution<int>(cfg.min_sinusoids, cfg.max_sinusoids)(rng);
    for (int k = 0; k < count; ++k) {
      const double freq = uniform(cfg.min_freq_hz, cfg.max_freq_hz);
      const double phase = uniform(0.0, two_pi);
      const double amp = uniform(0.2, 1.0);
      for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / cfg.sample_rate;
        frames[i][c] += amp * std::sin(two_pi * freq * t + phase);
      }
    }
  }

  // Nod events: Gaussian-windowed oscillation bursts, mostly on one channel
  // with a weaker coupled copy on the other two.
  if (cfg.nod_rate_hz > 0.0) {
    const int events = std::poisson_distribution<int>(cfg.nod_rate_hz * cfg.duration_s)(rng);
    for (int e = 0; e < events; ++e) {
      const double centre = uniform(0.0, cfg.duration_s);
      const double freq = uniform(cfg.nod_min_freq_hz, cfg.nod_max_freq_hz);
      const double width = uniform(0.15, 0.3);
      const double amp = uniform(0.5, 1.5);
      const int primary = std::uniform_int_distribution<int>(0, kChannels - 1)(rng);
      Frame gain{};
      for (int c = 0; c < kChannels; ++c) {
        gain[c] = c == primary ? 1.0 : uniform(-cfg.nod_coupling, cfg.nod_coupling);
      }
      const double reach = 4.0 * width;
      const auto lo = static_cast<long>(std::floor((centre - reach) * cfg.sample_rate));
      const auto hi = static_cast<long>(std::ceil((centre + reach) * cfg.sample_rate));
      for (long i = std::max(0L, lo); i <= std::min(static_cast<long>(n) - 1, hi); ++i) {
        const double dt = static_cast<double>(i) / cfg.sample_rate - centre;
        const double burst =
            amp * std::exp(-0.5 * dt * dt / (width * width)) * std::sin(two_pi * freq * dt);
        for (int c = 0; c < kChannels; ++c) frames[i][c] += gain[c] * burst;
      }
    }
  }

  for (int c = 0; c < kChannels; ++c) {
    double mean = 0.0;
    for (const auto& f : frames) mean += f[c];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (const auto& f : frames) var += (f[c] - mean) * (f[c] - mean);
    var /= static_cast<double>(n);
    const double scale = var > 0.0 ? 1.0 / std::sqrt(var) : 1.0;
    for (auto& f : frames) f[c] = (f[c] - mean) * scale;
  }

  std::vector<bool> speaking(n, false);
  bool state = unit(rng) < 0.5;
  std::size_t i = 0;
  while (i < n) {
    const auto len = static_cast<std::size_t>(
        std::llround(uniform(cfg.min_segment_s, cfg.max_segment_s) * cfg.sample_rate));
    for (std::size_t j = i; j < std::min(n, i + len); ++j) speaking[j] = state;
    i += std::max<std::size_t>(len, 1);
    state = !state;
  }

  return Trajectory(std::move(frames), cfg.sample_rate, std::move(speaking));
}

Trajectory synth_trajectory(std::uint64_t seed, double duration_s, double sample_rate) {
  SynthConfig cfg;
  cfg.duration_s = duration_s;
  cfg.sample_rate = sample_rate;
  return synth_trajectory(seed, cfg);
}

}  // namespace hm
