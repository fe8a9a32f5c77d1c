#pragma once

#include <cstdint>

#include "headmotion/trajectory.hpp"

namespace hm {

/// Knobs for the synthetic head-motion generator. Defaults give slow
/// sinusoidal drift with occasional nod/shake bursts.
struct SynthConfig {
  double duration_s = 60.0;
  double sample_rate = kDefaultSampleRate;
  int min_sinusoids = 3;
  int max_sinusoids = 6;
  double min_freq_hz = 0.2;
  double max_freq_hz = 2.0;
  double nod_rate_hz = 0.3;  // mean Poisson event rate; 0 disables nods
  double nod_min_freq_hz = 2.0;
  double nod_max_freq_hz = 4.0;
  double nod_coupling = 0.3;  // max relative amplitude leaking into the other channels
  double min_segment_s = 2.0;  // speaking / listening segment lengths
  double max_segment_s = 8.0;
};

/// Deterministic in `seed`. Each channel is centred and scaled to unit
/// variance; a speaking mask alternating 2-8 s segments is attached.
Trajectory synth_trajectory(std::uint64_t seed, const SynthConfig& config);
Trajectory synth_trajectory(std::uint64_t seed, double duration_s,
                            double sample_rate = kDefaultSampleRate);

}  // namespace hm
