#pragma once

#include <functional>
#include <string>
#include <vector>

#include "headmotion/trajectory.hpp"

namespace hm {

enum class LinearKind { gaussian, moving_average };

/// Baseline smoother. `param` is sigma in frames for the Gaussian and the
/// (odd, >= 1) window width in frames for the moving average.
struct LinearFilterSpec {
  LinearKind kind = LinearKind::gaussian;
  double param = 1.0;

  static LinearFilterSpec gaussian(double sigma);
  static LinearFilterSpec moving_average(int width);

  /// Parses "gaussian:8", "mva:35" (also "moving_average:35").
  static LinearFilterSpec parse(const std::string& text);
  std::string to_string() const;

  void validate() const;
  bool operator==(const LinearFilterSpec&) const = default;
};

std::string kind_name(LinearKind kind);

/// Normalized convolution taps, centre at index size()/2. Gaussian taps are
/// truncated at +-ceil(4 sigma) and renormalized to unit sum.
std::vector<double> filter_kernel(const LinearFilterSpec& spec);

/// Odd-length centred convolution of one series with half-sample symmetric
/// reflection at both edges ("abc|cba"); kernels longer than the series
/// keep mirroring.
std::vector<double> convolve_reflect(const std::vector<double>& signal,
                                     const std::vector<double>& kernel);

/// Each channel convolved independently; length, rate and mask preserved.
Trajectory apply_linear(const Trajectory& traj, const LinearFilterSpec& spec);

using TrajectoryFilter = std::function<Trajectory(const Trajectory&)>;

TrajectoryFilter make_linear_filter(const LinearFilterSpec& spec);

/// Response of `filter` to a single spike of `amplitude` at the midpoint of
/// `channel` in an otherwise zero trajectory. The filter's output for the
/// all-zero trajectory is subtracted, so a filter with a nonzero resting
/// output (a network with biases) reports only what the spike caused.
Trajectory impulse_probe(const TrajectoryFilter& filter, int channel, int length,
                         double amplitude = 1.0, double sample_rate = kDefaultSampleRate);

}  // namespace hm
