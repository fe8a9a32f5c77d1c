#pragma once

#include "headmotion/linear_filter.hpp"
#include "headmotion/trajectory.hpp"

namespace hm {

inline constexpr double kCalibrationTolerance = 1e-3;
inline constexpr double kMinSigma = 0.01;
inline constexpr double kMaxSigma = 200.0;
inline constexpr int kMaxWidth = 501;

struct Calibration {
  LinearFilterSpec spec;
  double target_ratio = 0.0;    // hf_ratio of the reference
  double achieved_ratio = 0.0;  // hf_ratio of the noisy input under `spec`
  double noisy_ratio = 0.0;     // hf_ratio of the unfiltered noisy input
};

/// Weakest linear filter of `kind` whose output's high-frequency ratio is
/// within kCalibrationTolerance above the reference's.
///
/// Widths are scanned over odd integers from 1. For sigma the search climbs
/// a geometric ladder from kMinSigma to the first satisfying value and then
/// bisects down to 1e-3 between it and the last failing rung; the ratio is
/// only monotone for moderate sigma, so a bisection over the whole range
/// could land on a far, larger crossing. Throws CalibrationError
/// ("target ratio unreachable") when no parameter within bounds satisfies
/// the condition.
Calibration calibrate_linear(LinearKind kind, const Trajectory& reference, const Trajectory& noisy);

}  // namespace hm
