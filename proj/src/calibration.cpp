#include "headmotion/calibration.hpp"

#include <algorithm>

#include "headmotion/error.hpp"
#include "headmotion/metrics.hpp"

namespace hm {

namespace {

constexpr double kSigmaLadder = 1.25;
constexpr double kSigmaResolution = 1e-3;

}  // namespace

Calibration calibrate_linear(LinearKind kind, const Trajectory& reference, const Trajectory& noisy) {
  Calibration out;
  out.target_ratio = hf_ratio(reference);
  out.noisy_ratio = hf_ratio(noisy);
  const double bound = out.target_ratio + kCalibrationTolerance;

  auto ratio_for = [&](const LinearFilterSpec& spec) { return hf_ratio(apply_linear(noisy, spec)); };
  auto finish = [&](LinearFilterSpec spec) {
    out.spec = spec;
    out.achieved_ratio = ratio_for(spec);
    return out;
  };

  if (kind == LinearKind::moving_average) {
    for (int w = 1; w <= kMaxWidth; w += 2) {
      const auto spec = LinearFilterSpec::moving_average(w);
      const double r = ratio_for(spec);
      if (r <= bound) {
        out.spec = spec;
        out.achieved_ratio = r;
        return out;
      }
    }
    throw CalibrationError("target ratio unreachable");
  }

  if (out.noisy_ratio <= bound) return finish(LinearFilterSpec::gaussian(kMinSigma));

  double lo = 0.0;  // 0 stands for the unfiltered input, already known to fail
  double hi = kMinSigma;
  while (ratio_for(LinearFilterSpec::gaussian(hi)) > bound) {
    if (hi >= kMaxSigma) throw CalibrationError("target ratio unreachable");
    lo = hi;
    hi = std::min(hi * kSigmaLadder, kMaxSigma);
  }
  while (hi - lo > kSigmaResolution) {
    const double mid = 0.5 * (lo + hi);
    if (ratio_for(LinearFilterSpec::gaussian(mid)) <= bound) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return finish(LinearFilterSpec::gaussian(hi));
}

}  // namespace hm
