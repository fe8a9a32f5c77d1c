#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "headmotion/trajectory.hpp"

namespace hm {

enum class Region { full, speaking_only };

std::string region_name(Region r);
/// Accepts "full", "speaking" and "speaking_only".
Region parse_region(const std::string& name);

/// Frame indices selected by `region`. The ground truth's mask is used when
/// present, otherwise the prediction's; speaking_only without any mask is an
/// error.
std::vector<std::size_t> region_frames(const Trajectory& pred, const Trajectory& gt, Region region);

/// Mean over selected frames and channels of squared error divided by the
/// ground-truth variance of that channel over the same frames.
double normalized_mse(const Trajectory& pred, const Trajectory& gt, Region region = Region::full);

/// First canonical correlation between the columns of `a` and `b` (rows are
/// observations). Each block's covariance is whitened with its eigenvalues
/// floored at kCcaEigenFloor times the largest, so well-conditioned blocks
/// get the exact, affine-invariant value and rank-deficient blocks stay
/// finite. A constant block correlates with nothing and yields 0.
double canonical_correlation(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);
inline constexpr double kCcaEigenFloor = 1e-6;

/// Mean first canonical correlation over 50-frame windows advancing by 25
/// frames whose frames all lie in the region, clamped to [0, 1].
double local_cca(const Trajectory& pred, const Trajectory& gt, int window = kWindowFrames,
                 int hop = kWindowHop, Region region = Region::full);

/// Spectral arc length of the speed profile |diff(signal)| * sample_rate.
/// The magnitude spectrum is zero-padded to 2^(ceil(log2 n) + 4) points and
/// normalized by its 0 Hz value; the arc runs from 0 Hz to the last frequency
/// at or below `cutoff_hz` whose normalized magnitude reaches
/// `amp_threshold`. Returns a negative number (closer to 0 = smoother).
/// Throws NoMovement for a constant signal.
double sparc(const std::vector<double>& signal, double sample_rate, double cutoff_hz = 10.0,
             double amp_threshold = 0.05);

/// Per-channel |SPARC| averaged over the contiguous runs of region frames
/// (runs shorter than 10 frames, or motionless ones, are skipped).
Frame region_sparc_abs(const Trajectory& traj, Region region);

enum class KlMode {
  joint_yz,     // 2-D histogram over the (Y, Z) channels
  per_channel,  // mean of 1-D divergences over the three channels
};

inline constexpr double kKlSmoothing = 1e-6;

/// KL(P||Q) + KL(Q||P) between histograms of pred and gt with shared bin
/// edges spanning the pooled range, each bin smoothed by kKlSmoothing and
/// renormalized.
double sym_kl(const Trajectory& pred, const Trajectory& gt, int bins = 50,
              Region region = Region::full, KlMode mode = KlMode::joint_yz);

/// Fraction of mean-removed periodogram power above `cutoff_hz`, averaged
/// over channels that carry any power.
double hf_ratio(const Trajectory& traj, double cutoff_hz = 5.0);

struct EvalReport {
  double normalized_mse = 0.0;
  double local_cca = 0.0;
  Frame sparc_abs{0.0, 0.0, 0.0};
  double sparc_abs_mean = 0.0;
  double sym_kl = 0.0;
  double hf_ratio = 0.0;
  Region region = Region::full;
};

EvalReport evaluate(const Trajectory& pred, const Trajectory& gt, Region region);

}  // namespace hm
