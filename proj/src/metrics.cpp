#include "headmotion/metrics.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "headmotion/error.hpp"
#include "headmotion/spectrum.hpp"

namespace hm {

std::string region_name(Region r) { return r == Region::full ? "full" : "speaking_only"; }

Region parse_region(const std::string& name) {
  if (name == "full") return Region::full;
  if (name == "speaking" || name == "speaking_only") return Region::speaking_only;
  throw DataError("unknown region '" + name + "'");
}

namespace {

void check_pair(const Trajectory& pred, const Trajectory& gt) {
  if (pred.size() != gt.size()) {
    throw DataError("length mismatch: prediction has " + std::to_string(pred.size()) +
                    " frames, ground truth has " + std::to_string(gt.size()));
  }
}

const std::vector<bool>* pick_mask(const Trajectory& pred, const Trajectory& gt) {
  if (gt.has_mask()) return &*gt.speaking();
  if (pred.has_mask()) return &*pred.speaking();
  return nullptr;
}

std::vector<bool> region_flags(const Trajectory& pred, const Trajectory& gt, Region region) {
  if (region == Region::full) return std::vector<bool>(gt.size(), true);
  const auto* mask = pick_mask(pred, gt);
  if (mask == nullptr) throw DataError("speaking region requested but no speaking mask present");
  return *mask;
}

}  // namespace

std::vector<std::size_t> region_frames(const Trajectory& pred, const Trajectory& gt, Region region) {
  check_pair(pred, gt);
  const auto flags = region_flags(pred, gt, region);
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < flags.size(); ++i)
    if (flags[i]) idx.push_back(i);
  return idx;
}

double normalized_mse(const Trajectory& pred, const Trajectory& gt, Region region) {
  const auto idx = region_frames(pred, gt, region);
  if (idx.empty()) throw DataError("region is empty");
  const auto n = static_cast<double>(idx.size());
  double total = 0.0;
  for (int c = 0; c < kChannels; ++c) {
    double mean = 0.0;
    for (auto i : idx) mean += gt[i][c];
    mean /= n;
    double var = 0.0;
    double err = 0.0;
    for (auto i : idx) {
      var += (gt[i][c] - mean) * (gt[i][c] - mean);
      err += (pred[i][c] - gt[i][c]) * (pred[i][c] - gt[i][c]);
    }
    var /= n;
    if (!(var > 0.0)) throw DataError("ground truth has zero variance on channel " + std::to_string(c));
    total += err / n / var;
  }
  return total / kChannels;
}

namespace {

// Whitening transform of a centred block, or nullopt for a constant block.
std::optional<Eigen::MatrixXd> whitener(const Eigen::MatrixXd& centred) {
  const Eigen::MatrixXd cov = centred.transpose() * centred / static_cast<double>(centred.rows() - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  const Eigen::VectorXd lambda = eig.eigenvalues();
  const double top = lambda.maxCoeff();
  if (!(top > 0.0)) return std::nullopt;
  const Eigen::VectorXd inv_sqrt =
      lambda.cwiseMax(kCcaEigenFloor * top).cwiseSqrt().cwiseInverse();
  return eig.eigenvectors() * inv_sqrt.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace

double canonical_correlation(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.rows() < 2) throw DataError("CCA blocks need matching rows >= 2");
  const Eigen::MatrixXd ac = a.rowwise() - a.colwise().mean();
  const Eigen::MatrixXd bc = b.rowwise() - b.colwise().mean();
  const auto wa = whitener(ac);
  const auto wb = whitener(bc);
  if (!wa || !wb) return 0.0;
  const Eigen::MatrixXd cab = ac.transpose() * bc / static_cast<double>(a.rows() - 1);
  const Eigen::MatrixXd k = (*wa) * cab * (*wb);
  return Eigen::JacobiSVD<Eigen::MatrixXd>(k).singularValues()(0);
}

double local_cca(const Trajectory& pred, const Trajectory& gt, int window, int hop, Region region) {
  check_pair(pred, gt);
  if (window < 2 || hop < 1) throw DataError("invalid CCA window geometry");
  const auto flags = region_flags(pred, gt, region);
  if (gt.size() < static_cast<std::size_t>(window)) throw DataError("trajectory too short");

  double sum = 0.0;
  int count = 0;
  Eigen::MatrixXd a(window, kChannels);
  Eigen::MatrixXd b(window, kChannels);
  for (std::size_t s = 0; s + window <= gt.size(); s += hop) {
    bool inside = true;
    for (int i = 0; i < window && inside; ++i) inside = flags[s + i];
    if (!inside) continue;
    for (int i = 0; i < window; ++i)
      for (int c = 0; c < kChannels; ++c) {
        a(i, c) = pred[s + i][c];
        b(i, c) = gt[s + i][c];
      }
    sum += canonical_correlation(a, b);
    ++count;
  }
  if (count == 0) throw DataError("no eligible windows for local CCA");
  return std::clamp(sum / count, 0.0, 1.0);
}

double sparc(const std::vector<double>& signal, double sample_rate, double cutoff_hz,
             double amp_threshold) {
  if (signal.size() < 10) throw DataError("SPARC needs at least 10 samples");
  std::vector<double> speed(signal.size() - 1);
  for (std::size_t i = 0; i + 1 < signal.size(); ++i) {
    speed[i] = std::abs(signal[i + 1] - signal[i]) * sample_rate;
  }
  if (std::all_of(speed.begin(), speed.end(), [](double v) { return v == 0.0; })) {
    throw NoMovement();
  }

  const auto order = static_cast<int>(std::ceil(std::log2(static_cast<double>(speed.size()))));
  const std::size_t nfft = std::size_t{1} << (order + 4);
  std::vector<double> mag = magnitude_spectrum(speed, nfft);
  const double dc = mag[0];
  for (double& m : mag) m /= dc;

  std::size_t last = 0;
  for (std::size_t k = 0; k < mag.size() && bin_frequency(k, nfft, sample_rate) <= cutoff_hz; ++k) {
    if (mag[k] >= amp_threshold) last = k;
  }
  if (last == 0) return 0.0;

  const double f_span = bin_frequency(last, nfft, sample_rate);
  double arc = 0.0;
  for (std::size_t k = 1; k <= last; ++k) {
    const double df = (bin_frequency(k, nfft, sample_rate) - bin_frequency(k - 1, nfft, sample_rate)) / f_span;
    const double dm = mag[k] - mag[k - 1];
    arc += std::sqrt(df * df + dm * dm);
  }
  return -arc;
}

Frame region_sparc_abs(const Trajectory& traj, Region region) {
  std::vector<bool> flags(traj.size(), true);
  if (region == Region::speaking_only) {
    if (!traj.has_mask()) throw DataError("speaking region requested but no speaking mask present");
    flags = *traj.speaking();
  }
  Frame out{0.0, 0.0, 0.0};
  for (int c = 0; c < kChannels; ++c) {
    const auto x = traj.channel(c);
    double sum = 0.0;
    int count = 0;
    std::size_t i = 0;
    while (i < flags.size()) {
      if (!flags[i]) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < flags.size() && flags[j]) ++j;
      if (j - i >= 10) {
        try {
          sum += std::abs(sparc(std::vector<double>(x.begin() + i, x.begin() + j), traj.sample_rate()));
          ++count;
        } catch (const NoMovement&) {
        }
      }
      i = j;
    }
    if (count == 0) throw DataError("no region segment long enough for SPARC on channel " + std::to_string(c));
    out[c] = sum / count;
  }
  return out;
}

namespace {

struct Axis {
  double lo = 0.0;
  double hi = 0.0;
  int bins = 0;

  int bin(double v) const {
    const auto k = static_cast<int>(std::floor((v - lo) / (hi - lo) * bins));
    return std::clamp(k, 0, bins - 1);
  }
};

Axis pooled_axis(const Trajectory& p, const Trajectory& q, const std::vector<std::size_t>& idx, int c,
                 int bins) {
  Axis a{p[idx[0]][c], p[idx[0]][c], bins};
  for (auto i : idx) {
    a.lo = std::min({a.lo, p[i][c], q[i][c]});
    a.hi = std::max({a.hi, p[i][c], q[i][c]});
  }
  if (!(a.hi > a.lo)) throw DataError("degenerate histogram range on channel " + std::to_string(c));
  return a;
}

std::vector<double> smoothed(const std::vector<double>& counts, double total) {
  std::vector<double> p(counts.size());
  const double norm = 1.0 + kKlSmoothing * static_cast<double>(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) p[i] = (counts[i] / total + kKlSmoothing) / norm;
  return p;
}

double symmetric_divergence(const std::vector<double>& p, const std::vector<double>& q) {
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) d += (p[i] - q[i]) * (std::log(p[i]) - std::log(q[i]));
  return d;
}

}  // namespace

double sym_kl(const Trajectory& pred, const Trajectory& gt, int bins, Region region, KlMode mode) {
  if (bins < 1) throw DataError("bins must be positive");
  const auto idx = region_frames(pred, gt, region);
  if (idx.empty()) throw DataError("region is empty");
  const auto total = static_cast<double>(idx.size());

  if (mode == KlMode::joint_yz) {
    const Axis ay = pooled_axis(pred, gt, idx, 1, bins);
    const Axis az = pooled_axis(pred, gt, idx, 2, bins);
    std::vector<double> cp(static_cast<std::size_t>(bins) * bins, 0.0);
    std::vector<double> cq(cp.size(), 0.0);
    for (auto i : idx) {
      cp[ay.bin(pred[i][1]) * bins + az.bin(pred[i][2])] += 1.0;
      cq[ay.bin(gt[i][1]) * bins + az.bin(gt[i][2])] += 1.0;
    }
    return symmetric_divergence(smoothed(cp, total), smoothed(cq, total));
  }

  double sum = 0.0;
  for (int c = 0; c < kChannels; ++c) {
    const Axis a = pooled_axis(pred, gt, idx, c, bins);
    std::vector<double> cp(bins, 0.0);
    std::vector<double> cq(bins, 0.0);
    for (auto i : idx) {
      cp[a.bin(pred[i][c])] += 1.0;
      cq[a.bin(gt[i][c])] += 1.0;
    }
    sum += symmetric_divergence(smoothed(cp, total), smoothed(cq, total));
  }
  return sum / kChannels;
}

double hf_ratio(const Trajectory& traj, double cutoff_hz) {
  if (!(cutoff_hz > 0.0)) throw DataError("cutoff must be positive");
  const double min_len = 2.0 * traj.sample_rate() / cutoff_hz;
  if (static_cast<double>(traj.size()) < min_len) {
    throw DataError("trajectory too short for hf_ratio: need " + std::to_string(min_len) + " frames");
  }
  double sum = 0.0;
  int used = 0;
  for (int c = 0; c < kChannels; ++c) {
    auto x = traj.channel(c);
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    for (double& v : x) v -= mean;
    const auto p = power_spectrum(x);
    double all = 0.0;
    double high = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      all += p[k];
      if (bin_frequency(k, x.size(), traj.sample_rate()) > cutoff_hz) high += p[k];
    }
    if (all > 0.0) {
      sum += high / all;
      ++used;
    }
  }
  if (used == 0) throw DataError("zero total power");
  return sum / used;
}

EvalReport evaluate(const Trajectory& pred, const Trajectory& gt, Region region) {
  EvalReport r;
  r.region = region;
  r.normalized_mse = normalized_mse(pred, gt, region);
  r.local_cca = local_cca(pred, gt, kWindowFrames, kWindowHop, region);
  // SPARC uses the ground truth's mask when the prediction carries none.
  Trajectory masked = pred;
  if (!pred.has_mask() && gt.has_mask()) masked = Trajectory(pred.frames(), pred.sample_rate(), gt.speaking());
  r.sparc_abs = region_sparc_abs(masked, region);
  r.sparc_abs_mean = (r.sparc_abs[0] + r.sparc_abs[1] + r.sparc_abs[2]) / kChannels;
  r.sym_kl = sym_kl(pred, gt, 50, region);
  r.hf_ratio = hf_ratio(pred);
  return r;
}

}  // namespace hm
