// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset; the exit status is nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "headmotion/calibration.hpp"
#include "headmotion/cli.hpp"
#include "headmotion/denoiser.hpp"
#include "headmotion/linear_filter.hpp"
#include "headmotion/metrics.hpp"
#include "headmotion/mlp.hpp"
#include "headmotion/noise.hpp"
#include "headmotion/random.hpp"
#include "headmotion/sweep.hpp"
#include "headmotion/synth.hpp"
#include "headmotion/trainer.hpp"
#include "headmotion/trajectory.hpp"
#include "../support/oracles.hpp"

namespace fs = std::filesystem;
using namespace hm;

namespace {

// Pinned tolerances.
constexpr double kGradRelTol = 1e-4;
constexpr double kGradRelFloor = 1e-6;
constexpr double kGradRuntimeS = 60.0;
constexpr double kRoundTripTol = 1e-12;
constexpr double kDnFactor = 0.5;
constexpr double kGnFactor = 0.8;
constexpr double kTrainRuntimeS = 1800.0;
constexpr double kCalibTol = 1e-3;
constexpr double kGridStep = 0.01;
constexpr double kLinearLeakMax = 1e-12;
constexpr double kModelLeakMin = 1e-4;
constexpr double kMseTol = 1e-12;
constexpr double kCcaTol = 1e-6;
constexpr double kKlTol = 1e-9;
constexpr double kLowHf = 0.01;
constexpr double kHighHf = 0.99;

// Training setup for the denoising criterion.
constexpr int kTrainTrajectories = 25;
constexpr int kValTrajectories = 3;
constexpr int kTestTrajectories = 5;
constexpr double kTrajSeconds = 60.0;
constexpr int kMinTrainWindows = 5000;
constexpr const char* kTrainRecipe = "0.15*dropout:0.5,0.55*gauss:0.2,0.3*steps:0.2+gauss:0.05+spike:0.03:1";
constexpr int kTrainEpochs = 60;
constexpr double kTrainLr = 3e-4;
constexpr int kSmoothingSeeds = 20;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<Trajectory> synth_set(std::uint64_t first, int count) {
  std::vector<Trajectory> out;
  for (int i = 0; i < count; ++i) out.push_back(synth_trajectory(first + i, kTrajSeconds));
  return out;
}

// ---------------------------------------------------------------- 1

double max_rel_error(const Gradients& a, const Gradients& b) {
  double worst = 0.0;
  auto cmp = [&](const auto& x, const auto& y) {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double denom = std::max({std::abs(x.data()[i]), std::abs(y.data()[i]), kGradRelFloor});
      worst = std::max(worst, std::abs(x.data()[i] - y.data()[i]) / denom);
    }
  };
  for (std::size_t l = 0; l < a.weights.size(); ++l) {
    cmp(a.weights[l], b.weights[l]);
    cmp(a.biases[l], b.biases[l]);
  }
  return worst;
}

Outcome gradient_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> width(2, 32);
  std::uniform_int_distribution<int> depth(1, 2);
  std::uniform_real_distribution<double> var(0.5, 2.0);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  for (int m = 0; m < 20; ++m) {
    std::vector<int> enc{width(rng)};
    for (int d = depth(rng); d > 0; --d) enc.push_back(width(rng));
    std::vector<int> sizes = enc;
    for (auto it = enc.rbegin() + 1; it != enc.rend(); ++it) sizes.push_back(*it);
    const Activation act = m % 2 == 0 ? Activation::tanh : Activation::relu;
    const double rate = m % 4 < 2 ? 0.0 : 0.3;
    MlpModel model = init_model(sizes, act, rate, 200 + m);
    for (auto& l : model.layers)
      for (Eigen::Index i = 0; i < l.bias.size(); ++i) l.bias(i) = 0.1 * normal(rng);
    const int dim = sizes.front();
    Eigen::MatrixXd x(6, dim), y(6, dim);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      x.data()[i] = normal(rng);
      y.data()[i] = normal(rng);
    }
    Eigen::RowVectorXd v(dim);
    for (int i = 0; i < dim; ++i) v(i) = var(rng);
    Rng mrng = make_rng(300 + m);
    const Eigen::MatrixXd mask = sample_dropout_mask(x.rows(), x.cols(), rate, mrng);
    const Eigen::MatrixXd* mp = rate > 0 ? &mask : nullptr;
    const Gradients exact = backward(model, x, y, v, mp);
    const Gradients fd = oracle::fd_gradients(
        model, [&](const MlpModel& mm) { return training_loss(mm, x, y, v, mp); });
    worst = std::max(worst, max_rel_error(exact, fd));
  }
  const double dt = seconds_since(t0);
  return {worst < kGradRelTol && dt < kGradRuntimeS,
          fmt("max rel err %.3g over 20 models (< %g), %.1f s (< %g s)", worst, kGradRelTol, dt, kGradRuntimeS)};
}

// ---------------------------------------------------------------- 2

Outcome round_trip() {
  std::mt19937_64 rng(102);
  std::uniform_int_distribution<int> len(50, 1000);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    std::vector<Frame> frames(len(rng));
    for (auto& f : frames)
      for (double& v : f) v = normal(rng);
    const Trajectory traj(frames);
    const Segmentation seg = segment_windows(traj);
    const Trajectory back = overlap_add(seg.windows, seg.starts, traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i)
      for (int c = 0; c < kChannels; ++c) worst = std::max(worst, std::abs(back[i][c] - traj[i][c]));
  }
  return {worst < kRoundTripTol, fmt("max abs err %.3g on 100 trajectories (< %g)", worst, kRoundTripTol)};
}

// ---------------------------------------------------------------- 3

struct Trained {
  MlpModel model;
  double seconds = 0.0;
  std::size_t train_windows = 0;
  int epochs = 0;
  std::vector<Window> test;
};

const Trained& trained_model() {
  static std::optional<Trained> cache;
  if (cache) return *cache;
  const auto t0 = std::chrono::steady_clock::now();
  const auto train_trajs = synth_set(0, kTrainTrajectories);
  const auto val_trajs = synth_set(500, kValTrajectories);
  const TrainData data = prepare_training_data(train_trajs, val_trajs);
  TrainConfig cfg;
  cfg.learning_rate = kTrainLr;
  cfg.epochs = kTrainEpochs;
  cfg.seed = 3;
  cfg.noise = NoiseRecipe::parse(kTrainRecipe);
  const TrainResult r = train(data, cfg, parse_arch("150-3000-180"));
  Trained t;
  t.model = r.model;
  t.train_windows = data.train.size();
  t.epochs = static_cast<int>(r.history.val_loss.size());
  for (const auto& traj : synth_set(1000, kTestTrajectories)) {
    const Segmentation seg = segment_windows(normalize(traj, data.norm_stats));
    t.test.insert(t.test.end(), seg.windows.begin(), seg.windows.end());
  }
  t.seconds = seconds_since(t0);
  cache = std::move(t);
  return *cache;
}

Outcome denoising() {
  const Trained& t = trained_model();
  const auto dn = corrupt_windows(t.test, NoiseSpec::dropout(0.5), 31);
  const auto gn = corrupt_windows(t.test, NoiseSpec::gaussian(0.2), 32);
  const double dn_raw = window_mse(dn, t.test);
  const double gn_raw = window_mse(gn, t.test);
  const double dn_f = model_window_mse(t.model, dn, t.test);
  const double gn_f = model_window_mse(t.model, gn, t.test);
  const bool pass = t.train_windows >= kMinTrainWindows && dn_f < kDnFactor * dn_raw &&
                    gn_f < kGnFactor * gn_raw && t.seconds < kTrainRuntimeS;
  return {pass, fmt("%zu train windows, %d epochs; DN %.4f -> %.4f (< %.4f), GN %.4f -> %.4f (< %.4f), "
                    "%.0f s (< %g s)",
                    t.train_windows, t.epochs, dn_raw, dn_f, kDnFactor * dn_raw, gn_raw, gn_f,
                    kGnFactor * gn_raw, t.seconds, kTrainRuntimeS)};
}

// ---------------------------------------------------------------- 4

Trajectory prediction_like(const Trajectory& clean, const NormStats& stats, std::uint64_t seed) {
  std::vector<NoiseSpec> chain = NoiseRecipe::parse(kPredictionLikeNoise).options.at(0).chain;
  for (std::size_t i = 0; i < chain.size(); ++i) chain[i].seed = derive_seed(seed, i);
  return corrupt_normalized(clean, chain, stats);
}

Outcome smoothing() {
  const Trained& t = trained_model();
  const char* names[] = {"noisy", "autoencoder", "gaussian", "mva"};
  std::array<Frame, 4> sum{};
  int per_seed_ok = 0;
  for (int s = 0; s < kSmoothingSeeds; ++s) {
    const Trajectory clean = synth_trajectory(2000 + s, kTrajSeconds);
    const Trajectory noisy = prediction_like(clean, t.model.norm_stats, 4000 + s);
    const Trajectory ae = filter_trajectory(t.model, noisy);
    const Trajectory gs = apply_linear(noisy, calibrate_linear(LinearKind::gaussian, ae, noisy).spec);
    const Trajectory mv = apply_linear(noisy, calibrate_linear(LinearKind::moving_average, ae, noisy).spec);
    const std::array<Frame, 4> v{region_sparc_abs(noisy, Region::speaking_only),
                                 region_sparc_abs(ae, Region::speaking_only),
                                 region_sparc_abs(gs, Region::speaking_only),
                                 region_sparc_abs(mv, Region::speaking_only)};
    bool ok = true;
    for (int f = 0; f < 4; ++f)
      for (int c = 0; c < kChannels; ++c) {
        sum[f][c] += v[f][c] / kSmoothingSeeds;
        if (f > 0 && v[f][c] >= v[0][c]) ok = false;
      }
    per_seed_ok += ok;
  }
  bool pass = true;
  std::string detail;
  for (int f = 0; f < 4; ++f)
    detail += fmt("%s %.3f/%.3f/%.3f; ", names[f], sum[f][0], sum[f][1], sum[f][2]);
  for (int c = 0; c < kChannels; ++c) {
    for (int f = 1; f < 4; ++f) pass = pass && sum[f][c] < sum[0][c];
    const double ae_drop = sum[0][c] - sum[1][c];
    pass = pass && ae_drop >= sum[0][c] - sum[2][c] && ae_drop >= sum[0][c] - sum[3][c];
  }
  detail += fmt("every filter smoother on %d/%d seeds", per_seed_ok, kSmoothingSeeds);
  return {pass, "mean |SPARC| x/y/z speaking: " + detail};
}

// ---------------------------------------------------------------- 5

Outcome calibration() {
  double worst_gap = 0.0, worst_sigma = 0.0;
  bool mva_ok = true;
  std::mt19937_64 rng(105);
  std::uniform_real_distribution<double> s0(0.8, 3.0);
  for (int k = 0; k < 5; ++k) {
    const Trajectory clean = synth_trajectory(3000 + k, 30.0);
    const Trajectory noisy = apply_noise(clean, NoiseSpec::gaussian(0.3, 3100 + k));
    const Trajectory ref = apply_linear(noisy, LinearFilterSpec::gaussian(s0(rng)));
    const double target = hf_ratio(ref);

    const Calibration g = calibrate_linear(LinearKind::gaussian, ref, noisy);
    worst_gap = std::max(worst_gap, std::abs(g.achieved_ratio - target));
    double grid = kGridStep;
    while (hf_ratio(apply_linear(noisy, LinearFilterSpec::gaussian(grid))) > target + kCalibTol) grid += kGridStep;
    worst_sigma = std::max(worst_sigma, std::abs(g.spec.param - grid));

    const Calibration m = calibrate_linear(LinearKind::moving_average, ref, noisy);
    const int w = static_cast<int>(m.spec.param);
    mva_ok = mva_ok && m.achieved_ratio <= target + kCalibTol &&
             (w == 1 || hf_ratio(apply_linear(noisy, LinearFilterSpec::moving_average(w - 2))) > target + kCalibTol);
  }
  return {worst_gap <= kCalibTol && worst_sigma <= kGridStep && mva_ok,
          fmt("|achieved - target| max %.3g (<= %g), |sigma - grid sigma| max %.4f (<= %g), "
              "moving-average width minimal: %s",
              worst_gap, kCalibTol, worst_sigma, kGridStep, mva_ok ? "yes" : "no")};
}

// ---------------------------------------------------------------- 6

double off_channel_max(const Trajectory& r, int channel) {
  double m = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i)
    for (int c = 0; c < kChannels; ++c)
      if (c != channel) m = std::max(m, std::abs(r[i][c]));
  return m;
}

Outcome cross_channel() {
  const int y = 1;
  const double g = off_channel_max(impulse_probe(make_linear_filter(LinearFilterSpec::gaussian(2.0)), y, 200), y);
  const double m = off_channel_max(impulse_probe(make_linear_filter(LinearFilterSpec::moving_average(9)), y, 200), y);
  const double a = off_channel_max(impulse_probe(make_model_filter(trained_model().model), y, 200), y);
  return {g < kLinearLeakMax && m < kLinearLeakMax && a > kModelLeakMin,
          fmt("off-channel max |response|: gaussian %.3g, mva %.3g (< %g), autoencoder %.3g (> %g)", g, m,
              kLinearLeakMax, a, kModelLeakMin)};
}

// ---------------------------------------------------------------- 7

Trajectory sinusoid(double hz, std::size_t n) {
  std::vector<Frame> f(n);
  for (std::size_t i = 0; i < n; ++i)
    for (int c = 0; c < kChannels; ++c)
      f[i][c] = (1.0 + c) * std::sin(2 * std::numbers::pi * hz * i / kDefaultSampleRate + c);
  return Trajectory(f);
}

Outcome metric_identities() {
  const Trajectory t = synth_trajectory(7, kTrajSeconds);
  double mse = 0, cca = 1, kl = 0;
  for (Region r : {Region::full, Region::speaking_only}) {
    mse = std::max(mse, std::abs(normalized_mse(t, t, r)));
    cca = std::min(cca, local_cca(t, t, kWindowFrames, kWindowHop, r));
    for (KlMode k : {KlMode::joint_yz, KlMode::per_channel}) kl = std::max(kl, std::abs(sym_kl(t, t, 50, r, k)));
  }
  std::mt19937_64 rng(107);
  std::normal_distribution<double> normal;
  auto random = [&](int r, int c) {
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
    return m;
  };
  double inv = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd a = random(50, 3);
    const Eigen::MatrixXd b = 0.5 * a + random(50, 3);
    const Eigen::MatrixXd ma = random(3, 3) + 3 * Eigen::MatrixXd::Identity(3, 3);
    const Eigen::MatrixXd mb = random(3, 3) + 3 * Eigen::MatrixXd::Identity(3, 3);
    const Eigen::RowVectorXd sa = random(1, 3), sb = random(1, 3);
    const double base = canonical_correlation(a, b);
    const double moved = canonical_correlation((a * ma).rowwise() + sa, (b * mb).rowwise() + sb);
    inv = std::max(inv, std::abs(base - moved));
  }
  const double lo = hf_ratio(sinusoid(1.0, 6000));
  const double hi = hf_ratio(sinusoid(10.0, 6000));
  const bool pass = mse <= kMseTol && std::abs(1 - cca) <= kCcaTol && kl <= kKlTol && inv <= kCcaTol &&
                    lo < kLowHf && hi > kHighHf;
  return {pass, fmt("mse %.2g, 1-cca %.2g, sym_kl %.2g, cca invariance %.2g, hf 1 Hz %.2g, hf 10 Hz %.6f", mse,
                    1 - cca, kl, inv, lo, hi)};
}

// ---------------------------------------------------------------- 8, 9

struct CliRun {
  int code = 0;
  std::string err;
};

CliRun cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> dir_contents(const fs::path& d) {
  std::map<std::string, std::string> m;
  for (const auto& e : fs::directory_iterator(d))
    if (e.is_regular_file()) m[e.path().filename().string()] = slurp(e.path());
  return m;
}

fs::path scratch() {
  static const fs::path d = [] {
    const fs::path p = fs::temp_directory_path() / "headmotion_acceptance";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return d;
}

// Runs `args` once into <base>/a and once into <base>/b; the file sets
// must agree byte for byte.
bool twice(const std::string& step, std::vector<std::string> args, std::string& why) {
  const fs::path base = scratch() / "runs" / step;
  std::map<std::string, std::string> seen[2];
  for (int k = 0; k < 2; ++k) {
    const fs::path out = base / (k == 0 ? "a" : "b");
    std::vector<std::string> full{"--seed", "11", "--out-dir", out.string()};
    full.insert(full.end(), args.begin(), args.end());
    const CliRun r = cli(full);
    if (r.code != 0) {
      why = step + " exited " + std::to_string(r.code) + ": " + r.err;
      return false;
    }
    seen[k] = dir_contents(out);
  }
  if (seen[0].empty() || seen[0] != seen[1]) {
    why = step + " outputs differ";
    return false;
  }
  return true;
}

// Inputs shared by the determinism and table criteria.
struct Pipeline {
  fs::path gt, noisy, model;
  bool ok = false;
  std::string why;
};

const Pipeline& pipeline() {
  static std::optional<Pipeline> cache;
  if (cache) return *cache;
  Pipeline p;
  const fs::path in = scratch() / "inputs";
  const fs::path a = scratch() / "runs";
  auto step = [&](const std::string& name, const std::vector<std::string>& args) {
    return p.why.empty() && twice(name, args, p.why);
  };
  const std::string kFiltered = "synth_003_noisy_filtered.csv";
  std::vector<std::string> train_files;
  if (cli({"--seed", "5", "--out-dir", in.string(), "synth", "--count", "4", "--duration", "30"}).code != 0) {
    p.why = "synth failed";
  }
  for (int i = 0; i < 3; ++i) train_files.push_back((in / fmt("synth_%03d.csv", i)).string());
  p.gt = in / "synth_003.csv";
  step("synth", {"synth", "--count", "2", "--duration", "20"});
  step("corrupt", {"corrupt", "--in", p.gt.string(), "--noise", "prediction"});
  p.noisy = a / "corrupt" / "a" / "synth_003_noisy.csv";
  if (p.why.empty() && !fs::exists(p.noisy)) p.why = "corrupt output missing";
  std::vector<std::string> targs{"train", "--arch", "150-60-20", "--epochs", "4", "--lr", "1e-3", "--noise",
                                 kTrainRecipe, "--quiet", "--data"};
  targs.insert(targs.end(), train_files.begin(), train_files.end());
  step("train", targs);
  p.model = a / "train" / "a" / "model.json";
  step("filter_model", {"filter", "--model", p.model.string(), "--in", p.noisy.string()});
  step("calibrate", {"calibrate", "--kind", "gaussian", "--reference",
                     (a / "filter_model" / "a" / kFiltered).string(), "--noisy", p.noisy.string()});
  step("filter_gauss", {"filter", "--linear", "gaussian:2", "--in", p.noisy.string()});
  step("filter_mva", {"filter", "--linear", "mva:7", "--in", p.noisy.string()});
  step("impulse", {"impulse", "--filter", p.model.string(), "--channel", "ry"});
  step("evaluate",
       {"evaluate", "--gt", p.gt.string(), "--region", "speaking", "--pred", "NonFilter=" + p.noisy.string(), "--pred",
        "ProposedF=" + (a / "filter_model" / "a" / kFiltered).string(), "--pred",
        "MVA=" + (a / "filter_mva" / "a" / kFiltered).string(), "--pred",
        "GaussianF=" + (a / "filter_gauss" / "a" / kFiltered).string()});
  step("sweep", {"sweep", "--archs", "150-20-10", "--input-dropout", "0", "--epochs", "2", "--data",
                 train_files[0], train_files[1], train_files[2], "--test", p.gt.string()});
  p.ok = p.why.empty();
  cache = std::move(p);
  return *cache;
}

Outcome determinism() {
  const Pipeline& p = pipeline();
  return {p.ok, p.ok ? "synth, corrupt, train, filter, calibrate, impulse, evaluate, sweep: byte-identical reruns"
                     : p.why};
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  return out;
}

Outcome table_report() {
  const Pipeline& p = pipeline();
  if (!p.ok) return {false, p.why};
  std::istringstream csv(slurp(scratch() / "runs" / "evaluate" / "a" / "report.csv"));
  std::string line;
  std::getline(csv, line);
  const auto header = split(line, ',');
  const std::vector<std::string> want{"filter", "mse", "cca", "sym_kl", "sparc_x", "sparc_y", "sparc_z"};
  bool pass = header.size() >= want.size() && std::equal(want.begin(), want.end(), header.begin());
  std::vector<std::string> labels;
  while (std::getline(csv, line)) {
    const auto cells = split(line, ',');
    if (cells.size() != header.size()) pass = false;
    if (cells.empty()) continue;
    labels.push_back(cells[0]);
    for (std::size_t i = 1; i < cells.size(); ++i) {
      char* end = nullptr;
      const double v = std::strtod(cells[i].c_str(), &end);
      if (end == cells[i].c_str() || *end != '\0' || !std::isfinite(v)) pass = false;
    }
  }
  pass = pass && labels == std::vector<std::string>{"NonFilter", "ProposedF", "MVA", "GaussianF"};
  std::string joined;
  for (const auto& l : labels) joined += (joined.empty() ? "" : ",") + l;
  return {pass, fmt("%zu columns, rows %s", header.size(), joined.c_str())};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> only;
  app.add_option("criteria", only, "Criterion numbers to run (default: all)")->check(CLI::Range(1, 9));
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"gradient oracle", gradient_oracle},
      {"analysis-synthesis identity", round_trip},
      {"denoising efficacy", denoising},
      {"smoothing efficacy", smoothing},
      {"calibration correctness", calibration},
      {"cross-channel characteristic", cross_channel},
      {"metric identities", metric_identities},
      {"determinism", determinism},
      {"table-shaped report", table_report},
  };
  const std::set<int> wanted(only.begin(), only.end());
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!wanted.empty() && !wanted.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
