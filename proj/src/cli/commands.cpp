#include "headmotion/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "headmotion/calibration.hpp"
#include "headmotion/denoiser.hpp"
#include "headmotion/error.hpp"
#include "headmotion/linear_filter.hpp"
#include "headmotion/metrics.hpp"
#include "headmotion/model_io.hpp"
#include "headmotion/noise.hpp"
#include "headmotion/sweep.hpp"
#include "headmotion/synth.hpp"
#include "headmotion/trainer.hpp"
#include "headmotion/trajectory_csv.hpp"
#include "manifest.hpp"
#include "svg.hpp"

namespace fs = std::filesystem;

namespace hm::cli {
namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Global {
  std::uint64_t seed = 0;
  double sample_rate = kDefaultSampleRate;
  std::string out_dir = ".";
  std::string format = "csv";
};

constexpr const char* kChannelNames[] = {"rx", "ry", "rz"};

// ---- file helpers ----------------------------------------------------------

void ensure_dir(const fs::path& dir) {
  if (dir.empty()) return;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw DataError("cannot create directory " + dir.string());
}

void write_text(const fs::path& path, const std::string& text) {
  ensure_dir(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("write failed for " + path.string());
}

Trajectory read_trajectory(const fs::path& path) {
  if (path.extension() != ".json") return read_trajectory_csv(path);
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path.string());
  try {
    const Json j = Json::parse(in);
    std::vector<Frame> frames;
    for (const auto& f : j.at("frames")) frames.push_back({f.at(0).get<double>(), f.at(1).get<double>(), f.at(2).get<double>()});
    std::optional<std::vector<bool>> mask;
    if (j.contains("speaking")) {
      mask.emplace();
      for (const auto& v : j.at("speaking")) mask->push_back(v.get<int>() != 0);
    }
    return Trajectory(std::move(frames), j.at("sample_rate").get<double>(), std::move(mask));
  } catch (const Json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string trajectory_json(const Trajectory& t) {
  Json j;
  j["sample_rate"] = t.sample_rate();
  Json frames = Json::array();
  for (const auto& f : t.frames()) frames.push_back({f[0], f[1], f[2]});
  j["frames"] = std::move(frames);
  if (t.has_mask()) {
    Json mask = Json::array();
    for (bool b : *t.speaking()) mask.push_back(b ? 1 : 0);
    j["speaking"] = std::move(mask);
  }
  return j.dump() + "\n";
}

void write_trajectory(const fs::path& path, const Trajectory& t) {
  if (path.extension() == ".json") {
    write_text(path, trajectory_json(t));
  } else {
    std::ostringstream os;
    write_trajectory_csv(os, t);
    write_text(path, os.str());
  }
}

std::string traj_ext(const Global& g) { return g.format == "json" ? ".json" : ".csv"; }

fs::path default_output(const Global& g, const std::string& name) { return fs::path(g.out_dir) / name; }

fs::path sibling(const fs::path& path, const std::string& suffix) {
  return path.parent_path() / (path.stem().string() + suffix);
}

Json global_params(const Global& g) {
  return Json{{"seed", g.seed}, {"sample_rate", g.sample_rate}, {"format", g.format}};
}

Json stats_json(const NormStats& s) {
  return Json{{"mean", {s.mean[0], s.mean[1], s.mean[2]}}, {"std", {s.std[0], s.std[1], s.std[2]}}};
}

std::vector<fs::path> expand_inputs(const std::vector<std::string>& items) {
  std::vector<fs::path> out;
  for (const auto& item : items) {
    const fs::path p(item);
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(p)) {
        const auto ext = e.path().extension();
        if (e.is_regular_file() && (ext == ".csv" || ext == ".json") &&
            e.path().filename().string().find(".manifest") == std::string::npos &&
            e.path().filename().string().find(".noise") == std::string::npos) {
          found.push_back(e.path());
        }
      }
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else {
      out.push_back(p);
    }
  }
  if (out.empty()) throw DataError("no input trajectories found");
  return out;
}

NoiseRecipe parse_noise_flag(const std::string& flag, const std::string& text) {
  try {
    return NoiseRecipe::parse(text == "prediction" ? kPredictionLikeNoise : text);
  } catch (const DataError& e) {
    throw UsageError(flag + ": " + e.what());
  }
}

LinearFilterSpec parse_linear_flag(const std::string& flag, const std::string& text) {
  try {
    return LinearFilterSpec::parse(text);
  } catch (const DataError& e) {
    throw UsageError(flag + ": " + e.what());
  }
}

// ---- commands --------------------------------------------------------------

struct SynthOpts {
  double duration = 60.0;
  int count = 1;
};

int cmd_synth(const Global& g, const SynthOpts& o, std::ostream& out) {
  if (!(o.duration >= 1.0)) throw UsageError("--duration must be at least 1 s");
  if (o.count < 1) throw UsageError("--count must be positive");
  ensure_dir(g.out_dir);
  Manifest m("synth");
  m.params() = global_params(g);
  m.params()["duration"] = o.duration;
  m.params()["count"] = o.count;
  for (int i = 0; i < o.count; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "synth_%03d", i);
    const fs::path path = default_output(g, name + traj_ext(g));
    write_trajectory(path, synth_trajectory(derive_seed(g.seed, static_cast<std::uint64_t>(i)), o.duration, g.sample_rate));
    m.add_output(path);
    out << path.string() << '\n';
  }
  m.write(g.out_dir);
  return kExitOk;
}

struct CorruptOpts {
  std::string in;
  std::string noise;
  std::string out;
};

int cmd_corrupt(const Global& g, const CorruptOpts& o, std::ostream& out) {
  const NoiseRecipe recipe = parse_noise_flag("--noise", o.noise);
  if (recipe.options.size() > 1) throw UsageError("--noise: corrupt takes a single chain, not a mixture");
  std::vector<NoiseSpec> chain = recipe.empty() ? std::vector<NoiseSpec>{} : recipe.options[0].chain;
  for (auto& s : chain) s.seed = g.seed;

  const Trajectory traj = read_trajectory(o.in);
  const Trajectory trajs[] = {traj};
  const NormStats stats = compute_stats(trajs);
  const Trajectory noisy = corrupt_normalized(traj, chain, stats);

  ensure_dir(g.out_dir);
  const fs::path path = o.out.empty() ? default_output(g, fs::path(o.in).stem().string() + "_noisy" + traj_ext(g))
                                      : fs::path(o.out);
  write_trajectory(path, noisy);
  const fs::path sidecar = sibling(path, ".noise.json");
  Json side{{"noise", recipe.to_string()}, {"seed", g.seed}, {"norm_stats", stats_json(stats)}};
  write_text(sidecar, side.dump(2) + "\n");

  Manifest m("corrupt");
  m.params() = global_params(g);
  m.params()["noise"] = recipe.to_string();
  m.add_input(o.in);
  m.add_output(path);
  m.add_output(sidecar);
  m.write(g.out_dir);
  out << path.string() << '\n';
  return kExitOk;
}

struct TrainOpts {
  std::vector<std::string> data;
  double val_split = 0.2;
  std::string arch = "150-3000-180";
  int epochs = 100;
  double lr = 1e-4;
  int batch_size = 64;
  std::string noise = "none";
  double input_dropout = 0.0;
  std::string activation = "tanh";
  int patience = 20;
  std::string out;
  bool quiet = false;
};

struct Split {
  std::vector<Trajectory> train;
  std::vector<Trajectory> val;
};

Split split_data(const std::vector<fs::path>& files, double val_split) {
  Split s;
  if (files.size() >= 2) {
    const auto n = static_cast<long>(files.size());
    const long n_val = std::clamp(std::lround(val_split * static_cast<double>(n)), 1L, n - 1);
    for (long i = 0; i < n; ++i) (i < n - n_val ? s.train : s.val).push_back(read_trajectory(files[i]));
    return s;
  }
  // One file: the tail becomes the validation trajectory.
  const Trajectory t = read_trajectory(files.front());
  const auto cut = static_cast<std::size_t>(std::lround(static_cast<double>(t.size()) * (1.0 - val_split)));
  if (cut < kWindowFrames || t.size() - cut < kWindowFrames) {
    throw DataError("too few frames to split " + files.front().string() + " into train and validation parts");
  }
  std::vector<Frame> head(t.frames().begin(), t.frames().begin() + cut);
  std::vector<Frame> tail(t.frames().begin() + cut, t.frames().end());
  s.train.emplace_back(std::move(head), t.sample_rate());
  s.val.emplace_back(std::move(tail), t.sample_rate());
  return s;
}

int cmd_train(const Global& g, const TrainOpts& o, std::ostream& out) {
  std::vector<int> sizes;
  try {
    sizes = parse_arch(o.arch);
  } catch (const DataError& e) {
    throw UsageError(std::string("--arch: ") + e.what());
  }
  if (!(o.val_split > 0.0 && o.val_split < 1.0)) throw UsageError("--val-split must be in (0, 1)");

  TrainConfig cfg;
  cfg.learning_rate = o.lr;
  cfg.batch_size = o.batch_size;
  cfg.epochs = o.epochs;
  cfg.seed = g.seed;
  cfg.noise = parse_noise_flag("--noise", o.noise);
  cfg.early_stop_patience = o.patience;
  cfg.hidden_activation = parse_activation(o.activation);
  cfg.input_dropout_rate = o.input_dropout;
  try {
    cfg.validate();
  } catch (const DataError& e) {
    throw UsageError(e.what());
  }

  const auto files = expand_inputs(o.data);
  const Split split = split_data(files, o.val_split);
  const TrainData data = prepare_training_data(split.train, split.val);

  std::ostringstream history;
  history << "epoch,train_loss,val_loss\n";
  auto on_epoch = [&](int epoch, double tl, double vl) {
    history << epoch + 1 << ',' << format_double(tl) << ',' << format_double(vl) << '\n';
    if (!o.quiet) out << "epoch " << epoch + 1 << " train " << format_double(tl) << " val " << format_double(vl) << '\n';
  };
  const TrainResult result = train(data, cfg, sizes, on_epoch);

  ensure_dir(g.out_dir);
  const fs::path model_path = o.out.empty() ? default_output(g, "model.json") : fs::path(o.out);
  ensure_dir(model_path.parent_path());
  save_model(model_path, result.model);
  const fs::path history_path = sibling(model_path, "_history.csv");
  write_text(history_path, history.str());

  Manifest m("train");
  m.params() = global_params(g);
  m.params()["arch"] = arch_name(sizes);
  m.params()["epochs"] = o.epochs;
  m.params()["lr"] = o.lr;
  m.params()["batch_size"] = o.batch_size;
  m.params()["val_split"] = o.val_split;
  m.params()["noise"] = cfg.noise.to_string();
  m.params()["input_dropout"] = o.input_dropout;
  m.params()["activation"] = activation_name(cfg.hidden_activation);
  m.params()["patience"] = o.patience;
  m.params()["train_windows"] = data.train.size();
  m.params()["val_windows"] = data.val.size();
  m.params()["best_epoch"] = result.history.best_epoch + 1;
  for (const auto& f : files) m.add_input(f);
  m.add_output(model_path);
  m.add_output(history_path);
  m.write(g.out_dir);
  out << model_path.string() << '\n';
  return kExitOk;
}

struct FilterOpts {
  std::string model;
  std::string linear;
  std::string in;
  std::string out;
};

int cmd_filter(const Global& g, const FilterOpts& o, std::ostream& out) {
  if (o.model.empty() == o.linear.empty()) throw UsageError("give exactly one of --model or --linear");
  const Trajectory traj = read_trajectory(o.in);
  Manifest m("filter");
  m.params() = global_params(g);
  Trajectory filtered;
  if (!o.model.empty()) {
    const MlpModel model = load_model(fs::path(o.model));
    filtered = filter_trajectory(model, traj);
    m.params()["filter"] = "model";
    m.add_input(o.model);
  } else {
    const LinearFilterSpec spec = parse_linear_flag("--linear", o.linear);
    filtered = apply_linear(traj, spec);
    m.params()["filter"] = spec.to_string();
  }
  m.add_input(o.in);

  ensure_dir(g.out_dir);
  const fs::path path = o.out.empty() ? default_output(g, fs::path(o.in).stem().string() + "_filtered" + traj_ext(g))
                                      : fs::path(o.out);
  write_trajectory(path, filtered);
  m.add_output(path);
  m.write(g.out_dir);
  out << path.string() << '\n';
  return kExitOk;
}

struct CalibrateOpts {
  std::string kind;
  std::string reference;
  std::string noisy;
  std::string out;
};

int cmd_calibrate(const Global& g, const CalibrateOpts& o, std::ostream& out) {
  const LinearKind kind = o.kind == "gaussian" ? LinearKind::gaussian : LinearKind::moving_average;
  const Trajectory reference = read_trajectory(o.reference);
  const Trajectory noisy = read_trajectory(o.noisy);
  const Calibration c = calibrate_linear(kind, reference, noisy);

  Json j{{"kind", kind_name(kind)},
         {"spec", c.spec.to_string()},
         {"param", c.spec.param},
         {"target_ratio", c.target_ratio},
         {"achieved_ratio", c.achieved_ratio},
         {"noisy_ratio", c.noisy_ratio},
         {"tolerance", kCalibrationTolerance},
         {"cutoff_hz", 5.0}};
  ensure_dir(g.out_dir);
  const fs::path path = o.out.empty() ? default_output(g, "calibration.json") : fs::path(o.out);
  write_text(path, j.dump(2) + "\n");

  Manifest m("calibrate");
  m.params() = global_params(g);
  m.params()["kind"] = kind_name(kind);
  m.add_input(o.reference);
  m.add_input(o.noisy);
  m.add_output(path);
  m.write(g.out_dir);
  out << c.spec.to_string() << " target " << format_double(c.target_ratio) << " achieved "
      << format_double(c.achieved_ratio) << '\n';
  return kExitOk;
}

struct ImpulseOpts {
  std::string filter;
  std::string channel = "ry";
  int len = 200;
  double amplitude = 1.0;
  std::string out;
};

int cmd_impulse(const Global& g, const ImpulseOpts& o, std::ostream& out) {
  const int channel = static_cast<int>(std::find(std::begin(kChannelNames), std::end(kChannelNames), o.channel) -
                                       std::begin(kChannelNames));
  if (o.len < 1) throw UsageError("--len must be positive");

  Manifest m("impulse");
  m.params() = global_params(g);
  TrajectoryFilter filter;
  double rate = g.sample_rate;
  std::string label;
  if (fs::path(o.filter).extension() == ".json") {
    const MlpModel model = load_model(fs::path(o.filter));
    rate = model.sample_rate;
    filter = make_model_filter(model);
    label = "model";
    m.add_input(o.filter);
  } else {
    const LinearFilterSpec spec = parse_linear_flag("--filter", o.filter);
    filter = make_linear_filter(spec);
    label = spec.to_string();
  }
  const Trajectory response = impulse_probe(filter, channel, o.len, o.amplitude, rate);

  Frame peak{0.0, 0.0, 0.0};
  for (const auto& f : response.frames())
    for (int c = 0; c < kChannels; ++c) peak[c] = std::max(peak[c], std::abs(f[c]));
  double off = 0.0;
  for (int c = 0; c < kChannels; ++c)
    if (c != channel) off = std::max(off, peak[c]);

  ensure_dir(g.out_dir);
  const fs::path path = o.out.empty() ? default_output(g, "impulse" + traj_ext(g)) : fs::path(o.out);
  write_trajectory(path, response);
  const fs::path sidecar = sibling(path, ".json");
  const fs::path plot = sibling(path, ".svg");
  if (sidecar == path) throw UsageError("--out: use a .csv path so the .json sidecar has its own name");

  Json side{{"filter", label},
            {"channel", o.channel},
            {"length", o.len},
            {"amplitude", o.amplitude},
            {"impulse_frame", o.len / 2},
            {"peak_abs", {peak[0], peak[1], peak[2]}},
            {"off_channel_max_abs", off}};
  write_text(sidecar, side.dump(2) + "\n");

  std::vector<double> t(response.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<double>(i) / rate;
  std::vector<Series> series;
  for (int c = 0; c < kChannels; ++c) series.push_back({kChannelNames[c], response.channel(c)});
  write_text(plot, line_panels_svg("Impulse on " + o.channel + " (" + label + ")", t, series, "time [s]"));

  m.params()["filter"] = label;
  m.params()["channel"] = o.channel;
  m.params()["len"] = o.len;
  m.params()["amplitude"] = o.amplitude;
  m.add_output(path);
  m.add_output(sidecar);
  m.add_output(plot);
  m.write(g.out_dir);
  out << "off-channel max |response| " << format_double(off) << '\n';
  return kExitOk;
}

struct EvaluateOpts {
  std::vector<std::string> pred;
  std::string gt;
  std::string region = "full";
  std::string kl_mode = "joint";
  std::string out;
  int jobs = 1;
};

struct LabelledPath {
  std::string label;
  fs::path path;
};

LabelledPath parse_pred(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) return {fs::path(text).stem().string(), text};
  if (eq == 0 || eq + 1 == text.size()) throw UsageError("--pred: expected label=path, got '" + text + "'");
  return {text.substr(0, eq), text.substr(eq + 1)};
}

int cmd_evaluate(const Global& g, const EvaluateOpts& o, std::ostream& out) {
  if (o.jobs < 1) throw UsageError("--jobs must be positive");
  const Region region = parse_region(o.region);
  const KlMode kl_mode = o.kl_mode == "joint" ? KlMode::joint_yz : KlMode::per_channel;
  std::vector<LabelledPath> preds;
  for (const auto& p : o.pred) preds.push_back(parse_pred(p));

  const Trajectory gt = read_trajectory(o.gt);
  std::vector<Trajectory> trajs(preds.size());
  std::vector<EvalReport> reports(preds.size());
  std::vector<std::exception_ptr> errors(preds.size());

  // Results land in input order whatever the job count.
  auto work = [&](std::size_t i) {
    try {
      trajs[i] = read_trajectory(preds[i].path);
      reports[i] = evaluate(trajs[i], gt, region);
      reports[i].sym_kl = sym_kl(trajs[i], gt, 50, region, kl_mode);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const std::size_t jobs = std::min<std::size_t>(static_cast<std::size_t>(o.jobs), preds.size());
  if (jobs <= 1) {
    for (std::size_t i = 0; i < preds.size(); ++i) work(i);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < jobs; ++j) {
      pool.emplace_back([&, j] {
        for (std::size_t i = j; i < preds.size(); i += jobs) work(i);
      });
    }
    for (auto& t : pool) t.join();
  }
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (errors[i]) {
      try {
        std::rethrow_exception(errors[i]);
      } catch (const DataError& e) {
        throw DataError(preds[i].path.string() + ": " + e.what());
      }
    }
  }

  Json results = Json::array();
  std::ostringstream table;
  table << "filter,mse,cca,sym_kl,sparc_x,sparc_y,sparc_z,sparc_mean,hf_ratio\n";
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const EvalReport& r = reports[i];
    results.push_back({{"file", preds[i].path.filename().string()},
                       {"filter", preds[i].label},
                       {"normalized_mse", r.normalized_mse},
                       {"local_cca", r.local_cca},
                       {"sym_kl", r.sym_kl},
                       {"sparc_abs", {r.sparc_abs[0], r.sparc_abs[1], r.sparc_abs[2]}},
                       {"sparc_abs_mean", r.sparc_abs_mean},
                       {"hf_ratio", r.hf_ratio}});
    table << preds[i].label << ',' << format_double(r.normalized_mse) << ',' << format_double(r.local_cca) << ','
          << format_double(r.sym_kl) << ',' << format_double(r.sparc_abs[0]) << ',' << format_double(r.sparc_abs[1])
          << ',' << format_double(r.sparc_abs[2]) << ',' << format_double(r.sparc_abs_mean) << ','
          << format_double(r.hf_ratio) << '\n';
  }
  Json report;
  report["ground_truth"] = fs::path(o.gt).filename().string();
  report["region"] = region_name(region);
  report["settings"] = {{"mse", "per-channel variance of ground truth over region"},
                        {"cca_window_frames", kWindowFrames},
                        {"cca_hop_frames", kWindowHop},
                        {"cca_observations", "frames of a window, 3 variables"},
                        {"cca_eigen_floor", kCcaEigenFloor},
                        {"kl_bins", 50},
                        {"kl_channels", kl_mode == KlMode::joint_yz ? "ry,rz joint" : "per channel mean"},
                        {"kl_smoothing", kKlSmoothing},
                        {"sparc_cutoff_hz", 10.0},
                        {"sparc_amp_threshold", 0.05},
                        {"hf_cutoff_hz", 5.0}};
  report["results"] = std::move(results);

  ensure_dir(g.out_dir);
  const fs::path report_path = o.out.empty() ? default_output(g, "report.json") : fs::path(o.out);
  const fs::path table_path = sibling(report_path, ".csv");
  const fs::path dist_path = sibling(report_path, "_distribution.svg");
  const fs::path smooth_path = sibling(report_path, "_smoothness.svg");
  write_text(report_path, report.dump(2) + "\n");
  write_text(table_path, table.str());

  const auto frames = region_frames(gt, gt, region);
  std::vector<Density> panels;
  auto yz = [&](const Trajectory& t) {
    std::vector<std::pair<double, double>> pts;
    for (auto i : frames) pts.emplace_back(t[i][1], t[i][2]);
    return pts;
  };
  panels.push_back({"ground truth", yz(gt)});
  for (std::size_t i = 0; i < preds.size(); ++i) panels.push_back({preds[i].label, yz(trajs[i])});
  write_text(dist_path, density_panels_svg("Distribution of (ry, rz)", panels, "ry [rad]", "rz [rad]"));

  std::vector<Series> bars;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const auto& s = reports[i].sparc_abs;
    bars.push_back({preds[i].label, {s[0], s[1], s[2]}});
  }
  write_text(smooth_path, grouped_bars_svg("|SPARC| per channel (" + region_name(region) + ")", {"X", "Y", "Z"},
                                           bars, "|SPARC|"));

  Manifest m("evaluate");
  m.params() = global_params(g);
  m.params()["region"] = region_name(region);
  m.params()["kl_mode"] = o.kl_mode;
  m.params()["jobs"] = o.jobs;
  Json labels = Json::array();
  for (const auto& p : preds) labels.push_back(p.label);
  m.params()["labels"] = labels;
  m.add_input(o.gt);
  for (const auto& p : preds) m.add_input(p.path);
  m.add_output(report_path);
  m.add_output(table_path);
  m.add_output(dist_path);
  m.add_output(smooth_path);
  m.write(g.out_dir);
  out << table.str();
  return kExitOk;
}

struct SweepOpts {
  std::vector<std::string> data;
  std::vector<std::string> test;
  std::vector<std::string> archs{"150-300-60", "150-3000-180", "150-3000-3000"};
  std::vector<double> input_dropout{0.0, 0.5};
  double val_split = 0.2;
  int epochs = 100;
  double lr = 1e-4;
  int batch_size = 64;
  int patience = 20;
  std::string noise = "none";
  std::string out;
};

int cmd_sweep(const Global& g, const SweepOpts& o, std::ostream& out) {
  for (const auto& a : o.archs) {
    try {
      parse_arch(a);
    } catch (const DataError& e) {
      throw UsageError(std::string("--archs: ") + e.what());
    }
  }
  SweepConfig cfg;
  cfg.archs = o.archs;
  cfg.input_dropout_rates = o.input_dropout;
  cfg.train.learning_rate = o.lr;
  cfg.train.batch_size = o.batch_size;
  cfg.train.epochs = o.epochs;
  cfg.train.early_stop_patience = o.patience;
  cfg.train.seed = g.seed;
  cfg.train.noise = parse_noise_flag("--noise", o.noise);
  cfg.dropout_noise.seed = g.seed;
  cfg.gaussian_noise.seed = g.seed;

  const auto files = expand_inputs(o.data);
  const auto test_files = expand_inputs(o.test);
  const Split split = split_data(files, o.val_split);
  const TrainData data = prepare_training_data(split.train, split.val);
  std::vector<Window> test;
  for (const auto& f : test_files) {
    auto seg = segment_windows(normalize(read_trajectory(f), data.norm_stats));
    std::move(seg.windows.begin(), seg.windows.end(), std::back_inserter(test));
  }
  const SweepResult result = run_sweep(data, test, cfg);
  const std::string csv = sweep_csv(result);

  ensure_dir(g.out_dir);
  const fs::path path = o.out.empty() ? default_output(g, "sweep.csv") : fs::path(o.out);
  write_text(path, csv);

  Manifest m("sweep");
  m.params() = global_params(g);
  m.params()["archs"] = o.archs;
  m.params()["input_dropout"] = o.input_dropout;
  m.params()["epochs"] = o.epochs;
  m.params()["lr"] = o.lr;
  m.params()["batch_size"] = o.batch_size;
  m.params()["patience"] = o.patience;
  m.params()["noise"] = cfg.train.noise.to_string();
  for (const auto& f : files) m.add_input(f);
  for (const auto& f : test_files) m.add_input(f);
  m.add_output(path);
  m.write(g.out_dir);
  out << csv;
  return kExitOk;
}

}  // namespace
}  // namespace hm::cli

namespace hm {

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  using namespace hm::cli;

  CLI::App app{"Head-motion trajectory denoising and evaluation", "headmotion"};
  app.require_subcommand(1);
  app.fallthrough();

  Global g;
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--sample-rate", g.sample_rate, "Sample rate in Hz for generated trajectories")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--out-dir", g.out_dir, "Directory for outputs and the run manifest")->capture_default_str();
  app.add_option("--format", g.format, "Trajectory output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  SynthOpts synth;
  auto* s_synth = app.add_subcommand("synth", "Write seeded synthetic trajectories");
  s_synth->add_option("--duration", synth.duration, "Seconds per trajectory")->capture_default_str();
  s_synth->add_option("--count", synth.count, "Number of trajectories")->capture_default_str();

  CorruptOpts corrupt;
  auto* s_corrupt = app.add_subcommand("corrupt", "Apply a noise chain to a trajectory");
  s_corrupt->add_option("--in", corrupt.in, "Input trajectory")->required()->check(CLI::ExistingFile);
  s_corrupt->add_option("--noise", corrupt.noise, "Noise chain, e.g. dropout:0.5, gauss:0.2, prediction")
      ->required();
  s_corrupt->add_option("--out", corrupt.out, "Output trajectory");

  TrainOpts tr;
  auto* s_train = app.add_subcommand("train", "Train a denoising autoencoder");
  s_train->add_option("--data", tr.data, "Trajectory files or directories")->required();
  s_train->add_option("--val-split", tr.val_split, "Fraction held out for validation")->capture_default_str();
  s_train->add_option("--arch", tr.arch, "Encoder widths; the decoder mirrors them")->capture_default_str();
  s_train->add_option("--epochs", tr.epochs)->capture_default_str();
  s_train->add_option("--lr", tr.lr, "Adam learning rate")->capture_default_str();
  s_train->add_option("--batch-size", tr.batch_size)->capture_default_str();
  s_train->add_option("--noise", tr.noise, "Input corruption: none, dropout:0.5, gauss:0.2 or a mixture")
      ->capture_default_str();
  s_train->add_option("--input-dropout", tr.input_dropout, "Dropout rate on the input layer")->capture_default_str();
  s_train->add_option("--activation", tr.activation)
      ->check(CLI::IsMember({"tanh", "relu"}))
      ->capture_default_str();
  s_train->add_option("--patience", tr.patience, "Early-stopping patience in epochs, 0 disables")
      ->capture_default_str();
  s_train->add_option("--out", tr.out, "Model file");
  s_train->add_flag("--quiet", tr.quiet, "Do not print per-epoch losses");

  FilterOpts fo;
  auto* s_filter = app.add_subcommand("filter", "Filter a trajectory with a model or a linear smoother");
  auto* o_model = s_filter->add_option("--model", fo.model, "Model JSON")->check(CLI::ExistingFile);
  auto* o_linear = s_filter->add_option("--linear", fo.linear, "gaussian:SIGMA or mva:WIDTH");
  o_model->excludes(o_linear);
  s_filter->add_option("--in", fo.in, "Input trajectory")->required()->check(CLI::ExistingFile);
  s_filter->add_option("--out", fo.out, "Output trajectory");

  CalibrateOpts co;
  auto* s_cal = app.add_subcommand("calibrate", "Match a linear filter's high-frequency ratio to a reference");
  s_cal->add_option("--kind", co.kind)
      ->required()
      ->check(CLI::IsMember({"gaussian", "mva", "moving_average"}));
  s_cal->add_option("--reference", co.reference, "Trajectory after the reference filter")
      ->required()
      ->check(CLI::ExistingFile);
  s_cal->add_option("--noisy", co.noisy, "Trajectory before filtering")->required()->check(CLI::ExistingFile);
  s_cal->add_option("--out", co.out, "Calibration JSON");

  ImpulseOpts io;
  auto* s_imp = app.add_subcommand("impulse", "Probe a filter with a single-frame spike");
  s_imp->add_option("--filter", io.filter, "Model JSON, gaussian:SIGMA or mva:WIDTH")->required();
  s_imp->add_option("--channel", io.channel)->check(CLI::IsMember({"rx", "ry", "rz"}))->capture_default_str();
  s_imp->add_option("--len", io.len, "Probe length in frames")->capture_default_str();
  s_imp->add_option("--amplitude", io.amplitude)->capture_default_str();
  s_imp->add_option("--out", io.out, "Response trajectory (.csv)");

  EvaluateOpts eo;
  auto* s_eval = app.add_subcommand("evaluate", "Score filtered trajectories against ground truth");
  s_eval->add_option("--pred", eo.pred, "Prediction, as path or label=path (repeatable)")->required();
  s_eval->add_option("--gt", eo.gt, "Ground-truth trajectory")->required()->check(CLI::ExistingFile);
  s_eval->add_option("--region", eo.region)
      ->check(CLI::IsMember({"full", "speaking", "speaking_only"}))
      ->capture_default_str();
  s_eval->add_option("--kl-mode", eo.kl_mode, "joint (ry, rz) histogram or per-channel mean")
      ->check(CLI::IsMember({"joint", "per-channel"}))
      ->capture_default_str();
  s_eval->add_option("--out", eo.out, "Report JSON");
  s_eval->add_option("--jobs", eo.jobs, "Files evaluated in parallel")->capture_default_str();

  SweepOpts so;
  auto* s_sweep = app.add_subcommand("sweep", "Train and score a grid of architectures");
  s_sweep->add_option("--data", so.data, "Training trajectories")->required();
  s_sweep->add_option("--test", so.test, "Held-out test trajectories")->required();
  s_sweep->add_option("--archs", so.archs)->delimiter(',')->capture_default_str();
  s_sweep->add_option("--input-dropout", so.input_dropout, "Input dropout rates to try")
      ->delimiter(',')
      ->capture_default_str();
  s_sweep->add_option("--val-split", so.val_split)->capture_default_str();
  s_sweep->add_option("--epochs", so.epochs)->capture_default_str();
  s_sweep->add_option("--lr", so.lr)->capture_default_str();
  s_sweep->add_option("--batch-size", so.batch_size)->capture_default_str();
  s_sweep->add_option("--patience", so.patience)->capture_default_str();
  s_sweep->add_option("--noise", so.noise)->capture_default_str();
  s_sweep->add_option("--out", so.out, "Grid CSV");

  std::vector<const char*> argv{"headmotion"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (s_synth->parsed()) return cmd_synth(g, synth, out);
    if (s_corrupt->parsed()) return cmd_corrupt(g, corrupt, out);
    if (s_train->parsed()) return cmd_train(g, tr, out);
    if (s_filter->parsed()) return cmd_filter(g, fo, out);
    if (s_cal->parsed()) return cmd_calibrate(g, co, out);
    if (s_imp->parsed()) return cmd_impulse(g, io, out);
    if (s_eval->parsed()) return cmd_evaluate(g, eo, out);
    if (s_sweep->parsed()) return cmd_sweep(g, so, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const TrainingDiverged& e) {
    err << "training failed: " << e.what() << '\n';
    return kExitTraining;
  } catch (const CalibrationError& e) {
    err << "calibration failed: " << e.what() << '\n';
    return kExitCalibration;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace hm
