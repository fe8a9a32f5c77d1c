#include "headmotion/sweep.hpp"

#include <sstream>

#include "headmotion/error.hpp"
#include "headmotion/trajectory_csv.hpp"

namespace hm {

namespace {

constexpr std::uint64_t kDropoutTrainStream = 11;
constexpr std::uint64_t kDropoutTestStream = 12;
constexpr std::uint64_t kGaussTrainStream = 13;
constexpr std::uint64_t kGaussTestStream = 14;

}  // namespace

std::vector<Window> corrupt_windows(std::span<const Window> windows, const NoiseSpec& spec,
                                    std::uint64_t seed) {
  std::vector<Window> out;
  out.reserve(windows.size());
  for (std::size_t i = 0; i < windows.size(); ++i) {
    NoiseSpec s = spec;
    s.seed = derive_seed(seed, i);
    out.push_back(apply_noise(windows[i], s));
  }
  return out;
}

double window_mse(std::span<const Window> outputs, std::span<const Window> clean) {
  if (outputs.size() != clean.size() || clean.empty()) {
    throw DataError("window sets differ in size or are empty");
  }
  const Eigen::MatrixXd target = to_batch(clean);
  const Eigen::RowVectorXd var =
      component_variance(channel_variance(target), static_cast<int>(target.cols()));
  return loss(to_batch(outputs), target, var);
}

double model_window_mse(const MlpModel& model, std::span<const Window> noisy,
                        std::span<const Window> clean) {
  return window_mse(from_batch(forward(model, to_batch(noisy))), clean);
}

SweepResult run_sweep(const TrainData& data, std::span<const Window> test,
                      const SweepConfig& config) {
  const std::uint64_t seed = config.train.seed;
  const auto dn_train = corrupt_windows(data.train, config.dropout_noise, derive_seed(seed, kDropoutTrainStream));
  const auto dn_test = corrupt_windows(test, config.dropout_noise, derive_seed(seed, kDropoutTestStream));
  const auto gn_train = corrupt_windows(data.train, config.gaussian_noise, derive_seed(seed, kGaussTrainStream));
  const auto gn_test = corrupt_windows(test, config.gaussian_noise, derive_seed(seed, kGaussTestStream));

  SweepResult result;
  result.noisy.arch = "noisy";
  result.noisy.dn_train = window_mse(dn_train, data.train);
  result.noisy.dn_test = window_mse(dn_test, test);
  result.noisy.gn_train = window_mse(gn_train, data.train);
  result.noisy.gn_test = window_mse(gn_test, test);

  for (const auto& arch : config.archs) {
    const auto sizes = parse_arch(arch);
    for (double rate : config.input_dropout_rates) {
      TrainConfig cfg = config.train;
      cfg.input_dropout_rate = rate;
      const TrainResult trained = train(data, cfg, sizes);
      SweepRow row;
      row.arch = arch;
      row.input_dropout_rate = rate;
      row.dn_train = model_window_mse(trained.model, dn_train, data.train);
      row.dn_test = model_window_mse(trained.model, dn_test, test);
      row.gn_train = model_window_mse(trained.model, gn_train, data.train);
      row.gn_test = model_window_mse(trained.model, gn_test, test);
      row.epochs_run = static_cast<int>(trained.history.val_loss.size());
      result.rows.push_back(row);
    }
  }
  return result;
}

std::string sweep_csv(const SweepResult& result) {
  std::ostringstream os;
  os << "arch,input_dropout,dn_train,dn_test,gn_train,gn_test,epochs\n";
  auto line = [&](const SweepRow& r) {
    os << r.arch << ',' << format_double(r.input_dropout_rate) << ',' << format_double(r.dn_train) << ','
       << format_double(r.dn_test) << ',' << format_double(r.gn_train) << ',' << format_double(r.gn_test)
       << ',' << r.epochs_run << '\n';
  };
  line(result.noisy);
  for (const auto& r : result.rows) line(r);
  return os.str();
}

}  // namespace hm
