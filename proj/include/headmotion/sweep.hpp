#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "headmotion/mlp.hpp"
#include "headmotion/noise.hpp"
#include "headmotion/trainer.hpp"

namespace hm {

/// Copies of `windows`, window i corrupted by `spec` reseeded with
/// derive_seed(seed, i).
std::vector<Window> corrupt_windows(std::span<const Window> windows, const NoiseSpec& spec,
                                    std::uint64_t seed);

/// Normalized MSE of `outputs` against `clean`, using the per-channel
/// variance of `clean` as the denominator.
double window_mse(std::span<const Window> outputs, std::span<const Window> clean);

/// Normalized MSE of the model's reconstruction of `noisy` against `clean`.
double model_window_mse(const MlpModel& model, std::span<const Window> noisy,
                        std::span<const Window> clean);

struct SweepConfig {
  std::vector<std::string> archs{"150-300-60", "150-3000-180", "150-3000-3000"};
  std::vector<double> input_dropout_rates{0.0, 0.5};
  TrainConfig train;  // input_dropout_rate is overridden per row
  NoiseSpec dropout_noise = NoiseSpec::dropout(0.5);
  NoiseSpec gaussian_noise = NoiseSpec::gaussian(0.2);
};

/// One row of the architecture grid: normalized MSE on dropout-noise (DN)
/// and Gaussian-noise (GN) corrupted windows, on the training windows and on
/// held-out test windows.
struct SweepRow {
  std::string arch;
  double input_dropout_rate = 0.0;
  double dn_train = 0.0;
  double dn_test = 0.0;
  double gn_train = 0.0;
  double gn_test = 0.0;
  int epochs_run = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  /// Unfiltered reference row: the corrupted windows scored as-is.
  SweepRow noisy;
};

/// Trains every (arch, input dropout) pair on `data` and scores it on the
/// two noise sets. `test` holds normalized clean windows; both noise sets
/// are drawn from config.train.seed so every row sees the same corruption.
SweepResult run_sweep(const TrainData& data, std::span<const Window> test,
                      const SweepConfig& config);

/// CSV with header arch,input_dropout,dn_train,dn_test,gn_train,gn_test,epochs;
/// the unfiltered row comes first with arch "noisy".
std::string sweep_csv(const SweepResult& result);

}  // namespace hm
