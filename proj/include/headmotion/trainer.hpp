#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "headmotion/mlp.hpp"
#include "headmotion/noise.hpp"
#include "headmotion/trajectory.hpp"

namespace hm {

struct TrainConfig {
  double learning_rate = 1e-4;
  int batch_size = 64;
  int epochs = 100;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::uint64_t seed = 0;
  /// Corruption applied to training inputs each epoch (targets stay clean).
  /// Empty means plain reconstruction training.
  NoiseRecipe noise;
  int early_stop_patience = 20;  // epochs without validation improvement; <= 0 disables
  Activation hidden_activation = Activation::tanh;
  double input_dropout_rate = 0.0;

  void validate() const;
};

struct TrainHistory {
  std::vector<double> train_loss;  // mean over the epoch's mini-batches
  std::vector<double> val_loss;    // after the epoch
  double initial_val_loss = 0.0;   // before the first update
  int best_epoch = -1;             // 0-based index into val_loss
};

/// Windows in normalized space plus the statistics that produced them.
struct TrainData {
  std::vector<Window> train;
  std::vector<Window> val;
  NormStats norm_stats;
  double sample_rate = kDefaultSampleRate;
};

/// Normalizes with statistics of `train_trajs` and cuts 50/25 windows.
TrainData prepare_training_data(std::span<const Trajectory> train_trajs,
                                std::span<const Trajectory> val_trajs);

struct TrainResult {
  MlpModel model;  // parameters at the best validation epoch
  TrainHistory history;
};

using EpochCallback = std::function<void(int epoch, double train_loss, double val_loss)>;

/// Mini-batch Adam on the variance-normalized reconstruction loss. Runs are
/// bit-reproducible for a fixed seed. Throws TrainingDiverged when a loss
/// becomes non-finite.
TrainResult train(const TrainData& data, const TrainConfig& config,
                  const std::vector<int>& layer_sizes, const EpochCallback& on_epoch = {});

}  // namespace hm
