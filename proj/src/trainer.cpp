#include "headmotion/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "headmotion/error.hpp"

namespace hm {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw DataError("learning rate must be positive");
  if (batch_size < 1) throw DataError("batch size must be positive");
  if (epochs < 1) throw DataError("epochs must be positive");
  if (!(adam_beta1 > 0.0 && adam_beta1 < 1.0) || !(adam_beta2 > 0.0 && adam_beta2 < 1.0)) {
    throw DataError("Adam betas must lie in (0, 1)");
  }
  if (!(adam_epsilon > 0.0)) throw DataError("Adam epsilon must be positive");
  if (!(input_dropout_rate >= 0.0 && input_dropout_rate < 1.0)) {
    throw DataError("input dropout rate must be in [0, 1)");
  }
}

TrainData prepare_training_data(std::span<const Trajectory> train_trajs,
                                std::span<const Trajectory> val_trajs) {
  TrainData data;
  data.norm_stats = compute_stats(train_trajs);
  data.sample_rate = train_trajs.front().sample_rate();
  auto cut = [&](std::span<const Trajectory> trajs, std::vector<Window>& out) {
    for (const auto& t : trajs) {
      if (std::abs(t.sample_rate() - data.sample_rate) > 1e-9) {
        throw DataError("training trajectories have different sample rates");
      }
      auto seg = segment_windows(normalize(t, data.norm_stats));
      std::move(seg.windows.begin(), seg.windows.end(), std::back_inserter(out));
    }
  };
  cut(train_trajs, data.train);
  cut(val_trajs, data.val);
  return data;
}

namespace {

struct AdamState {
  std::vector<Eigen::MatrixXd> mw, vw;
  std::vector<Eigen::RowVectorXd> mb, vb;
  long step = 0;

  explicit AdamState(const MlpModel& m) {
    for (const auto& l : m.layers) {
      mw.push_back(Eigen::MatrixXd::Zero(l.weights.rows(), l.weights.cols()));
      vw.push_back(Eigen::MatrixXd::Zero(l.weights.rows(), l.weights.cols()));
      mb.push_back(Eigen::RowVectorXd::Zero(l.bias.size()));
      vb.push_back(Eigen::RowVectorXd::Zero(l.bias.size()));
    }
  }
};

template <typename Param, typename Grad, typename Moment>
void adam_update(Param& p, const Grad& g, Moment& m, Moment& v, double b1, double b2,
                 double step_size, double eps_hat) {
  m = b1 * m + (1.0 - b1) * g;
  v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
  p.array() -= step_size * m.array() / (v.array().sqrt() + eps_hat);
}

void adam_step(MlpModel& model, const Gradients& g, AdamState& s, const TrainConfig& cfg) {
  ++s.step;
  const double b1 = cfg.adam_beta1;
  const double b2 = cfg.adam_beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(s.step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(s.step));
  // lr * mhat / (sqrt(vhat) + eps) rewritten with the corrections folded in.
  const double step_size = cfg.learning_rate * std::sqrt(c2) / c1;
  const double eps_hat = cfg.adam_epsilon * std::sqrt(c2);
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    adam_update(model.layers[i].weights, g.weights[i], s.mw[i], s.vw[i], b1, b2, step_size, eps_hat);
    adam_update(model.layers[i].bias, g.biases[i], s.mb[i], s.vb[i], b1, b2, step_size, eps_hat);
  }
}

double evaluate_loss(const MlpModel& model, const Eigen::MatrixXd& inputs,
                     const Eigen::MatrixXd& targets, const Eigen::RowVectorXd& variance) {
  constexpr Eigen::Index kChunk = 1024;
  double total = 0.0;
  for (Eigen::Index start = 0; start < inputs.rows(); start += kChunk) {
    const Eigen::Index n = std::min(kChunk, inputs.rows() - start);
    total += loss(forward(model, inputs.middleRows(start, n)), targets.middleRows(start, n), variance) *
             static_cast<double>(n);
  }
  return total / static_cast<double>(inputs.rows());
}

constexpr std::uint64_t kShuffleStream = 1;
constexpr std::uint64_t kValNoiseStream = 2;
constexpr std::uint64_t kInitStream = 3;

}  // namespace

TrainResult train(const TrainData& data, const TrainConfig& cfg,
                  const std::vector<int>& layer_sizes, const EpochCallback& on_epoch) {
  cfg.validate();
  if (data.train.size() < 2 * static_cast<std::size_t>(cfg.batch_size)) {
    throw DataError("need at least " + std::to_string(2 * cfg.batch_size) +
                    " training windows, got " + std::to_string(data.train.size()));
  }
  if (data.val.empty()) throw DataError("validation set is empty");

  MlpModel model = init_model(layer_sizes, cfg.hidden_activation, cfg.input_dropout_rate,
                              derive_seed(cfg.seed, kInitStream));
  model.norm_stats = data.norm_stats;
  model.sample_rate = data.sample_rate;

  const Eigen::MatrixXd train_x = to_batch(data.train);
  const Eigen::MatrixXd val_y = to_batch(data.val);
  if (train_x.cols() != model.input_dim() || val_y.cols() != model.input_dim() ||
      model.output_dim() != model.input_dim()) {
    throw DataError("dimension mismatch: windows have " + std::to_string(train_x.cols()) +
                    " components, model maps " + std::to_string(model.input_dim()) + " -> " +
                    std::to_string(model.output_dim()));
  }
  const Eigen::RowVectorXd variance =
      component_variance(channel_variance(train_x), static_cast<int>(train_x.cols()));
  if ((variance.array() <= 0.0).any()) throw DataError("training targets have zero variance");

  // Validation inputs are corrupted once with a fixed stream so the loss is
  // comparable across epochs.
  Eigen::MatrixXd val_x = val_y;
  {
    Rng rng = make_rng(derive_seed(cfg.seed, kValNoiseStream));
    for (Eigen::Index i = 0; i < val_x.rows(); ++i) {
      Eigen::RowVectorXd row = val_x.row(i);
      cfg.noise.apply(std::span<double>(row.data(), static_cast<std::size_t>(row.size())), rng);
      val_x.row(i) = row;
    }
  }

  TrainResult result;
  TrainHistory& h = result.history;
  h.initial_val_loss = evaluate_loss(model, val_x, val_y, variance);
  result.model = model;
  double best = h.initial_val_loss;

  AdamState adam(model);
  const auto n = static_cast<Eigen::Index>(train_x.rows());
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng rng = make_rng(derive_seed(derive_seed(cfg.seed, kShuffleStream), epoch));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);

    double epoch_loss = 0.0;
    for (Eigen::Index start = 0; start < n; start += cfg.batch_size) {
      const Eigen::Index rows = std::min<Eigen::Index>(cfg.batch_size, n - start);
      Eigen::MatrixXd targets(rows, train_x.cols());
      for (Eigen::Index r = 0; r < rows; ++r) targets.row(r) = train_x.row(order[start + r]);
      Eigen::MatrixXd inputs = targets;
      for (Eigen::Index r = 0; r < rows; ++r) {
        Eigen::RowVectorXd row = inputs.row(r);
        cfg.noise.apply(std::span<double>(row.data(), static_cast<std::size_t>(row.size())), rng);
        inputs.row(r) = row;
      }
      Eigen::MatrixXd mask;
      const Eigen::MatrixXd* mask_ptr = nullptr;
      if (model.input_dropout_rate > 0.0) {
        mask = sample_dropout_mask(rows, inputs.cols(), model.input_dropout_rate, rng);
        mask_ptr = &mask;
      }
      const Gradients g = backward(model, inputs, targets, variance, mask_ptr);
      if (!std::isfinite(g.loss)) throw TrainingDiverged(epoch + 1, g.loss);
      epoch_loss += g.loss * static_cast<double>(rows);
      adam_step(model, g, adam, cfg);
    }
    epoch_loss /= static_cast<double>(n);

    const double val = evaluate_loss(model, val_x, val_y, variance);
    if (!std::isfinite(val)) throw TrainingDiverged(epoch + 1, val);
    h.train_loss.push_back(epoch_loss);
    h.val_loss.push_back(val);
    if (on_epoch) on_epoch(epoch, epoch_loss, val);

    if (h.best_epoch < 0 || val < best) {
      best = val;
      h.best_epoch = epoch;
      result.model = model;
    }
    if (cfg.early_stop_patience > 0 && epoch - h.best_epoch >= cfg.early_stop_patience) break;
  }
  return result;
}

}  // namespace hm
