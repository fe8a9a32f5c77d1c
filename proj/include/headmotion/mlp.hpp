#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "headmotion/random.hpp"
#include "headmotion/trajectory.hpp"

namespace hm {

enum class Activation { tanh, relu, linear };

std::string activation_name(Activation a);
Activation parse_activation(const std::string& name);

/// Affine map y = x W + b applied to row vectors; W is fan_in x fan_out.
struct DenseLayer {
  Eigen::MatrixXd weights;
  Eigen::RowVectorXd bias;
};

/// Fully connected autoencoder: hidden layers use `hidden_activation`, the
/// output layer is linear. `norm_stats` and `sample_rate` record the data
/// space the network was trained in.
struct MlpModel {
  static constexpr int kFormatVersion = 1;

  std::vector<DenseLayer> layers;
  Activation hidden_activation = Activation::tanh;
  double input_dropout_rate = 0.0;
  NormStats norm_stats;
  double sample_rate = kDefaultSampleRate;

  std::vector<int> layer_sizes() const;
  int input_dim() const;
  int output_dim() const;
  std::size_t parameter_count() const;

  /// Throws DataError naming the first inconsistent layer or non-finite value.
  void validate() const;
};

/// "150-3000-180" lists the encoder widths; the decoder mirrors them, giving
/// {150, 3000, 180, 3000, 150}. Throws DataError on malformed text.
std::vector<int> parse_arch(const std::string& arch);

/// Inverse of parse_arch for mirrored layouts; falls back to the full list.
std::string arch_name(const std::vector<int>& layer_sizes);

/// Glorot-uniform weights, zero biases.
MlpModel init_model(const std::vector<int>& layer_sizes, Activation hidden,
                    double input_dropout_rate, std::uint64_t seed);

/// One row per sample.
Eigen::MatrixXd to_batch(std::span<const Window> windows);
std::vector<Window> from_batch(const Eigen::MatrixXd& batch);

/// Inference pass: no input dropout.
Eigen::MatrixXd forward(const MlpModel& model, const Eigen::MatrixXd& inputs);
Window forward(const MlpModel& model, const Window& input);

/// Expands per-channel variances to the frame-major component layout.
Eigen::RowVectorXd component_variance(const Frame& channel_variance, int dim);

/// Per-channel variance of frame-major rows.
Frame channel_variance(const Eigen::MatrixXd& batch);

/// Mean over samples and components of squared error divided by the
/// variance of that component.
double loss(const Eigen::MatrixXd& predicted, const Eigen::MatrixXd& target,
            const Eigen::RowVectorXd& target_variance);
double loss(const Eigen::MatrixXd& predicted, const Eigen::MatrixXd& target,
            double target_variance);

struct Gradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::RowVectorXd> biases;
  double loss = 0.0;
};

/// Bernoulli keep-mask (1 = keep) for input dropout.
Eigen::MatrixXd sample_dropout_mask(Eigen::Index rows, Eigen::Index cols, double rate, Rng& rng);

/// Exact gradient of `loss` with respect to every weight and bias. When
/// `input_mask` is given the inputs are multiplied by mask / (1 - rate)
/// before the first layer (inverted dropout) and the mask is held fixed.
Gradients backward(const MlpModel& model, const Eigen::MatrixXd& inputs,
                   const Eigen::MatrixXd& targets, const Eigen::RowVectorXd& target_variance,
                   const Eigen::MatrixXd* input_mask = nullptr);

/// Loss of the training-mode forward pass with a fixed input mask.
double training_loss(const MlpModel& model, const Eigen::MatrixXd& inputs,
                     const Eigen::MatrixXd& targets, const Eigen::RowVectorXd& target_variance,
                     const Eigen::MatrixXd* input_mask = nullptr);

}  // namespace hm
