#include "headmotion/mlp.hpp"

#include <charconv>
#include <cmath>

#include <Eigen/Dense>

#include "headmotion/error.hpp"

namespace hm {

std::string activation_name(Activation a) {
  switch (a) {
    case Activation::tanh: return "tanh";
    case Activation::relu: return "relu";
    case Activation::linear: return "linear";
  }
  return "?";
}

Activation parse_activation(const std::string& name) {
  if (name == "tanh") return Activation::tanh;
  if (name == "relu") return Activation::relu;
  if (name == "linear") return Activation::linear;
  throw DataError("unknown activation '" + name + "'");
}

std::vector<int> MlpModel::layer_sizes() const {
  std::vector<int> sizes;
  if (layers.empty()) return sizes;
  sizes.push_back(static_cast<int>(layers.front().weights.rows()));
  for (const auto& l : layers) sizes.push_back(static_cast<int>(l.weights.cols()));
  return sizes;
}

int MlpModel::input_dim() const {
  return layers.empty() ? 0 : static_cast<int>(layers.front().weights.rows());
}

int MlpModel::output_dim() const {
  return layers.empty() ? 0 : static_cast<int>(layers.back().weights.cols());
}

std::size_t MlpModel::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.weights.size() + l.bias.size();
  return n;
}

void MlpModel::validate() const {
  if (layers.empty()) throw DataError("dimension mismatch: model has no layers");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& l = layers[i];
    const std::string name = "layer " + std::to_string(i);
    if (l.weights.rows() == 0 || l.weights.cols() == 0) {
      throw DataError("dimension mismatch: " + name + " has an empty weight matrix");
    }
    if (l.bias.size() != l.weights.cols()) {
      throw DataError("dimension mismatch: " + name + " bias has " + std::to_string(l.bias.size()) +
                      " entries, expected " + std::to_string(l.weights.cols()));
    }
    if (i > 0 && l.weights.rows() != layers[i - 1].weights.cols()) {
      throw DataError("dimension mismatch: " + name + " expects " +
                      std::to_string(l.weights.rows()) + " inputs but the previous layer emits " +
                      std::to_string(layers[i - 1].weights.cols()));
    }
    if (!l.weights.allFinite() || !l.bias.allFinite()) {
      throw DataError("non-finite parameter in " + name);
    }
  }
  if (!(input_dropout_rate >= 0.0 && input_dropout_rate < 1.0)) {
    throw DataError("input dropout rate must be in [0, 1)");
  }
}

std::vector<int> parse_arch(const std::string& arch) {
  std::vector<int> encoder;
  std::size_t pos = 0;
  while (pos <= arch.size()) {
    const auto dash = arch.find('-', pos);
    const std::string tok = arch.substr(pos, dash == std::string::npos ? std::string::npos : dash - pos);
    int v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size() || v <= 0) {
      throw DataError("malformed architecture '" + arch + "'");
    }
    encoder.push_back(v);
    if (dash == std::string::npos) break;
    pos = dash + 1;
  }
  if (encoder.size() < 2) throw DataError("malformed architecture '" + arch + "': need >= 2 widths");
  std::vector<int> sizes = encoder;
  for (auto it = encoder.rbegin() + 1; it != encoder.rend(); ++it) sizes.push_back(*it);
  return sizes;
}

std::string arch_name(const std::vector<int>& sizes) {
  const std::size_t n = sizes.size();
  bool mirrored = n >= 3 && n % 2 == 1;
  for (std::size_t i = 0; mirrored && i < n / 2; ++i) mirrored = sizes[i] == sizes[n - 1 - i];
  const std::size_t shown = mirrored ? n / 2 + 1 : n;
  std::string out;
  for (std::size_t i = 0; i < shown; ++i) {
    if (i) out += '-';
    out += std::to_string(sizes[i]);
  }
  return out;
}

MlpModel init_model(const std::vector<int>& sizes, Activation hidden, double input_dropout_rate,
                    std::uint64_t seed) {
  if (sizes.size() < 2) throw DataError("dimension mismatch: need at least two layer sizes");
  Rng rng = make_rng(seed);
  MlpModel m;
  m.hidden_activation = hidden;
  m.input_dropout_rate = input_dropout_rate;
  for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
    if (sizes[i] <= 0 || sizes[i + 1] <= 0) throw DataError("layer sizes must be positive");
    const double limit = std::sqrt(6.0 / (sizes[i] + sizes[i + 1]));
    std::uniform_real_distribution<double> u(-limit, limit);
    DenseLayer l;
    l.weights.resize(sizes[i], sizes[i + 1]);
    // Row-major fill so the draw order matches the serialized layout.
    for (Eigen::Index r = 0; r < l.weights.rows(); ++r)
      for (Eigen::Index c = 0; c < l.weights.cols(); ++c) l.weights(r, c) = u(rng);
    l.bias = Eigen::RowVectorXd::Zero(sizes[i + 1]);
    m.layers.push_back(std::move(l));
  }
  m.validate();
  return m;
}

Eigen::MatrixXd to_batch(std::span<const Window> windows) {
  if (windows.empty()) return {};
  const auto dim = static_cast<Eigen::Index>(windows.front().dim());
  Eigen::MatrixXd b(static_cast<Eigen::Index>(windows.size()), dim);
  for (std::size_t i = 0; i < windows.size(); ++i) {
    if (static_cast<Eigen::Index>(windows[i].dim()) != dim) {
      throw DataError("dimension mismatch: windows of different lengths");
    }
    for (Eigen::Index j = 0; j < dim; ++j) b(static_cast<Eigen::Index>(i), j) = windows[i].values()[j];
  }
  return b;
}

std::vector<Window> from_batch(const Eigen::MatrixXd& batch) {
  std::vector<Window> out;
  out.reserve(batch.rows());
  for (Eigen::Index i = 0; i < batch.rows(); ++i) {
    std::vector<double> v(batch.cols());
    for (Eigen::Index j = 0; j < batch.cols(); ++j) v[j] = batch(i, j);
    out.emplace_back(std::move(v));
  }
  return out;
}

namespace {

void activate(Eigen::MatrixXd& z, Activation a) {
  switch (a) {
    case Activation::tanh: z = z.array().tanh(); break;
    case Activation::relu: z = z.array().max(0.0); break;
    case Activation::linear: break;
  }
}

// Multiplies `grad` in place by the activation derivative, expressed through
// the layer's pre-activation `z` and output `a`.
void apply_derivative(Eigen::MatrixXd& grad, const Eigen::MatrixXd& z, const Eigen::MatrixXd& a,
                      Activation act) {
  switch (act) {
    case Activation::tanh: grad.array() *= 1.0 - a.array().square(); break;
    case Activation::relu: grad.array() *= (z.array() > 0.0).cast<double>(); break;
    case Activation::linear: break;
  }
}

void check_input(const MlpModel& model, const Eigen::MatrixXd& inputs) {
  if (model.layers.empty()) throw DataError("dimension mismatch: model has no layers");
  if (inputs.cols() != model.input_dim()) {
    throw DataError("dimension mismatch: input has " + std::to_string(inputs.cols()) +
                    " components, model expects " + std::to_string(model.input_dim()));
  }
}

Eigen::MatrixXd masked_input(const MlpModel& model, const Eigen::MatrixXd& inputs,
                             const Eigen::MatrixXd* mask) {
  if (mask == nullptr) return inputs;
  if (mask->rows() != inputs.rows() || mask->cols() != inputs.cols()) {
    throw DataError("dimension mismatch: dropout mask shape");
  }
  return inputs.cwiseProduct(*mask) / (1.0 - model.input_dropout_rate);
}

}  // namespace

Eigen::MatrixXd forward(const MlpModel& model, const Eigen::MatrixXd& inputs) {
  check_input(model, inputs);
  Eigen::MatrixXd a = inputs;
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    const auto& l = model.layers[i];
    Eigen::MatrixXd z = a * l.weights;
    z.rowwise() += l.bias;
    if (i + 1 < model.layers.size()) activate(z, model.hidden_activation);
    a = std::move(z);
  }
  return a;
}

Window forward(const MlpModel& model, const Window& input) {
  const std::vector<Window> in{input};
  return from_batch(forward(model, to_batch(in))).front();
}

Eigen::RowVectorXd component_variance(const Frame& channel_var, int dim) {
  Eigen::RowVectorXd v(dim);
  for (int j = 0; j < dim; ++j) v(j) = channel_var[j % kChannels];
  return v;
}

Frame channel_variance(const Eigen::MatrixXd& batch) {
  Frame var{0.0, 0.0, 0.0};
  for (int c = 0; c < kChannels; ++c) {
    double sum = 0.0;
    double sq = 0.0;
    std::size_t n = 0;
    for (Eigen::Index j = c; j < batch.cols(); j += kChannels) {
      sum += batch.col(j).sum();
      n += static_cast<std::size_t>(batch.rows());
    }
    const double mean = n ? sum / static_cast<double>(n) : 0.0;
    for (Eigen::Index j = c; j < batch.cols(); j += kChannels) {
      sq += (batch.col(j).array() - mean).square().sum();
    }
    var[c] = n ? sq / static_cast<double>(n) : 0.0;
  }
  return var;
}

double loss(const Eigen::MatrixXd& predicted, const Eigen::MatrixXd& target,
            const Eigen::RowVectorXd& target_variance) {
  if (predicted.rows() != target.rows() || predicted.cols() != target.cols() ||
      target_variance.size() != target.cols()) {
    throw DataError("dimension mismatch: loss operands differ in shape");
  }
  if (predicted.size() == 0) throw DataError("empty batch");
  if ((target_variance.array() <= 0.0).any()) throw DataError("target variance must be positive");
  const Eigen::MatrixXd diff = predicted - target;
  const double total =
      (diff.array().square().rowwise() / target_variance.array()).sum();
  return total / static_cast<double>(predicted.size());
}

double loss(const Eigen::MatrixXd& predicted, const Eigen::MatrixXd& target,
            double target_variance) {
  return loss(predicted, target,
              Eigen::RowVectorXd::Constant(target.cols(), target_variance));
}

Eigen::MatrixXd sample_dropout_mask(Eigen::Index rows, Eigen::Index cols, double rate, Rng& rng) {
  std::bernoulli_distribution keep(1.0 - rate);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = keep(rng) ? 1.0 : 0.0;
  return m;
}

double training_loss(const MlpModel& model, const Eigen::MatrixXd& inputs,
                     const Eigen::MatrixXd& targets, const Eigen::RowVectorXd& target_variance,
                     const Eigen::MatrixXd* input_mask) {
  check_input(model, inputs);
  return loss(forward(model, masked_input(model, inputs, input_mask)), targets, target_variance);
}

Gradients backward(const MlpModel& model, const Eigen::MatrixXd& inputs,
                   const Eigen::MatrixXd& targets, const Eigen::RowVectorXd& target_variance,
                   const Eigen::MatrixXd* input_mask) {
  check_input(model, inputs);
  if (inputs.rows() == 0) throw DataError("empty batch");
  const std::size_t depth = model.layers.size();

  // Forward, keeping every pre-activation and activation.
  std::vector<Eigen::MatrixXd> acts(depth + 1);
  std::vector<Eigen::MatrixXd> pre(depth);
  acts[0] = masked_input(model, inputs, input_mask);
  for (std::size_t i = 0; i < depth; ++i) {
    const auto& l = model.layers[i];
    pre[i] = acts[i] * l.weights;
    pre[i].rowwise() += l.bias;
    acts[i + 1] = pre[i];
    if (i + 1 < depth) activate(acts[i + 1], model.hidden_activation);
  }

  Gradients g;
  g.loss = loss(acts[depth], targets, target_variance);
  g.weights.resize(depth);
  g.biases.resize(depth);

  const double scale = 2.0 / static_cast<double>(targets.size());
  Eigen::MatrixXd delta =
      ((acts[depth] - targets).array().rowwise() / target_variance.array()).matrix() * scale;
  for (std::size_t k = depth; k-- > 0;) {
    if (k + 1 < depth) apply_derivative(delta, pre[k], acts[k + 1], model.hidden_activation);
    g.weights[k].noalias() = acts[k].transpose() * delta;
    g.biases[k] = delta.colwise().sum();
    if (k > 0) delta = delta * model.layers[k].weights.transpose();
  }
  return g;
}

}  // namespace hm
