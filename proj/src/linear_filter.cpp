#include "headmotion/linear_filter.hpp"

#include <charconv>
#include <cmath>

#include "headmotion/error.hpp"
#include "headmotion/trajectory_csv.hpp"

namespace hm {

LinearFilterSpec LinearFilterSpec::gaussian(double sigma) {
  LinearFilterSpec s{LinearKind::gaussian, sigma};
  s.validate();
  return s;
}

LinearFilterSpec LinearFilterSpec::moving_average(int width) {
  LinearFilterSpec s{LinearKind::moving_average, static_cast<double>(width)};
  s.validate();
  return s;
}

void LinearFilterSpec::validate() const {
  if (!(param > 0.0) || !std::isfinite(param)) {
    throw DataError("filter parameter must be positive");
  }
  if (kind == LinearKind::moving_average) {
    if (param != std::floor(param) || static_cast<long>(param) % 2 == 0) {
      throw DataError("moving average width must be an odd integer >= 1");
    }
  }
}

std::string kind_name(LinearKind kind) {
  return kind == LinearKind::gaussian ? "gaussian" : "mva";
}

LinearFilterSpec LinearFilterSpec::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw DataError("filter spec needs kind:param, got '" + text + "'");
  const std::string kind = text.substr(0, colon);
  const std::string value = text.substr(colon + 1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw DataError("bad filter parameter '" + value + "'");
  }
  LinearFilterSpec spec;
  if (kind == "gaussian" || kind == "gauss") {
    spec.kind = LinearKind::gaussian;
  } else if (kind == "mva" || kind == "moving_average") {
    spec.kind = LinearKind::moving_average;
  } else {
    throw DataError("unknown filter kind '" + kind + "'");
  }
  spec.param = v;
  spec.validate();
  return spec;
}

std::string LinearFilterSpec::to_string() const {
  return kind_name(kind) + ":" + format_double(param);
}

std::vector<double> filter_kernel(const LinearFilterSpec& spec) {
  spec.validate();
  if (spec.kind == LinearKind::moving_average) {
    const auto width = static_cast<std::size_t>(spec.param);
    return std::vector<double>(width, 1.0 / static_cast<double>(width));
  }
  const double sigma = spec.param;
  const auto radius = static_cast<int>(std::ceil(4.0 * sigma));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-0.5 * (i * i) / (sigma * sigma));
    k[i + radius] = v;
    sum += v;
  }
  for (double& v : k) v /= sum;
  return k;
}

namespace {

std::size_t reflect_index(long i, long n) {
  const long period = 2 * n;
  long m = i % period;
  if (m < 0) m += period;
  return static_cast<std::size_t>(m < n ? m : period - 1 - m);
}

}  // namespace

std::vector<double> convolve_reflect(const std::vector<double>& signal,
                                     const std::vector<double>& kernel) {
  const long n = static_cast<long>(signal.size());
  const long half = static_cast<long>(kernel.size()) / 2;
  std::vector<double> out(signal.size(), 0.0);
  if (n == 0) return out;
  for (long i = 0; i < n; ++i) {
    double acc = 0.0;
    for (long k = -half; k <= half; ++k) {
      const long j = i + k;
      const double x = (j >= 0 && j < n) ? signal[j] : signal[reflect_index(j, n)];
      acc += kernel[k + half] * x;
    }
    out[i] = acc;
  }
  return out;
}

Trajectory apply_linear(const Trajectory& traj, const LinearFilterSpec& spec) {
  if (traj.empty()) throw DataError("empty trajectory");
  const auto kernel = filter_kernel(spec);
  std::vector<Frame> out(traj.size());
  for (int c = 0; c < kChannels; ++c) {
    const auto filtered = convolve_reflect(traj.channel(c), kernel);
    for (std::size_t i = 0; i < out.size(); ++i) out[i][c] = filtered[i];
  }
  return traj.with_frames(std::move(out));
}

TrajectoryFilter make_linear_filter(const LinearFilterSpec& spec) {
  spec.validate();
  return [spec](const Trajectory& t) { return apply_linear(t, spec); };
}

Trajectory impulse_probe(const TrajectoryFilter& filter, int channel, int length,
                         double amplitude, double sample_rate) {
  if (channel < 0 || channel >= kChannels) throw DataError("channel must be 0, 1 or 2");
  if (length < 1) throw DataError("probe length must be >= 1");
  const Trajectory zero(std::vector<Frame>(length, Frame{0.0, 0.0, 0.0}), sample_rate);
  std::vector<Frame> spike(zero.frames());
  spike[length / 2][channel] = amplitude;

  const Trajectory baseline = filter(zero);
  const Trajectory response = filter(Trajectory(std::move(spike), sample_rate));
  std::vector<Frame> diff(response.frames());
  for (std::size_t i = 0; i < diff.size(); ++i)
    for (int c = 0; c < kChannels; ++c) diff[i][c] -= baseline[i][c];
  return Trajectory(std::move(diff), sample_rate);
}

}  // namespace hm
