#include "headmotion/noise.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "headmotion/error.hpp"
#include "headmotion/trajectory_csv.hpp"

namespace hm {

NoiseSpec NoiseSpec::dropout(double rate, std::uint64_t seed) {
  NoiseSpec s;
  s.kind = NoiseKind::frame_dropout;
  s.rate = rate;
  s.seed = seed;
  s.validate();
  return s;
}

NoiseSpec NoiseSpec::gaussian(double sigma, std::uint64_t seed) {
  NoiseSpec s;
  s.kind = NoiseKind::additive_gaussian;
  s.sigma = sigma;
  s.seed = seed;
  s.validate();
  return s;
}

NoiseSpec NoiseSpec::spikes(double rate, double sigma, std::uint64_t seed) {
  NoiseSpec s;
  s.kind = NoiseKind::impulsive;
  s.rate = rate;
  s.sigma = sigma;
  s.seed = seed;
  s.validate();
  return s;
}

NoiseSpec NoiseSpec::steps(double sigma, std::uint64_t seed) {
  NoiseSpec s;
  s.kind = NoiseKind::step_offset;
  s.sigma = sigma;
  s.seed = seed;
  s.validate();
  return s;
}

void NoiseSpec::validate() const {
  const bool uses_rate = kind == NoiseKind::frame_dropout || kind == NoiseKind::impulsive;
  const bool uses_sigma = kind != NoiseKind::frame_dropout;
  if (uses_rate && !(rate >= 0.0 && rate <= 1.0)) throw DataError("noise rate must be in [0, 1]");
  if (uses_sigma && !(sigma > 0.0 && std::isfinite(sigma))) {
    throw DataError("noise sigma must be positive");
  }
  if (kind == NoiseKind::step_offset && (min_segment < 1 || max_segment < min_segment)) {
    throw DataError("step segment lengths must satisfy 1 <= min <= max");
  }
}

std::string kind_name(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::frame_dropout: return "dropout";
    case NoiseKind::additive_gaussian: return "gauss";
    case NoiseKind::impulsive: return "spike";
    case NoiseKind::step_offset: return "steps";
  }
  return "?";
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = s.find(sep, pos);
    out.push_back(s.substr(pos, next - pos));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return out;
}

double to_number(const std::string& s, const std::string& context) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw DataError("bad number '" + s + "' in noise spec '" + context + "'");
  }
  return v;
}

int to_int(const std::string& s, const std::string& context) {
  const double v = to_number(s, context);
  if (v != std::floor(v)) throw DataError("expected an integer in noise spec '" + context + "'");
  return static_cast<int>(v);
}

}  // namespace

NoiseSpec NoiseSpec::parse(const std::string& text) {
  const auto parts = split(text, ':');
  const std::string& kind = parts[0];
  NoiseSpec s;
  if (kind == "dropout" && (parts.size() == 2 || (parts.size() == 3 && parts[2] == "exact"))) {
    s.kind = NoiseKind::frame_dropout;
    s.rate = to_number(parts[1], text);
    s.exact_count = parts.size() == 3;
  } else if ((kind == "gauss" || kind == "gaussian") && parts.size() == 2) {
    s.kind = NoiseKind::additive_gaussian;
    s.sigma = to_number(parts[1], text);
  } else if (kind == "spike" && parts.size() == 3) {
    s.kind = NoiseKind::impulsive;
    s.rate = to_number(parts[1], text);
    s.sigma = to_number(parts[2], text);
  } else if (kind == "steps" && (parts.size() == 2 || parts.size() == 4)) {
    s.kind = NoiseKind::step_offset;
    s.sigma = to_number(parts[1], text);
    if (parts.size() == 4) {
      s.min_segment = to_int(parts[2], text);
      s.max_segment = to_int(parts[3], text);
    }
  } else {
    throw DataError("unrecognized noise spec '" + text + "'");
  }
  s.validate();
  return s;
}

std::string NoiseSpec::to_string() const {
  switch (kind) {
    case NoiseKind::frame_dropout:
      return "dropout:" + format_double(rate) + (exact_count ? ":exact" : "");
    case NoiseKind::additive_gaussian: return "gauss:" + format_double(sigma);
    case NoiseKind::impulsive: return "spike:" + format_double(rate) + ":" + format_double(sigma);
    case NoiseKind::step_offset:
      return "steps:" + format_double(sigma) + ":" + std::to_string(min_segment) + ":" +
             std::to_string(max_segment);
  }
  return "?";
}

void corrupt_frames(std::span<double> values, const NoiseSpec& spec, Rng& rng) {
  spec.validate();
  if (values.size() % kChannels != 0) throw DataError("dimension mismatch: not whole frames");
  const std::size_t frames = values.size() / kChannels;

  switch (spec.kind) {
    case NoiseKind::frame_dropout: {
      std::vector<bool> drop(frames, false);
      if (spec.exact_count) {
        const auto k = static_cast<std::size_t>(std::llround(spec.rate * frames));
        std::vector<std::size_t> order(frames);
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t i = 0; i < k; ++i) drop[order[i]] = true;
      } else {
        std::bernoulli_distribution coin(spec.rate);
        for (std::size_t f = 0; f < frames; ++f) drop[f] = coin(rng);
      }
      for (std::size_t f = 0; f < frames; ++f)
        if (drop[f])
          for (int c = 0; c < kChannels; ++c) values[f * kChannels + c] = 0.0;
      break;
    }
    case NoiseKind::additive_gaussian: {
      std::normal_distribution<double> n(0.0, spec.sigma);
      for (double& v : values) v += n(rng);
      break;
    }
    case NoiseKind::impulsive: {
      std::bernoulli_distribution coin(spec.rate);
      std::normal_distribution<double> n(0.0, spec.sigma);
      for (double& v : values)
        if (coin(rng)) v += n(rng);
      break;
    }
    case NoiseKind::step_offset: {
      std::uniform_int_distribution<int> len(spec.min_segment, spec.max_segment);
      std::normal_distribution<double> n(0.0, spec.sigma);
      std::size_t f = 0;
      while (f < frames) {
        const std::size_t end = std::min(frames, f + static_cast<std::size_t>(len(rng)));
        Frame offset{n(rng), n(rng), n(rng)};
        for (; f < end; ++f)
          for (int c = 0; c < kChannels; ++c) values[f * kChannels + c] += offset[c];
      }
      break;
    }
  }
}

Window frame_dropout(const Window& window, double rate, std::uint64_t seed) {
  return apply_noise(window, NoiseSpec::dropout(rate, seed));
}

Window add_gaussian(const Window& window, double sigma, std::uint64_t seed) {
  return apply_noise(window, NoiseSpec::gaussian(sigma, seed));
}

Window apply_noise(const Window& window, const NoiseSpec& spec) {
  Window out = window;
  Rng rng = make_rng(spec.seed);
  corrupt_frames(out.values(), spec, rng);
  return out;
}

Trajectory apply_noise(const Trajectory& traj, const NoiseSpec& spec) {
  std::vector<Frame> frames(traj.frames());
  Rng rng = make_rng(spec.seed);
  corrupt_frames(std::span<double>(frames.front().data(), frames.size() * kChannels), spec, rng);
  return traj.with_frames(std::move(frames));
}

Trajectory corrupt_normalized(const Trajectory& traj, std::span<const NoiseSpec> chain,
                              const NormStats& stats) {
  Trajectory t = normalize(traj, stats);
  for (std::size_t i = 0; i < chain.size(); ++i) {
    NoiseSpec s = chain[i];
    s.seed = derive_seed(s.seed, i);
    t = apply_noise(t, s);
  }
  return denormalize(t, stats);
}

NoiseRecipe NoiseRecipe::parse(const std::string& text) {
  NoiseRecipe r;
  if (text.empty() || text == "none") return r;
  for (const auto& option_text : split(text, ',')) {
    Option opt;
    std::string chain_text = option_text;
    if (const auto star = option_text.find('*'); star != std::string::npos) {
      opt.weight = to_number(option_text.substr(0, star), text);
      chain_text = option_text.substr(star + 1);
      if (!(opt.weight > 0.0)) throw DataError("noise weights must be positive");
    }
    if (chain_text != "none") {
      for (const auto& spec_text : split(chain_text, '+')) {
        opt.chain.push_back(NoiseSpec::parse(spec_text));
      }
    }
    r.options.push_back(std::move(opt));
  }
  return r;
}

std::string NoiseRecipe::to_string() const {
  if (options.empty()) return "none";
  std::string out;
  for (std::size_t i = 0; i < options.size(); ++i) {
    if (i) out += ',';
    if (options.size() > 1) out += format_double(options[i].weight) + "*";
    if (options[i].chain.empty()) out += "none";
    for (std::size_t j = 0; j < options[i].chain.size(); ++j) {
      if (j) out += '+';
      out += options[i].chain[j].to_string();
    }
  }
  return out;
}

void NoiseRecipe::apply(std::span<double> values, Rng& rng) const {
  if (options.empty()) return;
  double total = 0.0;
  for (const auto& o : options) total += o.weight;
  double pick = std::uniform_real_distribution<double>(0.0, total)(rng);
  const Option* chosen = &options.back();
  for (const auto& o : options) {
    if (pick < o.weight) {
      chosen = &o;
      break;
    }
    pick -= o.weight;
  }
  for (const auto& spec : chosen->chain) corrupt_frames(values, spec, rng);
}

}  // namespace hm
