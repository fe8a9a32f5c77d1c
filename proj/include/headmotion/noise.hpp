#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "headmotion/random.hpp"
#include "headmotion/trajectory.hpp"

namespace hm {

enum class NoiseKind {
  frame_dropout,      // whole frames set to zero
  additive_gaussian,  // i.i.d. N(0, sigma^2) on every component
  impulsive,          // sparse N(0, sigma^2) spikes on individual components
  step_offset,        // piecewise-constant per-channel offsets
};

/// One corruption process. Values are in normalized units; a zeroed frame
/// therefore sits at the channel mean once denormalized.
struct NoiseSpec {
  NoiseKind kind = NoiseKind::additive_gaussian;
  double rate = 0.0;   // frame_dropout, impulsive
  double sigma = 0.0;  // additive_gaussian, impulsive, step_offset
  bool exact_count = false;  // frame_dropout: drop round(rate * frames) frames exactly
  int min_segment = 15;      // step_offset segment lengths, frames
  int max_segment = 40;
  std::uint64_t seed = 0;

  static NoiseSpec dropout(double rate, std::uint64_t seed = 0);
  static NoiseSpec gaussian(double sigma, std::uint64_t seed = 0);
  static NoiseSpec spikes(double rate, double sigma, std::uint64_t seed = 0);
  static NoiseSpec steps(double sigma, std::uint64_t seed = 0);

  void validate() const;

  /// "dropout:0.5", "dropout:0.5:exact", "gauss:0.2", "spike:0.03:1",
  /// "steps:0.2" or "steps:0.2:15:40". The seed is not part of the text.
  static NoiseSpec parse(const std::string& text);
  std::string to_string() const;
};

std::string kind_name(NoiseKind kind);

/// Applies `spec` in place to frame-major samples, drawing from `rng`.
void corrupt_frames(std::span<double> values, const NoiseSpec& spec, Rng& rng);

Window frame_dropout(const Window& window, double rate, std::uint64_t seed);
Window add_gaussian(const Window& window, double sigma, std::uint64_t seed);
Window apply_noise(const Window& window, const NoiseSpec& spec);

/// Corrupts every frame of `traj` as given (no normalization).
Trajectory apply_noise(const Trajectory& traj, const NoiseSpec& spec);

/// Normalizes with `stats`, corrupts, and maps back.
Trajectory corrupt_normalized(const Trajectory& traj, std::span<const NoiseSpec> chain,
                              const NormStats& stats);

/// Stand-in for the output of a speech-driven motion predictor: drifting
/// offsets, mild jitter and occasional glitches.
inline constexpr const char* kPredictionLikeNoise = "steps:0.2+gauss:0.05+spike:0.03:1";

/// Weighted choice among corruption chains, used for training inputs. An
/// empty chain leaves the sample clean.
struct NoiseRecipe {
  struct Option {
    double weight = 1.0;
    std::vector<NoiseSpec> chain;
  };
  std::vector<Option> options;

  bool empty() const noexcept { return options.empty(); }

  /// "none", "dropout:0.5", "gauss:0.2", a chain "gauss:0.05+spike:0.03:1",
  /// or a weighted mixture "0.15*dropout:0.5,0.55*gauss:0.2,0.3*gauss:0.05+spike:0.03:1".
  static NoiseRecipe parse(const std::string& text);
  std::string to_string() const;

  /// Picks an option by weight and applies its chain to `values`.
  void apply(std::span<double> values, Rng& rng) const;
};

}  // namespace hm
