#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace hm {

inline constexpr int kChannels = 3;
inline constexpr double kDefaultSampleRate = 100.0;
inline constexpr int kWindowFrames = 50;  // 500 ms at 100 Hz
inline constexpr int kWindowHop = 25;     // 250 ms at 100 Hz
inline constexpr int kWindowDim = kWindowFrames * kChannels;

/// One rotation-vector sample (rx, ry, rz) in radians.
using Frame = std::array<double, kChannels>;

/// Head-rotation time series at a fixed sample rate, with an optional
/// per-frame speaking flag.
class Trajectory {
 public:
  Trajectory() = default;
  explicit Trajectory(std::vector<Frame> frames, double sample_rate = kDefaultSampleRate,
                      std::optional<std::vector<bool>> speaking = std::nullopt);

  std::size_t size() const noexcept { return frames_.size(); }
  bool empty() const noexcept { return frames_.empty(); }
  double sample_rate() const noexcept { return sample_rate_; }

  const std::vector<Frame>& frames() const noexcept { return frames_; }
  const Frame& operator[](std::size_t i) const { return frames_[i]; }

  bool has_mask() const noexcept { return speaking_.has_value(); }
  const std::optional<std::vector<bool>>& speaking() const noexcept { return speaking_; }

  /// Copy of one channel as a contiguous series.
  std::vector<double> channel(int c) const;

  /// Same sample rate and mask, new samples. Length must match.
  Trajectory with_frames(std::vector<Frame> frames) const;

  bool operator==(const Trajectory&) const = default;

 private:
  std::vector<Frame> frames_;
  double sample_rate_ = kDefaultSampleRate;
  std::optional<std::vector<bool>> speaking_;
};

/// Per-channel mean and population standard deviation.
struct NormStats {
  Frame mean{0.0, 0.0, 0.0};
  Frame std{1.0, 1.0, 1.0};

  bool operator==(const NormStats&) const = default;
};

inline constexpr double kMinStd = 1e-9;

/// Pooled statistics over every frame of every trajectory. Channels whose
/// std falls below kMinStd are clamped to it.
NormStats compute_stats(std::span<const Trajectory> trajs);

Trajectory normalize(const Trajectory& traj, const NormStats& stats);
Trajectory denormalize(const Trajectory& traj, const NormStats& stats);

/// Fixed-length motion segment, frame-major: frame 0's (rx, ry, rz), then
/// frame 1's, and so on.
class Window {
 public:
  Window() = default;
  explicit Window(std::vector<double> values);

  int frames() const noexcept { return static_cast<int>(values_.size()) / kChannels; }
  std::size_t dim() const noexcept { return values_.size(); }

  const std::vector<double>& values() const noexcept { return values_; }
  std::vector<double>& values() noexcept { return values_; }

  double at(int frame, int channel) const { return values_[frame * kChannels + channel]; }
  double& at(int frame, int channel) { return values_[frame * kChannels + channel]; }

  bool operator==(const Window&) const = default;

 private:
  std::vector<double> values_;
};

/// Start frames for windows of `window_len` advancing by `hop`; when the
/// hop grid does not end exactly on the last frame, one extra window is
/// aligned to end there.
std::vector<int> window_starts(std::size_t length, int window_len = kWindowFrames,
                               int hop = kWindowHop);

struct Segmentation {
  std::vector<Window> windows;
  std::vector<int> starts;
};

Segmentation segment_windows(const Trajectory& traj, int window_len = kWindowFrames,
                             int hop = kWindowHop);

/// Triangular per-frame weight inside a window of `window_len` frames. Never
/// zero, so every covered frame receives a contribution.
double overlap_weight(int frame, int window_len);

/// Weighted overlap-add of windows placed at `starts`, renormalized by the
/// per-frame weight sum. The result carries `sample_rate` and no mask.
Trajectory overlap_add(std::span<const Window> windows, std::span<const int> starts,
                       std::size_t total_len, double sample_rate = kDefaultSampleRate);

}  // namespace hm
