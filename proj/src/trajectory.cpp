#include "headmotion/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "headmotion/error.hpp"

namespace hm {

Trajectory::Trajectory(std::vector<Frame> frames, double sample_rate,
                       std::optional<std::vector<bool>> speaking)
    : frames_(std::move(frames)), sample_rate_(sample_rate), speaking_(std::move(speaking)) {
  if (!(sample_rate_ > 0.0) || !std::isfinite(sample_rate_)) {
    throw DataError("sample rate must be positive");
  }
  if (speaking_ && speaking_->size() != frames_.size()) {
    throw DataError("speaking mask has " + std::to_string(speaking_->size()) +
                    " entries for " + std::to_string(frames_.size()) + " frames");
  }
}

std::vector<double> Trajectory::channel(int c) const {
  std::vector<double> out(frames_.size());
  for (std::size_t i = 0; i < frames_.size(); ++i) out[i] = frames_[i][c];
  return out;
}

Trajectory Trajectory::with_frames(std::vector<Frame> frames) const {
  if (frames.size() != frames_.size()) {
    throw DataError("frame count changed from " + std::to_string(frames_.size()) + " to " +
                    std::to_string(frames.size()));
  }
  return Trajectory(std::move(frames), sample_rate_, speaking_);
}

NormStats compute_stats(std::span<const Trajectory> trajs) {
  std::size_t count = 0;
  for (const auto& t : trajs) count += t.size();
  if (trajs.empty() || count == 0) throw DataError("no data");
  if (count < 2) throw DataError("no data: need at least two frames");

  // Two passes: mean first, then centred squares.
  NormStats stats;
  Frame sum{0.0, 0.0, 0.0};
  for (const auto& t : trajs)
    for (const auto& f : t.frames())
      for (int c = 0; c < kChannels; ++c) sum[c] += f[c];
  for (int c = 0; c < kChannels; ++c) stats.mean[c] = sum[c] / static_cast<double>(count);

  Frame sq{0.0, 0.0, 0.0};
  for (const auto& t : trajs)
    for (const auto& f : t.frames())
      for (int c = 0; c < kChannels; ++c) {
        const double d = f[c] - stats.mean[c];
        sq[c] += d * d;
      }
  for (int c = 0; c < kChannels; ++c) {
    stats.std[c] = std::max(std::sqrt(sq[c] / static_cast<double>(count)), kMinStd);
  }
  return stats;
}

namespace {

void check_stats(const NormStats& stats) {
  for (int c = 0; c < kChannels; ++c) {
    if (!(stats.std[c] > 0.0) || !std::isfinite(stats.std[c]) || !std::isfinite(stats.mean[c])) {
      throw DataError("normalization stats must be finite with positive std");
    }
  }
}

}  // namespace

Trajectory normalize(const Trajectory& traj, const NormStats& stats) {
  check_stats(stats);
  std::vector<Frame> out(traj.frames());
  for (auto& f : out)
    for (int c = 0; c < kChannels; ++c) f[c] = (f[c] - stats.mean[c]) / stats.std[c];
  return traj.with_frames(std::move(out));
}

Trajectory denormalize(const Trajectory& traj, const NormStats& stats) {
  check_stats(stats);
  std::vector<Frame> out(traj.frames());
  for (auto& f : out)
    for (int c = 0; c < kChannels; ++c) f[c] = f[c] * stats.std[c] + stats.mean[c];
  return traj.with_frames(std::move(out));
}

Window::Window(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty() || values_.size() % kChannels != 0) {
    throw DataError("dimension mismatch: window length " + std::to_string(values_.size()) +
                    " is not a positive multiple of 3");
  }
}

std::vector<int> window_starts(std::size_t length, int window_len, int hop) {
  if (window_len <= 0 || hop <= 0 || hop > window_len) {
    throw DataError("invalid window geometry");
  }
  if (length < static_cast<std::size_t>(window_len)) throw DataError("trajectory too short");

  const int last = static_cast<int>(length) - window_len;
  std::vector<int> starts;
  for (int s = 0; s <= last; s += hop) starts.push_back(s);
  if (starts.back() != last) starts.push_back(last);
  return starts;
}

Segmentation segment_windows(const Trajectory& traj, int window_len, int hop) {
  Segmentation seg;
  seg.starts = window_starts(traj.size(), window_len, hop);
  seg.windows.reserve(seg.starts.size());
  for (int s : seg.starts) {
    std::vector<double> v(static_cast<std::size_t>(window_len) * kChannels);
    for (int i = 0; i < window_len; ++i)
      for (int c = 0; c < kChannels; ++c) v[i * kChannels + c] = traj[s + i][c];
    seg.windows.emplace_back(std::move(v));
  }
  return seg;
}

double overlap_weight(int frame, int window_len) {
  return static_cast<double>(std::min(frame + 1, window_len - frame));
}

Trajectory overlap_add(std::span<const Window> windows, std::span<const int> starts,
                       std::size_t total_len, double sample_rate) {
  if (windows.size() != starts.size()) {
    throw DataError("dimension mismatch: " + std::to_string(windows.size()) + " windows, " +
                    std::to_string(starts.size()) + " starts");
  }
  std::vector<Frame> acc(total_len, Frame{0.0, 0.0, 0.0});
  std::vector<double> weight(total_len, 0.0);
  for (std::size_t k = 0; k < windows.size(); ++k) {
    const Window& w = windows[k];
    const int len = w.frames();
    if (starts[k] < 0 || static_cast<std::size_t>(starts[k]) + len > total_len) {
      throw DataError("window " + std::to_string(k) + " lies outside the output range");
    }
    for (int i = 0; i < len; ++i) {
      const double wt = overlap_weight(i, len);
      auto& f = acc[starts[k] + i];
      for (int c = 0; c < kChannels; ++c) f[c] += wt * w.at(i, c);
      weight[starts[k] + i] += wt;
    }
  }
  for (std::size_t i = 0; i < total_len; ++i) {
    if (weight[i] <= 0.0) throw DataError("coverage gap at frame " + std::to_string(i));
    for (int c = 0; c < kChannels; ++c) acc[i][c] /= weight[i];
  }
  return Trajectory(std::move(acc), sample_rate);
}

}  // namespace hm
