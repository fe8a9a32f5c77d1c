#include "headmotion/denoiser.hpp"

#include <cmath>
#include <memory>

#include "headmotion/error.hpp"

namespace hm {

int model_window_frames(const MlpModel& model) {
  model.validate();
  if (model.input_dim() != model.output_dim() || model.input_dim() % kChannels != 0) {
    throw DataError("dimension mismatch: model maps " + std::to_string(model.input_dim()) +
                    " -> " + std::to_string(model.output_dim()) + ", not window -> window");
  }
  return model.input_dim() / kChannels;
}

Trajectory filter_trajectory(const MlpModel& model, const Trajectory& traj) {
  const int frames = model_window_frames(model);
  if (std::abs(traj.sample_rate() - model.sample_rate) > 1e-6 * model.sample_rate) {
    throw DataError("sample rate mismatch: trajectory is " + std::to_string(traj.sample_rate()) +
                    " Hz, model was trained at " + std::to_string(model.sample_rate) + " Hz");
  }
  if (traj.size() < static_cast<std::size_t>(frames)) throw DataError("trajectory too short");

  // Hop is half a window, matching the 500/250 ms framing at 100 Hz.
  const int hop = std::max(1, frames / 2);
  const Trajectory norm = normalize(traj, model.norm_stats);
  const Segmentation seg = segment_windows(norm, frames, hop);
  const std::vector<Window> out = from_batch(forward(model, to_batch(seg.windows)));
  const Trajectory joined = overlap_add(out, seg.starts, traj.size(), traj.sample_rate());
  return traj.with_frames(denormalize(joined, model.norm_stats).frames());
}

TrajectoryFilter make_model_filter(const MlpModel& model) {
  auto shared = std::make_shared<const MlpModel>(model);
  return [shared](const Trajectory& t) { return filter_trajectory(*shared, t); };
}

}  // namespace hm
