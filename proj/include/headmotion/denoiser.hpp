#pragma once

#include "headmotion/linear_filter.hpp"
#include "headmotion/mlp.hpp"
#include "headmotion/trajectory.hpp"

namespace hm {

/// Runs the autoencoder over a whole trajectory: normalize with the model's
/// statistics, cut 50/25 windows, reconstruct each window, overlap-add, and
/// map back to the input units. Mask and sample rate pass through.
///
/// Throws DataError when the trajectory is shorter than one window, when its
/// sample rate differs from the model's, or when the model does not map
/// windows onto windows.
Trajectory filter_trajectory(const MlpModel& model, const Trajectory& traj);

TrajectoryFilter make_model_filter(const MlpModel& model);

/// Frames per window implied by the model's input width.
int model_window_frames(const MlpModel& model);

}  // namespace hm
