#pragma once

#include <span>

#include <Eigen/Core>

namespace hm {

/// Axis-angle vector (axis * angle, radians) of a proper rotation. The
/// angle lies in [0, pi]; near pi the axis comes from the symmetric part
/// of R, which stays well conditioned where the skew part vanishes.
/// Throws DataError("not a rotation matrix") unless R^T R = I and
/// det R = +1 to 1e-6.
Eigen::Vector3d rotmat_to_rotvec(const Eigen::Matrix3d& R);

/// Rodrigues' formula.
Eigen::Matrix3d rotvec_to_rotmat(const Eigen::Vector3d& v);

/// Least-squares rotation taking the mean-centred `reference` cloud onto the
/// mean-centred `frame` cloud (orthogonal Procrustes / Kabsch via SVD, with
/// the reflection case corrected). Requires at least three non-collinear
/// markers and equal counts.
Eigen::Matrix3d markers_to_rotation(std::span<const Eigen::Vector3d> reference,
                                    std::span<const Eigen::Vector3d> frame);

}  // namespace hm
