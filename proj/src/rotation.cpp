#include "headmotion/rotation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "headmotion/error.hpp"

namespace hm {

namespace {

constexpr double kRotationTol = 1e-6;

Eigen::Vector3d vee(const Eigen::Matrix3d& A) {
  return {A(2, 1) - A(1, 2), A(0, 2) - A(2, 0), A(1, 0) - A(0, 1)};
}

Eigen::Matrix3d hat(const Eigen::Vector3d& v) {
  Eigen::Matrix3d K;
  K << 0.0, -v.z(), v.y(),  //
      v.z(), 0.0, -v.x(),   //
      -v.y(), v.x(), 0.0;
  return K;
}

}  // namespace

Eigen::Vector3d rotmat_to_rotvec(const Eigen::Matrix3d& R) {
  if (!R.allFinite() ||
      (R.transpose() * R - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > kRotationTol ||
      std::abs(R.determinant() - 1.0) > kRotationTol) {
    throw DataError("not a rotation matrix");
  }

  const Eigen::Vector3d skew = 0.5 * vee(R);  // sin(theta) * axis
  const double s = skew.norm();
  const double c = std::clamp(0.5 * (R.trace() - 1.0), -1.0, 1.0);
  const double theta = std::atan2(s, c);

  if (c > -0.9) {
    // theta / sin(theta) -> 1 + theta^2/6 as theta -> 0.
    const double scale = s < 1e-8 ? 1.0 + theta * theta / 6.0 : theta / s;
    return scale * skew;
  }

  // Near pi: (R + R^T)/2 = c I + (1 - c) a a^T.
  const Eigen::Matrix3d aat =
      (0.5 * (R + R.transpose()) - c * Eigen::Matrix3d::Identity()) / (1.0 - c);
  Eigen::Index k = 0;
  aat.diagonal().maxCoeff(&k);
  Eigen::Vector3d axis = aat.col(k) / std::sqrt(aat(k, k));
  axis.normalize();
  if (axis.dot(skew) < 0.0) axis = -axis;
  return theta * axis;
}

Eigen::Matrix3d rotvec_to_rotmat(const Eigen::Vector3d& v) {
  const double theta = v.norm();
  const Eigen::Matrix3d K = hat(v);
  double a = 1.0;
  double b = 0.5;
  if (theta > 1e-6) {
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / (theta * theta);
  } else {
    const double t2 = theta * theta;
    a = 1.0 - t2 / 6.0;
    b = 0.5 - t2 / 24.0;
  }
  return Eigen::Matrix3d::Identity() + a * K + b * K * K;
}

Eigen::Matrix3d markers_to_rotation(std::span<const Eigen::Vector3d> reference,
                                    std::span<const Eigen::Vector3d> frame) {
  if (reference.size() != frame.size()) {
    throw DataError("marker count mismatch: " + std::to_string(reference.size()) + " vs " +
                    std::to_string(frame.size()));
  }
  const auto n = static_cast<Eigen::Index>(reference.size());
  if (n < 3) throw DataError("degenerate marker set");

  Eigen::Matrix<double, 3, Eigen::Dynamic> P(3, n);
  Eigen::Matrix<double, 3, Eigen::Dynamic> Q(3, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    P.col(i) = reference[i];
    Q.col(i) = frame[i];
  }
  P.colwise() -= P.rowwise().mean();
  Q.colwise() -= Q.rowwise().mean();

  // A cloud spans at least a plane iff its second singular value is nonzero.
  auto spans_plane = [](const Eigen::Matrix<double, 3, Eigen::Dynamic>& X) {
    const Eigen::Vector3d sv = Eigen::JacobiSVD<Eigen::MatrixXd>(X).singularValues();
    return sv(0) > 0.0 && sv(1) > 1e-9 * sv(0);
  };
  if (!P.allFinite() || !Q.allFinite() || !spans_plane(P) || !spans_plane(Q)) {
    throw DataError("degenerate marker set");
  }

  const Eigen::Matrix3d H = P * Q.transpose();
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(H, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Matrix3d& U = svd.matrixU();
  const Eigen::Matrix3d& V = svd.matrixV();
  Eigen::Vector3d d(1.0, 1.0, (V * U.transpose()).determinant() < 0.0 ? -1.0 : 1.0);
  return V * d.asDiagonal() * U.transpose();
}

}  // namespace hm
