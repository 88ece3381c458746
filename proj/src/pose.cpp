#include "geograsp/pose.hpp"

#include <cmath>

namespace geograsp {

Mat4 GraspPose::to_world() const {
  Mat4 m = orientation.to_matrix();
  m(0, 3) = position.x;
  m(1, 3) = position.y;
  m(2, 3) = position.z;
  return m;
}

GraspPose GraspPose::from_euler_xyz_deg(const Vec3& position, const Vec3& deg) {
  return {position, Quat::from_euler_xyz_deg(deg)};
}

void GraspPose::validate() const {
  if (!is_finite(position)) throw InvalidArgumentError("grasp position must be finite");
  if (!(std::abs(orientation.norm() - 1.0) <= 1e-9))
    throw InvalidArgumentError("grasp orientation must be a unit quaternion");
}

}  // namespace geograsp
