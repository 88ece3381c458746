#pragma once

#include "geograsp/geom.hpp"

namespace geograsp {

// 6-DOF parallel-jaw gripper pose. The gripper frame has its origin at the
// palm center; fingers extend along local +z (the approach axis) and close
// along local x.
struct GraspPose {
  Vec3 position{};
  Quat orientation{};

  Vec3 approach_axis() const { return orientation.rotate({0, 0, 1}); }
  Vec3 closing_axis() const { return orientation.rotate({1, 0, 0}); }
  // Gripper-to-world rigid transform.
  Mat4 to_world() const;

  Vec3 euler_xyz_deg() const { return orientation.to_euler_xyz_deg(); }
  static GraspPose from_euler_xyz_deg(const Vec3& position, const Vec3& deg);

  // Throws InvalidArgumentError unless the quaternion is unit within 1e-9.
  void validate() const;
  bool operator==(const GraspPose&) const = default;
};

}  // namespace geograsp
