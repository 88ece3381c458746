#include "geograsp/grasp_sim.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace geograsp {

void GripperSpec::validate() const {
  if (!(finger_length > 0.0 && finger_width > 0.0 && finger_thickness > 0.0 && max_opening > 0.0 &&
        palm_depth > 0.0))
    throw InvalidArgumentError("gripper dimensions must all be positive");
  if (!(max_opening > finger_thickness))
    throw InvalidArgumentError("gripper max opening must exceed finger thickness");
}

GripperSolids gripper_solids(const GripperSpec& g) {
  g.validate();
  const double half_open = g.max_opening / 2.0;
  const double half_w = g.finger_width / 2.0;
  const double half_len = g.finger_length / 2.0;
  const double half_t = g.finger_thickness / 2.0;
  GripperSolids s;
  s.left_finger = {{-(half_open + half_t), 0.0, half_len}, {half_t, half_w, half_len}};
  s.right_finger = {{half_open + half_t, 0.0, half_len}, {half_t, half_w, half_len}};
  s.palm = {{0.0, 0.0, -g.palm_depth / 2.0}, {half_open + g.finger_thickness, half_w, g.palm_depth / 2.0}};
  s.closing = {{0.0, 0.0, half_len}, {half_open, half_w, half_len}};
  return s;
}

std::string to_string(GraspOutcome o) {
  switch (o) {
    case GraspOutcome::kSuccess: return "success";
    case GraspOutcome::kFailure: return "failure";
    case GraspOutcome::kCollision: return "collision";
  }
  return "failure";
}

namespace {

struct WorldObb {
  Vec3 center;
  std::array<Vec3, 3> axes;
  Vec3 half;
  double bound;  // bounding sphere radius
};

WorldObb to_world(const GripperBox& box, const GraspPose& pose) {
  WorldObb o;
  o.center = pose.position + pose.orientation.rotate(box.center);
  o.axes = {pose.orientation.rotate({1, 0, 0}), pose.orientation.rotate({0, 1, 0}),
            pose.orientation.rotate({0, 0, 1})};
  o.half = box.half;
  o.bound = norm(box.half);
  return o;
}

double component(const Vec3& v, int i) { return i == 0 ? v.x : (i == 1 ? v.y : v.z); }

// Separating-axis test between an oriented box and an axis-aligned cube.
// Touching boxes do not overlap.
bool overlaps_cube(const WorldObb& o, const Vec3& cube_center, double cube_half) {
  const Vec3 t = cube_center - o.center;
  // R[i][j]: component j (world axis) of obb axis i.
  double r[3][3];
  double abs_r[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      r[i][j] = component(o.axes[i], j);
      abs_r[i][j] = std::abs(r[i][j]);
    }
  const double a[3] = {o.half.x, o.half.y, o.half.z};
  // World axes.
  for (int j = 0; j < 3; ++j) {
    const double ra = a[0] * abs_r[0][j] + a[1] * abs_r[1][j] + a[2] * abs_r[2][j];
    if (std::abs(component(t, j)) >= ra + cube_half) return false;
  }
  // Box axes.
  for (int i = 0; i < 3; ++i) {
    const double rb = cube_half * (abs_r[i][0] + abs_r[i][1] + abs_r[i][2]);
    if (std::abs(dot(t, o.axes[i])) >= a[i] + rb) return false;
  }
  // Cross products of world axis j and box axis i.
  const Vec3 world[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < 3; ++i) {
      const Vec3 axis = cross(world[j], o.axes[i]);
      const double len2 = dot(axis, axis);
      if (len2 < 1e-18) continue;  // parallel axes are covered above
      double ra = 0.0;
      for (int k = 0; k < 3; ++k) ra += a[k] * std::abs(dot(o.axes[k], axis));
      const double rb = cube_half * (std::abs(axis.x) + std::abs(axis.y) + std::abs(axis.z));
      if (std::abs(dot(t, axis)) >= ra + rb) return false;
    }
  }
  return true;
}

}  // namespace

GraspOutcome grasp_oracle(const OccupancyGrid& grid, const GraspPose& pose,
                          const GripperSpec& gripper, int min_enclosed) {
  const GripperSolids solids = gripper_solids(gripper);
  const std::array<WorldObb, 3> colliders = {to_world(solids.left_finger, pose),
                                             to_world(solids.right_finger, pose),
                                             to_world(solids.palm, pose)};
  const GridSpec& s = grid.spec();
  const double cube_half = s.cell_size / 2.0;
  const double cube_bound = cube_half * std::sqrt(3.0);
  const Quat inv{-pose.orientation.x, -pose.orientation.y, -pose.orientation.z, pose.orientation.w};
  const GripperBox& closing = solids.closing;

  int enclosed = 0;
  bool left = false;
  bool right = false;
  const auto values = grid.values();
  for (int n = 0; n < s.h; ++n) {
    for (int m = 0; m < s.w; ++m) {
      for (int l = 0; l < s.d; ++l) {
        if (values[s.flat_index(n, m, l)] < kOccupancyThreshold) continue;
        const Vec3 c = s.cell_center(n, m, l);
        for (const auto& obb : colliders) {
          if (norm(c - obb.center) >= obb.bound + cube_bound) continue;
          if (overlaps_cube(obb, c, cube_half)) return GraspOutcome::kCollision;
        }
        const Vec3 local = inv.rotate(c - pose.position) - closing.center;
        if (std::abs(local.x) < closing.half.x && std::abs(local.y) < closing.half.y &&
            std::abs(local.z) < closing.half.z) {
          ++enclosed;
          left = left || local.x < 0.0;
          right = right || local.x > 0.0;
        }
      }
    }
  }
  return (enclosed >= min_enclosed && left && right) ? GraspOutcome::kSuccess
                                                     : GraspOutcome::kFailure;
}

GraspPose perturb_pose(const GraspPose& pose, const PoseNoise& noise, Rng& rng) {
  GraspPose out = pose;
  out.position.x += normal(rng, 0.0, noise.position);
  out.position.y += normal(rng, 0.0, noise.position);
  out.position.z += normal(rng, 0.0, noise.position);
  const Vec3 delta{normal(rng, 0.0, noise.rotation_deg), normal(rng, 0.0, noise.rotation_deg),
                   normal(rng, 0.0, noise.rotation_deg)};
  if (delta.x != 0.0 || delta.y != 0.0 || delta.z != 0.0)
    out.orientation = Quat::from_euler_xyz_deg(pose.euler_xyz_deg() + delta).canonical();
  return out;
}

std::string to_string(GraspSource s) { return s == GraspSource::kSeed ? "seed" : "perturbed"; }

GraspSource grasp_source_from_string(const std::string& s) {
  if (s == "seed") return GraspSource::kSeed;
  if (s == "perturbed") return GraspSource::kPerturbed;
  throw InvalidArgumentError("unknown grasp source '" + s + "'");
}

namespace {

// Rotation with gripper x = closing, z = approach.
Quat gripper_orientation(const Vec3& closing, const Vec3& approach) {
  const Vec3 y = cross(approach, closing);
  return Quat::from_matrix(Mat4::rigid(closing, y, approach, {})).canonical();
}

Vec3 any_perpendicular(const Vec3& v) {
  const Vec3 trial = std::abs(v.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
  return normalized(cross(v, trial));
}

}  // namespace

std::optional<GraspPose> find_seed_grasp(const OccupancyGrid& grid, const GripperSpec& gripper,
                                         int min_enclosed) {
  const GridSpec& s = grid.spec();
  std::vector<Vec3> pts;
  for (int n = 0; n < s.h; ++n)
    for (int m = 0; m < s.w; ++m)
      for (int l = 0; l < s.d; ++l)
        if (grid.at(n, m, l) >= kOccupancyThreshold) pts.push_back(s.cell_center(n, m, l));
  if (pts.empty()) return std::nullopt;

  Vec3 centroid{};
  for (const auto& p : pts) centroid += p;
  centroid = centroid / static_cast<double>(pts.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : pts) {
    const Eigen::Vector3d d(p.x - centroid.x, p.y - centroid.y, p.z - centroid.z);
    cov += d * d.transpose();
  }
  // Eigenvalues ascend: thinnest direction first.
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
  const Vec3 down{0, 0, -1};
  for (int axis = 0; axis < 3; ++axis) {
    const auto e = eig.eigenvectors().col(axis);
    const Vec3 closing = normalized(Vec3{e.x(), e.y(), e.z()});
    // Start from the approach closest to top-down, then sweep around the closing axis.
    Vec3 u = down - closing * dot(down, closing);
    u = norm(u) > 1e-6 ? normalized(u) : any_perpendicular(closing);
    const Vec3 v = cross(closing, u);
    for (int k = 0; k < 12; ++k) {
      const int step = (k + 1) / 2;
      const double angle = deg_to_rad(30.0 * (k % 2 == 1 ? step : -step));
      const Vec3 approach = u * std::cos(angle) + v * std::sin(angle);
      const Quat q = gripper_orientation(closing, approach);
      // Middle of the first run of successful standoffs, away from the palm
      // collision on one side and the fingertip slip on the other.
      std::vector<GraspPose> run;
      for (int i = 0; 0.01 + 0.005 * i <= gripper.finger_length + 1e-9; ++i) {
        const GraspPose pose{centroid - approach * (0.01 + 0.005 * i), q};
        if (grasp_oracle(grid, pose, gripper, min_enclosed) == GraspOutcome::kSuccess)
          run.push_back(pose);
        else if (!run.empty())
          break;
      }
      if (!run.empty()) return run[run.size() / 2];
    }
  }
  return std::nullopt;
}

std::vector<GraspRecord> augment_grasps(const OccupancyGrid& grid, const GraspPose& seed_pose,
                                        const GripperSpec& gripper, int n, std::uint64_t rng_seed,
                                        const std::string& scene_id, const PoseNoise& noise) {
  if (n < 0) throw InvalidArgumentError("augment_grasps: n must be non-negative");
  std::vector<GraspRecord> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Rng rng = make_rng(rng_seed, "augment", static_cast<std::uint64_t>(i));
    GraspRecord r;
    r.scene = scene_id;
    r.pose = perturb_pose(seed_pose, noise, rng);
    r.outcome = grasp_oracle(grid, r.pose, gripper);
    r.source = GraspSource::kPerturbed;
    r.draw = i;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<GraspRecord> balance_records(const std::vector<GraspRecord>& records,
                                         std::uint64_t rng_seed, double success_ratio) {
  if (!(success_ratio > 0.0 && success_ratio < 1.0))
    throw InvalidArgumentError("balance_records: ratio must be in (0, 1)");
  std::vector<std::size_t> pos;
  std::vector<std::size_t> neg;
  for (std::size_t i = 0; i < records.size(); ++i) (records[i].success() ? pos : neg).push_back(i);
  if (pos.empty() || neg.empty())
    throw InvalidArgumentError("balance_records: both outcome classes are required");

  // Keep the class that limits the ratio whole and thin out the other.
  const double want_pos = success_ratio / (1.0 - success_ratio) * static_cast<double>(neg.size());
  std::vector<std::size_t>* thin = nullptr;
  std::size_t keep = 0;
  if (want_pos <= static_cast<double>(pos.size())) {
    thin = &pos;
    keep = static_cast<std::size_t>(std::llround(want_pos));
  } else {
    thin = &neg;
    keep = static_cast<std::size_t>(
        std::llround((1.0 - success_ratio) / success_ratio * static_cast<double>(pos.size())));
  }
  keep = std::clamp<std::size_t>(keep, 1, thin->size());
  Rng rng = make_rng(rng_seed, "balance");
  // Partial Fisher-Yates with the portable index draw.
  for (std::size_t i = 0; i < keep; ++i) {
    const std::size_t j = i + uniform_index(rng, thin->size() - i);
    std::swap((*thin)[i], (*thin)[j]);
  }
  thin->resize(keep);

  std::vector<std::size_t> kept;
  kept.reserve(pos.size() + neg.size());
  kept.insert(kept.end(), pos.begin(), pos.end());
  kept.insert(kept.end(), neg.begin(), neg.end());
  std::sort(kept.begin(), kept.end());
  std::vector<GraspRecord> out;
  out.reserve(kept.size());
  for (std::size_t i : kept) out.push_back(records[i]);
  return out;
}

std::string SceneCamera::name() const {
  return std::to_string(azimuth_deg) + "_" + std::to_string(elevation_deg);
}

Scene generate_scene(const SceneSpec& spec) {
  if (spec.kinds.empty()) throw InvalidArgumentError("scene spec lists no primitive kinds");
  Scene scene;
  scene.seed = spec.seed;
  Rng rng = make_rng(spec.seed, "scene");

  PrimitiveShape& shape = scene.shape;
  shape.kind = spec.kinds[uniform_index(rng, spec.kinds.size())];
  const double yaw = uniform(rng, 0.0, 360.0);
  shape.orientation = Quat::from_axis_angle({0, 0, 1}, deg_to_rad(yaw));
  shape.center = {uniform(rng, -0.01, 0.01), uniform(rng, -0.01, 0.01), uniform(rng, -0.01, 0.01)};
  switch (shape.kind) {
    case PrimitiveKind::kBox:
      shape.half_extents = {uniform(rng, 0.015, 0.03), uniform(rng, 0.015, 0.03),
                            uniform(rng, 0.02, 0.05)};
      break;
    case PrimitiveKind::kCylinder:
      shape.radius = uniform(rng, 0.015, 0.03);
      shape.half_height = uniform(rng, 0.03, 0.06);
      break;
    case PrimitiveKind::kSphere:
      shape.radius = uniform(rng, 0.02, 0.03);
      break;
    case PrimitiveKind::kTube:
      shape.radius = uniform(rng, 0.025, 0.033);
      shape.inner_radius = shape.radius - uniform(rng, 0.008, 0.012);
      shape.half_height = uniform(rng, 0.025, 0.05);
      break;
    case PrimitiveKind::kPlate:
      shape.half_extents = {uniform(rng, 0.03, 0.06), uniform(rng, 0.03, 0.06),
                            uniform(rng, 0.008, 0.012)};
      break;
  }
  scene.grid = rasterize_primitive(shape, GridSpec::cube(spec.grid_cells, spec.grid_extent, {}));

  std::uint64_t index = 0;
  for (int az : spec.azimuths_deg) {
    for (int el : spec.elevations_deg) {
      Rng crng = make_rng(spec.seed, "camera", index++);
      const Vec3 target = shape.center + Vec3{normal(crng, 0.0, spec.target_jitter),
                                              normal(crng, 0.0, spec.target_jitter),
                                              normal(crng, 0.0, spec.target_jitter)};
      const double distance = uniform(crng, spec.distance_min, spec.distance_max);
      const double a = deg_to_rad(az);
      const double e = deg_to_rad(el);
      const Vec3 eye =
          target + Vec3{std::cos(e) * std::cos(a), std::cos(e) * std::sin(a), std::sin(e)} * distance;
      SceneCamera sc{CameraModel::look_at_perspective(eye, target, {0, 0, 1},
                                                      deg_to_rad(spec.fovy_deg), spec.z_near,
                                                      spec.z_far, spec.image_size, spec.image_size),
                     az, el, target, distance};
      scene.cameras.push_back(std::move(sc));
    }
  }
  return scene;
}

std::vector<std::size_t> split_cameras(const Scene& scene, const SceneSpec& spec, bool training) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < scene.cameras.size(); ++i) {
    const bool is_train =
        std::find(spec.train_elevations_deg.begin(), spec.train_elevations_deg.end(),
                  scene.cameras[i].elevation_deg) != spec.train_elevations_deg.end();
    if (is_train == training) out.push_back(i);
  }
  return out;
}

}  // namespace geograsp
