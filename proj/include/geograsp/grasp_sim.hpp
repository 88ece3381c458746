#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "geograsp/geom.hpp"
#include "geograsp/pose.hpp"
#include "geograsp/seeding.hpp"
#include "geograsp/voxel_grid.hpp"

namespace geograsp {

// Parallel-jaw gripper geometry, meters. In the gripper frame the palm is the
// slab z in [-palm_depth, 0], the fingers are slabs of `finger_thickness`
// just outside |x| = max_opening / 2 spanning z in [0, finger_length], and
// everything spans y in [-finger_width / 2, finger_width / 2].
struct GripperSpec {
  double finger_length = 0.06;
  double finger_width = 0.02;
  double finger_thickness = 0.01;
  double max_opening = 0.08;
  double palm_depth = 0.02;

  void validate() const;
};

// Oriented box in the gripper frame: center and half extents.
struct GripperBox {
  Vec3 center;
  Vec3 half;
};

struct GripperSolids {
  GripperBox left_finger;
  GripperBox right_finger;
  GripperBox palm;
  GripperBox closing;  // swept region between the fingers
};
GripperSolids gripper_solids(const GripperSpec& g);

enum class GraspOutcome { kSuccess, kFailure, kCollision };

std::string to_string(GraspOutcome o);
// Binary label: collision folds into failure.
inline bool is_success(GraspOutcome o) { return o == GraspOutcome::kSuccess; }

inline constexpr int kDefaultMinEnclosedCells = 3;

// Analytic close-and-lift stand-in:
//   collision - an occupied cell (>= 0.5) overlaps a finger or the palm;
//   success   - no collision, at least `min_enclosed` occupied cell centers in
//               the closing region, with some on each side of the mid plane;
//   failure   - otherwise.
GraspOutcome grasp_oracle(const OccupancyGrid& grid, const GraspPose& pose,
                          const GripperSpec& gripper, int min_enclosed = kDefaultMinEnclosedCells);

// Perturbation scale for pose noise: meters per axis and Euler degrees per axis.
struct PoseNoise {
  double position = 0.05;
  double rotation_deg = 20.0;
};

GraspPose perturb_pose(const GraspPose& pose, const PoseNoise& noise, Rng& rng);

enum class GraspSource { kSeed, kPerturbed };
std::string to_string(GraspSource s);
GraspSource grasp_source_from_string(const std::string& s);

struct GraspRecord {
  std::string scene;
  GraspPose pose;
  GraspOutcome outcome = GraspOutcome::kFailure;  // raw oracle result
  GraspSource source = GraspSource::kPerturbed;
  int draw = 0;

  bool success() const { return is_success(outcome); }
};

// Seed grasp search: sweeps closing axes over the occupied cells' principal
// directions, approach directions around each closing axis and palm
// standoffs. Returns the middle of the first run of accepted standoffs.
std::optional<GraspPose> find_seed_grasp(const OccupancyGrid& grid, const GripperSpec& gripper,
                                         int min_enclosed = kDefaultMinEnclosedCells);

// n perturbed copies of `seed_pose`, each labeled by the oracle. Draw i uses
// the stream derive_seed(rng_seed, "augment", i).
std::vector<GraspRecord> augment_grasps(const OccupancyGrid& grid, const GraspPose& seed_pose,
                                        const GripperSpec& gripper, int n, std::uint64_t rng_seed,
                                        const std::string& scene_id = "",
                                        const PoseNoise& noise = {});

// Subsamples the majority class so successes make up `success_ratio` of the
// result (within one record). Keeps the input order.
std::vector<GraspRecord> balance_records(const std::vector<GraspRecord>& records,
                                         std::uint64_t rng_seed, double success_ratio = 0.5);

// ---- Scenes ----------------------------------------------------------------

struct SceneCamera {
  CameraModel camera;
  int azimuth_deg = 0;
  int elevation_deg = 0;
  Vec3 target{};
  double distance = 0.0;

  std::string name() const;  // "<az>_<el>"
};

struct SceneSpec {
  std::uint64_t seed = 0;
  int grid_cells = 32;
  double grid_extent = 0.24;
  std::vector<PrimitiveKind> kinds{PrimitiveKind::kBox, PrimitiveKind::kCylinder,
                                   PrimitiveKind::kSphere, PrimitiveKind::kTube,
                                   PrimitiveKind::kPlate};
  std::vector<int> azimuths_deg{0, 45, 90, 135, 180, 225, 270, 315};
  std::vector<int> elevations_deg{15, 30, 45, 60};
  std::vector<int> train_elevations_deg{15, 45};
  double distance_min = 0.35;
  double distance_max = 0.45;
  double target_jitter = 0.03;
  double fovy_deg = 45.0;
  double z_near = 0.15;
  double z_far = 0.75;
  int image_size = 48;
};

struct Scene {
  std::uint64_t seed = 0;
  PrimitiveShape shape;
  OccupancyGrid grid;
  std::vector<SceneCamera> cameras;

  std::string id() const { return "scene_" + std::to_string(seed); }
  std::string category() const { return to_string(shape.kind); }
};

// Random primitive at the grid center, cameras on the azimuth x elevation
// ring with jittered targets and distances.
Scene generate_scene(const SceneSpec& spec);

// Indices of cameras whose elevation is (or is not) a training elevation.
std::vector<std::size_t> split_cameras(const Scene& scene, const SceneSpec& spec, bool training);

}  // namespace geograsp
