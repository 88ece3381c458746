#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "geograsp/grasp_sim.hpp"
#include "geograsp/planner.hpp"
#include "geograsp/predictor.hpp"
#include "geograsp/projection.hpp"

namespace geograsp {

// A generated scene with its seed grasp, balanced labeled grasps and the
// exact render from every scene camera.
struct SceneData {
  Scene scene;
  GraspPose seed_pose;
  std::vector<GraspRecord> records;
  std::vector<Projection> renders;
};

struct DatasetConfig {
  std::uint64_t seed = 0;
  int scenes = 20;
  int grasps_per_scene = 100;  // after balancing, half of them successes
  int max_draws = 20000;       // per scene
  SceneSpec scene;             // template; the seed is overwritten per scene
  GripperSpec gripper;
  PoseNoise noise;

  void validate() const;
};

// Draws perturbations of `seed_pose` in index order until count / 2
// successes are found, then balances to count / 2 of each class. Returns an
// empty list if max_draws is reached first.
std::vector<GraspRecord> balanced_grasps(const OccupancyGrid& grid, const GraspPose& seed_pose,
                                         const GripperSpec& gripper, int count,
                                         std::uint64_t rng_seed, const std::string& scene_id,
                                         const PoseNoise& noise, int max_draws);

Projection render_camera(const OccupancyGrid& grid, const CameraModel& camera);

// Nullopt when the scene has no seed grasp or too few successful draws.
std::optional<SceneData> build_scene_data(const SceneSpec& spec, const DatasetConfig& cfg);

// Scene i uses seed derive_seed(cfg.seed, "scene", i); unusable scenes are
// skipped until cfg.scenes are collected.
std::vector<SceneData> build_dataset(const DatasetConfig& cfg);

// Observation camera for a record: uniform over the cameras whose elevation
// is listed, from derive_seed(seed, "obs", draw) mixed with the scene seed.
std::size_t observation_camera(const SceneData& data, const GraspRecord& record,
                               std::span<const int> elevations, std::uint64_t seed);
Observation observation(const SceneData& data, std::size_t camera);

struct LabeledSet {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
};

// Features of every record of the listed scenes. `geometry`, when given,
// holds one grid per entry of `scenes` and replaces the ground truth for the
// local view.
LabeledSet build_features(const std::vector<SceneData>& scenes, std::span<const std::size_t> which,
                          FeatureKind kind, std::span<const int> elevations, std::uint64_t seed,
                          const FeatureConfig& features = {},
                          const std::vector<OccupancyGrid>* geometry = nullptr);

// Scenes [0, round(train_fraction * n)) train, the rest are held out.
void split_scenes(std::size_t n, double train_fraction, std::vector<std::size_t>& train,
                  std::vector<std::size_t>& test);

// Failing start poses: perturbations of the seed pose the oracle rejects.
// With `within_one_sigma`, only offsets no larger than one noise scale (in
// position and in rotation angle) are kept.
std::vector<GraspPose> planning_starts(const SceneData& data, const GripperSpec& gripper, int count,
                                       const PoseNoise& noise, std::uint64_t seed,
                                       bool within_one_sigma = true);

// These keep a pointer to the scene grid; `data` must outlive them.
PoseOracle scene_oracle(const SceneData& data, const GripperSpec& gripper);
PoseScorer oracle_scorer(const SceneData& data, const GripperSpec& gripper);
PoseScorer constant_scorer(double value);
// Scores poses with `model` from a fixed observation camera.
PoseScorer model_scorer(const Mlp& model, const SceneData& data, FeatureKind kind,
                        std::size_t camera, const FeatureConfig& features = {},
                        const OccupancyGrid* geometry = nullptr);

}  // namespace geograsp
