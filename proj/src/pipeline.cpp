#include "geograsp/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "geograsp/seeding.hpp"

namespace geograsp {

void DatasetConfig::validate() const {
  if (scenes < 1) throw InvalidArgumentError("dataset: scenes must be >= 1");
  if (grasps_per_scene < 2 || grasps_per_scene % 2 != 0)
    throw InvalidArgumentError("dataset: grasps_per_scene must be even and >= 2");
  if (max_draws < grasps_per_scene)
    throw InvalidArgumentError("dataset: max_draws must be >= grasps_per_scene");
  gripper.validate();
}

std::vector<GraspRecord> balanced_grasps(const OccupancyGrid& grid, const GraspPose& seed_pose,
                                         const GripperSpec& gripper, int count,
                                         std::uint64_t rng_seed, const std::string& scene_id,
                                         const PoseNoise& noise, int max_draws) {
  const int per_class = count / 2;
  std::vector<GraspRecord> draws;
  int successes = 0;
  int failures = 0;
  for (int i = 0; i < max_draws && (successes < per_class || failures < per_class); ++i) {
    Rng rng = make_rng(rng_seed, "augment", static_cast<std::uint64_t>(i));
    GraspRecord r;
    r.scene = scene_id;
    r.pose = perturb_pose(seed_pose, noise, rng);
    r.outcome = grasp_oracle(grid, r.pose, gripper);
    r.source = GraspSource::kPerturbed;
    r.draw = i;
    // Surplus draws of a full class are not kept.
    int& have = r.success() ? successes : failures;
    if (have >= per_class) continue;
    ++have;
    draws.push_back(std::move(r));
  }
  if (successes < per_class || failures < per_class) return {};
  return balance_records(draws, rng_seed, 0.5);
}

Projection render_camera(const OccupancyGrid& grid, const CameraModel& camera) {
  ProjectionSpec spec{camera};
  spec.mode = ProjectionMode::kExact;
  return project_exact(grid, spec);
}

std::optional<SceneData> build_scene_data(const SceneSpec& spec, const DatasetConfig& cfg) {
  SceneData data{generate_scene(spec), {}, {}, {}};
  const auto seed_pose = find_seed_grasp(data.scene.grid, cfg.gripper);
  if (!seed_pose) return std::nullopt;
  data.seed_pose = *seed_pose;
  data.records = balanced_grasps(data.scene.grid, data.seed_pose, cfg.gripper, cfg.grasps_per_scene,
                                 spec.seed, data.scene.id(), cfg.noise, cfg.max_draws);
  if (data.records.empty()) return std::nullopt;
  data.renders.reserve(data.scene.cameras.size());
  for (const auto& c : data.scene.cameras) data.renders.push_back(render_camera(data.scene.grid, c.camera));
  return data;
}

std::vector<SceneData> build_dataset(const DatasetConfig& cfg) {
  cfg.validate();
  std::vector<SceneData> out;
  const int attempts = cfg.scenes * 4;
  for (int i = 0; i < attempts && static_cast<int>(out.size()) < cfg.scenes; ++i) {
    SceneSpec spec = cfg.scene;
    spec.seed = derive_seed(cfg.seed, "scene", static_cast<std::uint64_t>(i));
    auto data = build_scene_data(spec, cfg);
    if (data) out.push_back(std::move(*data));
  }
  if (static_cast<int>(out.size()) < cfg.scenes)
    throw Error("dataset: only " + std::to_string(out.size()) + " of " +
                std::to_string(cfg.scenes) + " scenes had usable grasps");
  return out;
}

std::size_t observation_camera(const SceneData& data, const GraspRecord& record,
                               std::span<const int> elevations, std::uint64_t seed) {
  std::vector<std::size_t> allowed;
  for (std::size_t i = 0; i < data.scene.cameras.size(); ++i)
    if (std::find(elevations.begin(), elevations.end(), data.scene.cameras[i].elevation_deg) !=
        elevations.end())
      allowed.push_back(i);
  if (allowed.empty()) throw InvalidArgumentError("no scene camera at the requested elevations");
  Rng rng = make_rng(seed ^ splitmix64(data.scene.seed), "obs", static_cast<std::uint64_t>(record.draw));
  return allowed[uniform_index(rng, allowed.size())];
}

Observation observation(const SceneData& data, std::size_t camera) {
  return {data.renders.at(camera).depth, data.renders.at(camera).mask,
          data.scene.cameras.at(camera).camera};
}

LabeledSet build_features(const std::vector<SceneData>& scenes, std::span<const std::size_t> which,
                          FeatureKind kind, std::span<const int> elevations, std::uint64_t seed,
                          const FeatureConfig& features,
                          const std::vector<OccupancyGrid>* geometry) {
  if (geometry && geometry->size() != scenes.size())
    throw InvalidArgumentError("build_features: one geometry grid per scene is required");
  std::vector<FeatureVector> rows;
  std::vector<double> labels;
  for (std::size_t s : which) {
    const SceneData& d = scenes.at(s);
    const OccupancyGrid* grid = geometry ? &(*geometry)[s] : &d.scene.grid;
    for (const auto& r : d.records) {
      const std::size_t cam = observation_camera(d, r, elevations, seed);
      rows.push_back(featurize(observation(d, cam), r.pose, d.scene.grid.spec(), grid, kind, features));
      labels.push_back(r.success() ? 1.0 : 0.0);
    }
  }
  LabeledSet set;
  set.x = stack_features(rows);
  set.y = Eigen::Map<const Eigen::VectorXd>(labels.data(), static_cast<Eigen::Index>(labels.size()));
  return set;
}

void split_scenes(std::size_t n, double train_fraction, std::vector<std::size_t>& train,
                  std::vector<std::size_t>& test) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw InvalidArgumentError("split_scenes: train fraction must be in (0, 1)");
  const auto n_train = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n))), 1,
      n > 1 ? n - 1 : 1);
  train.clear();
  test.clear();
  for (std::size_t i = 0; i < n; ++i) (i < n_train ? train : test).push_back(i);
}

std::vector<GraspPose> planning_starts(const SceneData& data, const GripperSpec& gripper, int count,
                                       const PoseNoise& noise, std::uint64_t seed,
                                       bool within_one_sigma) {
  std::vector<GraspPose> starts;
  const std::uint64_t root = seed ^ splitmix64(data.scene.seed);
  for (std::uint64_t i = 0; static_cast<int>(starts.size()) < count && i < 100000; ++i) {
    Rng rng = make_rng(root, "plan-start", i);
    const GraspPose p = perturb_pose(data.seed_pose, noise, rng);
    if (within_one_sigma && (norm(p.position - data.seed_pose.position) > noise.position ||
                             rotation_angle_deg(p.orientation, data.seed_pose.orientation) >
                                 noise.rotation_deg))
      continue;
    if (!is_success(grasp_oracle(data.scene.grid, p, gripper))) starts.push_back(p);
  }
  if (static_cast<int>(starts.size()) < count)
    throw Error("planning_starts: too few failing perturbations");
  return starts;
}

PoseOracle scene_oracle(const SceneData& data, const GripperSpec& gripper) {
  const OccupancyGrid* grid = &data.scene.grid;
  return [grid, gripper](const GraspPose& p) { return grasp_oracle(*grid, p, gripper); };
}

PoseScorer oracle_scorer(const SceneData& data, const GripperSpec& gripper) {
  const OccupancyGrid* grid = &data.scene.grid;
  return [grid, gripper](const GraspPose& p) {
    return is_success(grasp_oracle(*grid, p, gripper)) ? 1.0 : 0.0;
  };
}

PoseScorer constant_scorer(double value) {
  return [value](const GraspPose&) { return value; };
}

PoseScorer model_scorer(const Mlp& model, const SceneData& data, FeatureKind kind,
                        std::size_t camera, const FeatureConfig& features,
                        const OccupancyGrid* geometry) {
  auto obs = std::make_shared<Observation>(observation(data, camera));
  const OccupancyGrid* grid = geometry ? geometry : &data.scene.grid;
  const GridSpec workspace = data.scene.grid.spec();
  return [model, obs, grid, workspace, kind, features](const GraspPose& p) {
    return model.predict(featurize(*obs, p, workspace, grid, kind, features).values);
  };
}

}  // namespace geograsp
