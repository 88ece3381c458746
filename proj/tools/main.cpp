// geograsp command-line front end.
#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "geograsp/io.hpp"
#include "geograsp/pipeline.hpp"
#include "geograsp/records.hpp"
#include "geograsp/scene_io.hpp"
#include "geograsp/seeding.hpp"
#include "geograsp/shape_fit.hpp"
#include "run_config.hpp"

namespace fs = std::filesystem;
using namespace geograsp;
using cli::ConfigError;
using cli::RunConfig;

namespace {

class InputError : public Error {
 public:
  using Error::Error;
};

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::string kinds_string(const std::vector<PrimitiveKind>& kinds) {
  std::string s;
  for (std::size_t i = 0; i < kinds.size(); ++i) s += (i ? "," : "") + to_string(kinds[i]);
  return s;
}

std::vector<PrimitiveKind> parse_kinds(const std::string& v) {
  std::vector<PrimitiveKind> out;
  std::size_t pos = 0;
  while (pos <= v.size()) {
    const std::size_t end = std::min(v.find(',', pos), v.size());
    try {
      out.push_back(primitive_kind_from_string(v.substr(pos, end - pos)));
    } catch (const Error& e) {
      throw ConfigError(std::string("kinds: ") + e.what());
    }
    pos = end + 1;
  }
  return out;
}

std::string fmt(double v) { return format_double(v); }

// Options shared by every command.
struct Common {
  std::string config;
  std::uint64_t seed = 0;
  std::string out;
  std::string scene;
  std::string data;
  std::string model;
};

void declare_scene_keys(RunConfig& c) {
  const SceneSpec s;
  c.declare("grid_cells", std::to_string(s.grid_cells));
  c.declare("grid_extent", fmt(s.grid_extent));
  c.declare("kinds", kinds_string(s.kinds));
  c.declare("azimuths", join(s.azimuths_deg));
  c.declare("elevations", join(s.elevations_deg));
  c.declare("train_elevations", join(s.train_elevations_deg));
  c.declare("distance_min", fmt(s.distance_min));
  c.declare("distance_max", fmt(s.distance_max));
  c.declare("target_jitter", fmt(s.target_jitter));
  c.declare("fovy_deg", fmt(s.fovy_deg));
  c.declare("z_near", fmt(s.z_near));
  c.declare("z_far", fmt(s.z_far));
  c.declare("image_size", std::to_string(s.image_size));
}

SceneSpec scene_spec(const RunConfig& c, std::uint64_t seed) {
  SceneSpec s;
  s.seed = seed;
  s.grid_cells = static_cast<int>(c.integer("grid_cells"));
  s.grid_extent = c.num("grid_extent");
  s.kinds = parse_kinds(c.str("kinds"));
  s.azimuths_deg = c.ints("azimuths");
  s.elevations_deg = c.ints("elevations");
  s.train_elevations_deg = c.ints("train_elevations");
  s.distance_min = c.num("distance_min");
  s.distance_max = c.num("distance_max");
  s.target_jitter = c.num("target_jitter");
  s.fovy_deg = c.num("fovy_deg");
  s.z_near = c.num("z_near");
  s.z_far = c.num("z_far");
  s.image_size = static_cast<int>(c.integer("image_size"));
  if (s.grid_cells < 1 || s.image_size < 1 || !(s.grid_extent > 0.0) ||
      !(s.distance_min > 0.0 && s.distance_max >= s.distance_min) || !(s.target_jitter >= 0.0))
    throw ConfigError("scene settings out of range");
  return s;
}

void declare_gripper_keys(RunConfig& c) {
  const GripperSpec g;
  c.declare("finger_length", fmt(g.finger_length));
  c.declare("finger_width", fmt(g.finger_width));
  c.declare("finger_thickness", fmt(g.finger_thickness));
  c.declare("max_opening", fmt(g.max_opening));
  c.declare("palm_depth", fmt(g.palm_depth));
}

GripperSpec gripper_spec(const RunConfig& c) {
  GripperSpec g;
  g.finger_length = c.num("finger_length");
  g.finger_width = c.num("finger_width");
  g.finger_thickness = c.num("finger_thickness");
  g.max_opening = c.num("max_opening");
  g.palm_depth = c.num("palm_depth");
  try {
    g.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return g;
}

void declare_plan_keys(RunConfig& c) {
  const PlanConfig p;
  c.declare("max_steps", std::to_string(p.max_steps));
  c.declare("directions", std::to_string(p.directions));
  c.declare("step_position", fmt(p.step.position));
  c.declare("step_rotation_deg", fmt(p.step.rotation_deg));
  c.declare("mode", to_string(p.mode));
  c.declare("move_only_if_better", p.move_only_if_better ? "true" : "false");
  c.declare("elites", std::to_string(p.elites));
}

PlanConfig plan_config(const RunConfig& c, std::uint64_t seed) {
  PlanConfig p;
  p.max_steps = static_cast<int>(c.integer("max_steps"));
  p.directions = static_cast<int>(c.integer("directions"));
  p.step = {c.num("step_position"), c.num("step_rotation_deg")};
  try {
    p.mode = plan_mode_from_string(c.str("mode"));
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  p.move_only_if_better = c.flag("move_only_if_better");
  p.elites = static_cast<int>(c.integer("elites"));
  p.seed = seed;
  try {
    p.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return p;
}

void declare_feature_keys(RunConfig& c) {
  const FeatureConfig f;
  c.declare("observation_size", std::to_string(f.observation_size));
  c.declare("local_size", std::to_string(f.local_size));
  c.declare("local_resolution", std::to_string(f.local.resolution));
  c.declare("local_fovy_deg", fmt(f.local.fovy_deg));
  c.declare("local_z_near", fmt(f.local.z_near));
  c.declare("local_z_far", fmt(f.local.z_far));
  c.declare("local_ray_samples", std::to_string(f.local.ray_samples));
  // truth: the scene's object.voxl; fit: fit.voxl from fit-shape.
  c.declare("geometry", "truth");
}

FeatureConfig feature_config(const RunConfig& c) {
  FeatureConfig f;
  f.observation_size = static_cast<int>(c.integer("observation_size"));
  f.local_size = static_cast<int>(c.integer("local_size"));
  f.local.resolution = static_cast<int>(c.integer("local_resolution"));
  f.local.fovy_deg = c.num("local_fovy_deg");
  f.local.z_near = c.num("local_z_near");
  f.local.z_far = c.num("local_z_far");
  f.local.ray_samples = static_cast<int>(c.integer("local_ray_samples"));
  const std::string g = c.str("geometry");
  if (g != "truth" && g != "fit") throw ConfigError("geometry must be truth or fit, got '" + g + "'");
  return f;
}

// Ground truth or fitted grid for each scene directory.
std::vector<OccupancyGrid> geometry_grids(const RunConfig& c, const std::vector<std::string>& dirs,
                                          const std::vector<SceneData>& scenes) {
  std::vector<OccupancyGrid> out;
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    if (c.str("geometry") == "truth") {
      out.push_back(scenes[i].scene.grid);
    } else {
      const fs::path p = fs::path(dirs[i]) / "fit.voxl";
      if (!fs::exists(p)) throw InputError("missing " + p.string() + " (run fit-shape first)");
      out.push_back(load_voxl(p.string()));
    }
  }
  return out;
}

void write_config(const std::string& dir, const std::string& command, const RunConfig& c,
                  std::uint64_t seed) {
  fs::create_directories(dir);
  write_file((fs::path(dir) / ("config." + command + ".txt")).string(),
             "command=" + command + "\nseed=" + std::to_string(seed) + "\n" + c.resolved());
}

void require_dir(const std::string& dir, const char* what) {
  if (dir.empty()) throw InputError(std::string("--") + what + " is required");
  if (!fs::is_directory(dir)) throw InputError(std::string(what) + " directory not found: " + dir);
}

std::vector<SceneData> load_all(const std::vector<std::string>& dirs) {
  std::vector<SceneData> out;
  for (const auto& d : dirs) out.push_back(load_scene_data(d));
  if (out.empty()) throw InputError("no scene_* directories found");
  return out;
}

// ---- commands ---------------------------------------------------------------

int cmd_gen_scene(const Common& o, RunConfig& c) {
  if (o.out.empty()) throw InputError("--out is required");
  const Scene scene = generate_scene(scene_spec(c, o.seed));
  const std::string dir = (fs::path(o.out) / scene_dir_name(o.seed)).string();
  save_scene(dir, scene);
  write_config(dir, "gen-scene", c, o.seed);
  std::cout << dir << '\n';
  return 0;
}

int cmd_render(const Common& o, RunConfig& c) {
  require_dir(o.scene, "scene");
  const std::string out = o.out.empty() ? o.scene : o.out;
  const Scene scene = load_scene(o.scene);
  const std::string grid_path = (fs::path(o.scene) / c.str("grid")).string();
  const OccupancyGrid grid = load_voxl(grid_path);
  std::vector<Projection> renders;
  for (const auto& cam : scene.cameras) {
    ProjectionSpec spec{cam.camera};
    spec.ray_samples = static_cast<int>(c.integer("ray_samples"));
    spec.sharpness = c.num("sharpness");
    const std::string mode = c.str("mode");
    if (mode == "exact")
      spec.mode = ProjectionMode::kExact;
    else if (mode == "soft")
      spec.mode = ProjectionMode::kSoft;
    else
      throw ConfigError("mode must be exact or soft, got '" + mode + "'");
    try {
      spec.validate();
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
    renders.push_back(project(grid, spec));
  }
  save_renders(out, scene, renders);
  write_config(out, "render", c, o.seed);
  return 0;
}

int cmd_fit_shape(const Common& o, RunConfig& c) {
  require_dir(o.scene, "scene");
  const std::string out = o.out.empty() ? o.scene : o.out;
  const Scene scene = load_scene(o.scene);
  const auto renders = load_renders(o.scene, scene);
  FitConfig f;
  f.lambda_depth = c.num("lambda_depth");
  f.lambda_mask = c.num("lambda_mask");
  f.iterations = static_cast<int>(c.integer("iterations"));
  f.step_size = c.num("step_size");
  f.momentum = c.num("momentum");
  f.logit_parameterization = c.flag("logit");
  f.ray_samples = static_cast<int>(c.integer("ray_samples"));
  f.sharpness = c.num("sharpness");
  f.init_occupancy = c.num("init_occupancy");
  const auto elevations = c.ints("elevations");
  for (std::size_t i = 0; i < scene.cameras.size(); ++i)
    if (std::find(elevations.begin(), elevations.end(), scene.cameras[i].elevation_deg) != elevations.end())
      f.views.push_back({scene.cameras[i].camera, renders[i].depth, renders[i].mask});
  if (f.views.empty()) throw ConfigError("no scene camera at the requested elevations");
  try {
    f.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  std::ostringstream log;
  log << "iter,loss,loss_depth,loss_mask\n";
  const FitResult r = fit_shape(f, scene.grid.spec(), [&](const FitLogEntry& e) {
    log << e.iteration << ',' << fmt(e.loss) << ',' << fmt(e.loss_depth) << ',' << fmt(e.loss_mask) << '\n';
  });
  fs::create_directories(out);
  save_voxl((fs::path(out) / "fit.voxl").string(), r.grid);
  write_file((fs::path(out) / "fit_log.csv").string(), log.str());
  const double score = iou(r.grid, scene.grid);
  write_file((fs::path(out) / "fit_summary.txt").string(),
             "views " + std::to_string(f.views.size()) + "\nfinal_loss " + fmt(r.log.back().loss) +
                 "\niou " + fmt(score) + "\n");
  write_config(out, "fit-shape", c, o.seed);
  std::cout << "iou " << fmt(score) << '\n';
  return 0;
}

int cmd_gen_grasps(const Common& o, RunConfig& c) {
  require_dir(o.scene, "scene");
  const std::string out = o.out.empty() ? o.scene : o.out;
  const Scene scene = load_scene(o.scene);
  const GripperSpec g = gripper_spec(c);
  const auto seed_pose = find_seed_grasp(scene.grid, g);
  if (!seed_pose) throw Error("no seed grasp found for " + scene.id());
  const int count = static_cast<int>(c.integer("count"));
  if (count < 0) throw ConfigError("count must be non-negative");
  const PoseNoise noise{c.num("noise_position"), c.num("noise_rotation_deg")};
  const std::uint64_t rng_seed = derive_seed(o.seed, "gen-grasps", scene.seed);
  std::vector<GraspRecord> records;
  if (c.flag("balance")) {
    if (count < 2 || count % 2) throw ConfigError("balanced count must be even and >= 2");
    records = balanced_grasps(scene.grid, *seed_pose, g, count, rng_seed, scene.id(), noise,
                              static_cast<int>(c.integer("max_draws")));
    if (records.empty()) throw Error("too few successful draws within max_draws for " + scene.id());
  } else {
    records = augment_grasps(scene.grid, *seed_pose, g, count, rng_seed, scene.id(), noise);
  }
  GraspRecord seed_record{scene.id(), *seed_pose, grasp_oracle(scene.grid, *seed_pose, g),
                          GraspSource::kSeed, 0};
  records.insert(records.begin(), seed_record);
  fs::create_directories(out);
  save_records((fs::path(out) / "grasps.jsonl").string(), records);
  write_config(out, "gen-grasps", c, o.seed);
  return 0;
}

int cmd_train(const Common& o, RunConfig& c) {
  require_dir(o.data, "data");
  if (o.out.empty()) throw InputError("--out is required");
  const auto dirs = list_scene_dirs(o.data);
  const auto scenes = load_all(dirs);
  const auto geometry = geometry_grids(c, dirs, scenes);
  FeatureKind kind;
  try {
    kind = feature_kind_from_string(c.str("kind"));
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  std::vector<std::size_t> all(scenes.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const auto elevations = c.ints("elevations");
  const LabeledSet set = build_features(scenes, all, kind, elevations, o.seed, feature_config(c), &geometry);
  TrainConfig t;
  t.epochs = static_cast<int>(c.integer("epochs"));
  t.learning_rate = c.num("learning_rate");
  t.hidden = c.ints("hidden");
  t.seed = o.seed;
  const TrainResult r = train_mlp(set.x, set.y, t);
  fs::create_directories(o.out);
  save_mlp((fs::path(o.out) / "model.mlp").string(), r.model);
  std::ostringstream curve;
  curve << "epoch,loss\n";
  for (std::size_t i = 0; i < r.loss_curve.size(); ++i) curve << i << ',' << fmt(r.loss_curve[i]) << '\n';
  write_file((fs::path(o.out) / "loss.csv").string(), curve.str());
  write_config(o.out, "train-predictor", c, o.seed);
  std::cout << "records " << set.x.rows() << " train_accuracy " << fmt(evaluate(r.model, set.x, set.y))
            << '\n';
  return 0;
}

PoseScorer scorer_for(const std::string& which, const Mlp* model, FeatureKind kind,
                      const SceneData& d, const GripperSpec& g, std::size_t camera,
                      const FeatureConfig& f, const OccupancyGrid* geometry) {
  if (which == "oracle") return oracle_scorer(d, g);
  if (which == "constant") return constant_scorer(0.5);
  if (which == "model") {
    if (!model) throw InputError("--model is required for scorer=model");
    return model_scorer(*model, d, kind, camera, f, geometry);
  }
  throw ConfigError("scorer must be model, oracle or constant, got '" + which + "'");
}

int cmd_plan(const Common& o, RunConfig& c) {
  require_dir(o.scene, "scene");
  const SceneData d = load_scene_data(o.scene);
  const GripperSpec g = gripper_spec(c);
  const FeatureConfig f = feature_config(c);
  const auto geometry = geometry_grids(c, {o.scene}, {d});
  std::optional<Mlp> model;
  if (!o.model.empty()) model = load_mlp(o.model);
  FeatureKind kind;
  try {
    kind = feature_kind_from_string(c.str("kind"));
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  std::size_t camera = d.scene.cameras.size();
  for (std::size_t i = 0; i < d.scene.cameras.size(); ++i)
    if (d.scene.cameras[i].name() == c.str("camera")) camera = i;
  if (camera == d.scene.cameras.size()) throw ConfigError("no camera named '" + c.str("camera") + "'");
  const int start_index = static_cast<int>(c.integer("start_index"));
  if (start_index < 0) throw ConfigError("start_index must be non-negative");
  const auto starts = planning_starts(d, g, start_index + 1,
                                      {c.num("start_position"), c.num("start_rotation_deg")}, o.seed);
  const PlanConfig p = plan_config(c, o.seed);
  const PoseScorer scorer = scorer_for(c.str("scorer"), model ? &*model : nullptr, kind, d, g, camera, f,
                                       &geometry[0]);
  const PlanTrace trace = plan_grasp(starts.back(), scorer, scene_oracle(d, g), p);

  std::ostringstream out;
  for (const auto& s : trace.steps) {
    nlohmann::ordered_json j;
    j["step"] = s.step;
    j["px"] = s.pose.position.x;
    j["py"] = s.pose.position.y;
    j["pz"] = s.pose.position.z;
    j["qx"] = s.pose.orientation.x;
    j["qy"] = s.pose.orientation.y;
    j["qz"] = s.pose.orientation.z;
    j["qw"] = s.pose.orientation.w;
    j["score"] = s.score;
    j["outcome"] = to_string(s.outcome);
    out << j.dump() << '\n';
  }
  nlohmann::ordered_json summary;
  summary["status"] = to_string(trace.status);
  summary["steps"] = static_cast<int>(trace.steps.size()) - 1;
  out << summary.dump() << '\n';
  if (o.out.empty()) {
    std::cout << out.str();
  } else {
    fs::create_directories(o.out);
    write_file((fs::path(o.out) / "trace.jsonl").string(), out.str());
    write_config(o.out, "plan-grasp", c, o.seed);
  }
  return 0;
}

int cmd_eval(const Common& o, RunConfig& c) {
  require_dir(o.data, "data");
  if (o.out.empty()) throw InputError("--out is required");
  const auto dirs = list_scene_dirs(o.data);
  const auto scenes = load_all(dirs);
  const auto geometry = geometry_grids(c, dirs, scenes);
  const GripperSpec g = gripper_spec(c);
  const FeatureConfig f = feature_config(c);
  const PlanConfig p = plan_config(c, o.seed);
  const int repeats = static_cast<int>(c.integer("repeats"));
  const PoseNoise start_noise{c.num("start_position"), c.num("start_rotation_deg")};
  const auto camera_elevations = c.ints("camera_elevations");

  struct Method {
    std::string name;
    std::string scorer;
    std::optional<Mlp> model;
    FeatureKind kind;
  };
  std::vector<Method> methods;
  methods.push_back({"oracle", "oracle", std::nullopt, FeatureKind::kBaseline});
  if (!c.str("geometry_model").empty())
    methods.push_back({"geometry", "model", load_mlp(c.str("geometry_model")), FeatureKind::kGeometryAware});
  if (!c.str("baseline_model").empty())
    methods.push_back({"baseline", "model", load_mlp(c.str("baseline_model")), FeatureKind::kBaseline});
  methods.push_back({"constant", "constant", std::nullopt, FeatureKind::kBaseline});

  std::ostringstream csv;
  csv << "category,method,success_rate,runs\n";
  for (const auto& m : methods) {
    std::vector<PlanningCase> cases;
    for (std::size_t s = 0; s < scenes.size(); ++s) {
      const SceneData& d = scenes[s];
      PlanningCase pc;
      pc.category = d.scene.category();
      pc.oracle = scene_oracle(d, g);
      pc.starts = planning_starts(d, g, repeats, start_noise, o.seed);
      for (int r = 0; r < repeats; ++r) {
        GraspRecord key;
        key.draw = r;
        const std::size_t cam = observation_camera(d, key, camera_elevations, derive_seed(o.seed, "eval-camera"));
        pc.scorers.push_back(scorer_for(m.scorer, m.model ? &*m.model : nullptr, m.kind, d, g, cam, f,
                                        &geometry[s]));
      }
      cases.push_back(std::move(pc));
    }
    const PlanningSummary sum = eval_planning(cases, p, repeats);
    for (const auto& [cat, t] : sum.per_category)
      csv << cat << ',' << m.name << ',' << fmt(t.rate()) << ',' << t.runs << '\n';
    csv << "all," << m.name << ',' << fmt(sum.overall.rate()) << ',' << sum.overall.runs << '\n';
  }
  fs::create_directories(o.out);
  write_file((fs::path(o.out) / "eval.csv").string(), csv.str());
  write_config(o.out, "eval", c, o.seed);
  std::cout << csv.str();
  return 0;
}

void report(const char* kind, const std::string& msg) {
  std::string one_line = msg;
  std::replace(one_line.begin(), one_line.end(), '\n', ' ');
  std::cerr << "error: " << kind << ": " << one_line << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"geograsp: geometry-aware grasp outcome prediction and planning"};
  app.require_subcommand(1);
  Common o;
  RunConfig cfg;
  std::function<int(const Common&, RunConfig&)> run;

  auto add = [&](const std::string& name, const std::string& help, auto declare, auto fn) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->allow_extras();
    sub->add_option("--config", o.config, "key=value configuration file");
    sub->add_option("--seed", o.seed, "root seed");
    sub->add_option("--out", o.out, "output directory");
    sub->callback([&, sub, declare, fn]() {
      declare(cfg);
      if (!o.config.empty()) cfg.load_file(o.config);
      for (const auto& extra : sub->remaining()) cfg.apply_override(extra);
      run = fn;
    });
    return sub;
  };

  add("gen-scene", "generate a seeded scene directory", [](RunConfig& c) { declare_scene_keys(c); },
      cmd_gen_scene);

  auto* render = add(
      "render", "render depth and mask from every scene camera",
      [](RunConfig& c) {
        c.declare("grid", "object.voxl");
        c.declare("ray_samples", std::to_string(kDefaultRaySamples));
        c.declare("mode", "exact");
        c.declare("sharpness", fmt(kDefaultSharpness));
      },
      cmd_render);
  render->add_option("--scene", o.scene, "scene directory")->required();

  auto* fit = add(
      "fit-shape", "fit an occupancy grid to the scene renders",
      [](RunConfig& c) {
        const FitConfig f;
        c.declare("lambda_depth", fmt(f.lambda_depth));
        c.declare("lambda_mask", fmt(f.lambda_mask));
        c.declare("iterations", std::to_string(f.iterations));
        c.declare("step_size", fmt(f.step_size));
        c.declare("momentum", fmt(f.momentum));
        c.declare("logit", f.logit_parameterization ? "true" : "false");
        c.declare("ray_samples", std::to_string(f.ray_samples));
        c.declare("sharpness", fmt(f.sharpness));
        c.declare("init_occupancy", fmt(f.init_occupancy));
        c.declare("elevations", join(SceneSpec{}.train_elevations_deg));
      },
      cmd_fit_shape);
  fit->add_option("--scene", o.scene, "scene directory")->required();

  auto* grasps = add(
      "gen-grasps", "search a seed grasp and write labeled perturbations",
      [](RunConfig& c) {
        declare_gripper_keys(c);
        const PoseNoise n;
        const DatasetConfig d;
        c.declare("count", std::to_string(d.grasps_per_scene));
        c.declare("balance", "true");
        c.declare("max_draws", std::to_string(d.max_draws));
        c.declare("noise_position", fmt(n.position));
        c.declare("noise_rotation_deg", fmt(n.rotation_deg));
      },
      cmd_gen_grasps);
  grasps->add_option("--scene", o.scene, "scene directory")->required();

  auto* train = add(
      "train-predictor", "train an outcome predictor on scene directories",
      [](RunConfig& c) {
        const TrainConfig t;
        c.declare("kind", "geometry");
        c.declare("epochs", std::to_string(t.epochs));
        c.declare("learning_rate", fmt(t.learning_rate));
        c.declare("hidden", join(t.hidden));
        c.declare("elevations", join(SceneSpec{}.train_elevations_deg));
        declare_feature_keys(c);
      },
      cmd_train);
  train->add_option("--data", o.data, "directory holding scene_* directories")->required();

  const auto plan_keys = [](RunConfig& c) {
    declare_gripper_keys(c);
    declare_feature_keys(c);
    declare_plan_keys(c);
    const PlanConfig p;
    c.declare("start_position", fmt(p.step.position));
    c.declare("start_rotation_deg", fmt(p.step.rotation_deg));
  };
  auto* plan = add(
      "plan-grasp", "predictor-guided grasp search from a failing start",
      [plan_keys](RunConfig& c) {
        plan_keys(c);
        c.declare("scorer", "model");
        c.declare("kind", "geometry");
        c.declare("camera", "0_15");
        c.declare("start_index", "0");
      },
      cmd_plan);
  plan->add_option("--scene", o.scene, "scene directory")->required();
  plan->add_option("--model", o.model, "model file from train-predictor");

  auto* eval = add(
      "eval", "planning success rates per category and method",
      [plan_keys](RunConfig& c) {
        plan_keys(c);
        c.declare("repeats", "8");
        c.declare("camera_elevations", join(SceneSpec{}.elevations_deg));
        c.declare("geometry_model", "");
        c.declare("baseline_model", "");
      },
      cmd_eval);
  eval->add_option("--data", o.data, "directory holding scene_* directories")->required();

  try {
    app.parse(argc, argv);
    return run(o, cfg);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    report("usage", e.what());
    return 2;
  } catch (const ConfigError& e) {
    report("config", e.what());
  } catch (const FormatError& e) {
    report("format", std::string(e.what()) + " (byte " + std::to_string(e.offset()) + ")");
  } catch (const InputError& e) {
    report("input", e.what());
  } catch (const IoError& e) {
    report("io", e.what());
  } catch (const InvalidArgumentError& e) {
    report("argument", e.what());
  } catch (const std::exception& e) {
    report("runtime", e.what());
  }
  return 1;
}
