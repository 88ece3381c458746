#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "geograsp/io.hpp"
#include "geograsp/pipeline.hpp"
#include "geograsp/records.hpp"
#include "geograsp/scene_io.hpp"
#include "geograsp/planner.hpp"
#include "geograsp/predictor.hpp"
#include "geograsp/shape_fit.hpp"

namespace py = pybind11;
using namespace geograsp;

namespace {

using Array3 = std::array<double, 3>;
using Array4 = std::array<double, 4>;
using F64 = py::array_t<double, py::array::c_style | py::array::forcecast>;

Vec3 vec(const Array3& a) { return {a[0], a[1], a[2]}; }
Array3 arr(const Vec3& v) { return {v.x, v.y, v.z}; }
Quat quat(const Array4& a) { return {a[0], a[1], a[2], a[3]}; }
Array4 arr(const Quat& q) { return {q.x, q.y, q.z, q.w}; }

F64 image(const std::vector<double>& values, int width, int height) {
  F64 out({height, width});
  std::copy(values.begin(), values.end(), out.mutable_data());
  return out;
}

std::vector<double> flat(const F64& a, std::size_t expected, const char* what) {
  if (static_cast<std::size_t>(a.size()) != expected)
    throw py::value_error(std::string(what) + ": expected " + std::to_string(expected) + " values, got " +
                          std::to_string(a.size()));
  return {a.data(), a.data() + a.size()};
}

F64 grid_array(const OccupancyGrid& g) {
  const GridSpec& s = g.spec();
  F64 out({s.h, s.w, s.d});
  std::copy(g.values().begin(), g.values().end(), out.mutable_data());
  return out;
}

OccupancyGrid make_grid(const GridSpec& spec, const F64& values) {
  return OccupancyGrid(spec, flat(values, spec.cell_count(), "grid values"));
}

py::tuple projection_tuple(const Projection& p) {
  return py::make_tuple(image(p.depth.values, p.depth.width, p.depth.height),
                        image(p.mask.values, p.mask.width, p.mask.height));
}

Eigen::MatrixXd matrix(const F64& x) {
  if (x.ndim() != 2) throw py::value_error("features must be a 2-D array");
  Eigen::MatrixXd m(x.shape(0), x.shape(1));
  for (py::ssize_t i = 0; i < x.shape(0); ++i)
    for (py::ssize_t j = 0; j < x.shape(1); ++j) m(i, j) = x.at(i, j);
  return m;
}

Eigen::VectorXd vector(const F64& y) {
  return Eigen::Map<const Eigen::VectorXd>(y.data(), y.size());
}

}  // namespace

PYBIND11_MODULE(_geograsp, m) {
  m.doc() = "Voxel projection, shape fitting, grasp simulation and planning";

  // translators run newest first, so the base goes in before its subclasses
  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidArgumentError>(m, "InvalidArgumentError", base);
  py::register_exception<RangeError>(m, "RangeError", base);
  py::register_exception<DegenerateProjectionError>(m, "DegenerateProjectionError", base);
  py::register_exception<IoError>(m, "IoError", base);
  py::register_exception<FormatError>(m, "FormatError", base);

  m.def("ndc_depth_to_eye_depth", &ndc_depth_to_eye_depth, py::arg("z_ndc"), py::arg("z_near"),
        py::arg("z_far"));
  m.def("eye_depth_to_ndc", &eye_depth_to_ndc, py::arg("z_eye"), py::arg("z_near"), py::arg("z_far"));

  py::class_<CameraModel>(m, "Camera")
      .def_static(
          "look_at",
          [](const Array3& eye, const Array3& target, const Array3& up, double fovy_deg, double z_near,
             double z_far, int width, int height) {
            return CameraModel::look_at_perspective(vec(eye), vec(target), vec(up), deg_to_rad(fovy_deg),
                                                    z_near, z_far, width, height);
          },
          py::arg("eye"), py::arg("target"), py::arg("up"), py::arg("fovy_deg"), py::arg("z_near"),
          py::arg("z_far"), py::arg("width"), py::arg("height"))
      .def_property_readonly("width", &CameraModel::width)
      .def_property_readonly("height", &CameraModel::height)
      .def_property_readonly("z_near", &CameraModel::z_near)
      .def_property_readonly("z_far", &CameraModel::z_far)
      .def_property_readonly("eye", [](const CameraModel& c) { return arr(c.eye_position()); });

  py::class_<GridSpec>(m, "GridSpec")
      .def_static(
          "cube", [](int cells, double extent, const Array3& center) { return GridSpec::cube(cells, extent, vec(center)); },
          py::arg("cells"), py::arg("extent"), py::arg("center") = Array3{0, 0, 0})
      .def_readonly("h", &GridSpec::h)
      .def_readonly("w", &GridSpec::w)
      .def_readonly("d", &GridSpec::d)
      .def_readonly("cell_size", &GridSpec::cell_size)
      .def_property_readonly("origin", [](const GridSpec& s) { return arr(s.origin); })
      .def_property_readonly("shape", [](const GridSpec& s) { return py::make_tuple(s.h, s.w, s.d); });

  py::class_<OccupancyGrid>(m, "OccupancyGrid")
      .def(py::init([](const GridSpec& spec, const F64& values) { return make_grid(spec, values); }),
           py::arg("spec"), py::arg("values"))
      .def(py::init<const GridSpec&, double>(), py::arg("spec"), py::arg("fill") = 0.0)
      .def_property_readonly("spec", &OccupancyGrid::spec)
      .def_property_readonly("values", &grid_array, "copy of the values, shape (h, w, d)")
      .def("count_above", &OccupancyGrid::count_above, py::arg("threshold") = kOccupancyThreshold)
      .def("save", [](const OccupancyGrid& g, const std::string& path) { save_voxl(path, g); })
      .def_static("load", &load_voxl);

  m.def(
      "rasterize",
      [](const std::string& kind, const GridSpec& spec, const Array3& half_extents, double radius,
         double inner_radius, double half_height, const Array3& center, const Array4& orientation) {
        PrimitiveShape s;
        s.kind = primitive_kind_from_string(kind);
        s.half_extents = vec(half_extents);
        s.radius = radius;
        s.inner_radius = inner_radius;
        s.half_height = half_height;
        s.center = vec(center);
        s.orientation = quat(orientation);
        return rasterize_primitive(s, spec);
      },
      py::arg("kind"), py::arg("spec"), py::arg("half_extents") = Array3{0.05, 0.05, 0.05},
      py::arg("radius") = 0.05, py::arg("inner_radius") = 0.0, py::arg("half_height") = 0.05,
      py::arg("center") = Array3{0, 0, 0}, py::arg("orientation") = Array4{0, 0, 0, 1});
  m.def("iou", &iou, py::arg("a"), py::arg("b"), py::arg("threshold") = kOccupancyThreshold);

  m.def(
      "project",
      [](const OccupancyGrid& g, const CameraModel& cam, int ray_samples, const std::string& mode,
         double sharpness) {
        if (mode != "exact" && mode != "soft") throw py::value_error("mode must be 'exact' or 'soft'");
        const ProjectionSpec spec{cam, ray_samples, mode == "exact" ? ProjectionMode::kExact : ProjectionMode::kSoft,
                                  sharpness};
        return projection_tuple(project(g, spec));
      },
      py::arg("grid"), py::arg("camera"), py::arg("ray_samples") = kDefaultRaySamples, py::arg("mode") = "exact",
      py::arg("sharpness") = kDefaultSharpness, "Returns (depth, mask), each of shape (height, width).");
  m.def(
      "project_soft_backward",
      [](const OccupancyGrid& g, const CameraModel& cam, const F64& grad_depth, const F64& grad_mask,
         int ray_samples, double sharpness) {
        const std::size_t n = static_cast<std::size_t>(cam.width()) * cam.height();
        const auto gd = flat(grad_depth, n, "grad_depth");
        const auto gm = flat(grad_mask, n, "grad_mask");
        const auto grad =
            project_soft_backward(g, {cam, ray_samples, ProjectionMode::kSoft, sharpness}, gd, gm);
        const GridSpec& s = g.spec();
        F64 out({s.h, s.w, s.d});
        std::copy(grad.begin(), grad.end(), out.mutable_data());
        return out;
      },
      py::arg("grid"), py::arg("camera"), py::arg("grad_depth"), py::arg("grad_mask"),
      py::arg("ray_samples") = kDefaultRaySamples, py::arg("sharpness") = kDefaultSharpness);

  py::class_<GraspPose>(m, "GraspPose")
      .def(py::init([](const Array3& p, const Array4& q) { return GraspPose{vec(p), quat(q)}; }),
           py::arg("position"), py::arg("orientation") = Array4{0, 0, 0, 1})
      .def_static(
          "from_euler_deg",
          [](const Array3& p, const Array3& deg) { return GraspPose::from_euler_xyz_deg(vec(p), vec(deg)); },
          py::arg("position"), py::arg("euler_xyz_deg"))
      .def_property_readonly("position", [](const GraspPose& p) { return arr(p.position); })
      .def_property_readonly("orientation", [](const GraspPose& p) { return arr(p.orientation); })
      .def_property_readonly("approach_axis", [](const GraspPose& p) { return arr(p.approach_axis()); })
      .def_property_readonly("closing_axis", [](const GraspPose& p) { return arr(p.closing_axis()); })
      .def("__eq__", [](const GraspPose& a, const GraspPose& b) { return a == b; })
      .def("__repr__", [](const GraspPose& p) {
        return "GraspPose(position=(" + format_double(p.position.x) + ", " + format_double(p.position.y) +
               ", " + format_double(p.position.z) + "))";
      });

  py::class_<GripperSpec>(m, "GripperSpec")
      .def(py::init<>())
      .def_readwrite("finger_length", &GripperSpec::finger_length)
      .def_readwrite("finger_width", &GripperSpec::finger_width)
      .def_readwrite("finger_thickness", &GripperSpec::finger_thickness)
      .def_readwrite("max_opening", &GripperSpec::max_opening)
      .def_readwrite("palm_depth", &GripperSpec::palm_depth);

  m.def(
      "grasp_oracle",
      [](const OccupancyGrid& g, const GraspPose& pose, const GripperSpec& gripper) {
        return to_string(grasp_oracle(g, pose, gripper));
      },
      py::arg("grid"), py::arg("pose"), py::arg("gripper") = GripperSpec{},
      "Returns 'success', 'failure' or 'collision'.");
  m.def("find_seed_grasp", &find_seed_grasp, py::arg("grid"), py::arg("gripper") = GripperSpec{},
        py::arg("min_enclosed") = kDefaultMinEnclosedCells);
  m.def(
      "augment_grasps",
      [](const OccupancyGrid& g, const GraspPose& seed_pose, int n, std::uint64_t seed, double sigma_position,
         double sigma_rotation_deg, const GripperSpec& gripper) {
        py::list out;
        for (const auto& r : augment_grasps(g, seed_pose, gripper, n, seed, "", {sigma_position, sigma_rotation_deg}))
          out.append(py::make_tuple(r.pose, to_string(r.outcome)));
        return out;
      },
      py::arg("grid"), py::arg("seed_pose"), py::arg("n"), py::arg("seed"),
      py::arg("sigma_position") = PoseNoise{}.position, py::arg("sigma_rotation_deg") = PoseNoise{}.rotation_deg,
      py::arg("gripper") = GripperSpec{}, "List of (pose, outcome) pairs.");

  py::class_<SceneCamera>(m, "SceneCamera")
      .def_readonly("camera", &SceneCamera::camera)
      .def_readonly("azimuth_deg", &SceneCamera::azimuth_deg)
      .def_readonly("elevation_deg", &SceneCamera::elevation_deg)
      .def_property_readonly("name", &SceneCamera::name);
  py::class_<Scene>(m, "Scene")
      .def_readonly("seed", &Scene::seed)
      .def_readonly("grid", &Scene::grid)
      .def_readonly("cameras", &Scene::cameras)
      .def_property_readonly("category", &Scene::category)
      .def("save", [](const Scene& s, const std::string& dir) { save_scene(dir, s); });
  m.def(
      "generate_scene",
      [](std::uint64_t seed) {
        SceneSpec spec;
        spec.seed = seed;
        return generate_scene(spec);
      },
      py::arg("seed"));
  m.def("load_scene", &load_scene, py::arg("dir"));

  m.def(
      "fit_shape",
      [](const GridSpec& spec, const std::vector<std::tuple<CameraModel, F64, F64>>& views, int iterations,
         double lambda_depth, double lambda_mask, double step_size, double sharpness) {
        FitConfig cfg;
        for (const auto& [cam, depth, mask] : views) {
          const std::size_t n = static_cast<std::size_t>(cam.width()) * cam.height();
          cfg.views.push_back({cam,
                               {cam.width(), cam.height(), cam.z_near(), cam.z_far(), flat(depth, n, "depth")},
                               {cam.width(), cam.height(), flat(mask, n, "mask")}});
        }
        cfg.iterations = iterations;
        cfg.lambda_depth = lambda_depth;
        cfg.lambda_mask = lambda_mask;
        cfg.step_size = step_size;
        cfg.sharpness = sharpness;
        FitResult r;
        {
          py::gil_scoped_release release;
          r = fit_shape(cfg, spec);
        }
        std::vector<double> losses;
        for (const auto& e : r.log) losses.push_back(e.loss);
        return py::make_tuple(r.grid, losses);
      },
      py::arg("spec"), py::arg("views"), py::arg("iterations") = FitConfig{}.iterations,
      py::arg("lambda_depth") = kDefaultLambdaDepth, py::arg("lambda_mask") = kDefaultLambdaMask,
      py::arg("step_size") = FitConfig{}.step_size, py::arg("sharpness") = kDefaultSharpness,
      "views: list of (camera, depth, mask). Returns (grid, loss per iteration).");

  py::class_<Mlp>(m, "Mlp")
      .def(py::init<std::vector<int>>(), py::arg("sizes"))
      .def_static("xavier", &Mlp::xavier, py::arg("sizes"), py::arg("seed"))
      .def_property_readonly("sizes", &Mlp::sizes)
      .def_property("parameters", &Mlp::parameters,
                    [](Mlp& m, const std::vector<double>& p) { m.set_parameters(p); })
      .def("predict", [](const Mlp& m, const F64& x) {
        if (x.ndim() == 1) return py::cast(m.predict(std::span<const double>(x.data(), x.size())));
        const Eigen::VectorXd s = m.predict(matrix(x));
        return py::cast(std::vector<double>(s.data(), s.data() + s.size()));
      })
      .def(
          "loss",
          [](const Mlp& m, const F64& x, const F64& y) {
            std::vector<double> grad;
            const double l = m.loss(matrix(x), vector(y), &grad);
            return py::make_tuple(l, grad);
          },
          py::arg("x"), py::arg("y"), "Returns (mean cross-entropy, gradient in parameters order).")
      .def("save", [](const Mlp& m, const std::string& path) { save_mlp(path, m); })
      .def_static("load", &load_mlp);

  m.def(
      "train_mlp",
      [](const F64& x, const F64& y, int epochs, double learning_rate, std::uint64_t seed,
         const std::vector<int>& hidden) {
        const TrainResult r = train_mlp(matrix(x), vector(y), {epochs, learning_rate, seed, hidden});
        return py::make_tuple(r.model, r.loss_curve);
      },
      py::arg("x"), py::arg("y"), py::arg("epochs") = TrainConfig{}.epochs,
      py::arg("learning_rate") = TrainConfig{}.learning_rate, py::arg("seed") = 0,
      py::arg("hidden") = kDefaultHiddenSizes, "Returns (model, loss curve).");

  m.def(
      "plan_grasp",
      [](const GraspPose& start, const std::function<double(const GraspPose&)>& scorer,
         const OccupancyGrid& grid, int max_steps, int directions, double step_position, double step_rotation_deg,
         std::uint64_t seed, const std::string& mode, bool move_only_if_better, const GripperSpec& gripper) {
        PlanConfig cfg;
        cfg.max_steps = max_steps;
        cfg.directions = directions;
        cfg.step = {step_position, step_rotation_deg};
        cfg.seed = seed;
        cfg.mode = plan_mode_from_string(mode);
        cfg.move_only_if_better = move_only_if_better;
        const PlanTrace t = plan_grasp(start, scorer,
                                       [&](const GraspPose& p) { return grasp_oracle(grid, p, gripper); }, cfg);
        py::list steps;
        for (const auto& s : t.steps) steps.append(py::make_tuple(s.step, s.pose, s.score, to_string(s.outcome)));
        return py::make_tuple(to_string(t.status), steps);
      },
      py::arg("start"), py::arg("scorer"), py::arg("grid"), py::arg("max_steps") = PlanConfig{}.max_steps,
      py::arg("directions") = PlanConfig{}.directions, py::arg("step_position") = PlanConfig{}.step.position,
      py::arg("step_rotation_deg") = PlanConfig{}.step.rotation_deg, py::arg("seed") = 0,
      py::arg("mode") = "top1", py::arg("move_only_if_better") = false, py::arg("gripper") = GripperSpec{},
      "Searches from a failing start; the oracle is the grid's grasp oracle. Returns (status, steps).");
}
