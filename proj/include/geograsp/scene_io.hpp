#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "geograsp/grasp_sim.hpp"
#include "geograsp/pipeline.hpp"

namespace geograsp {

// Camera file, one "key values..." line each:
//   width, height, z_near, z_far, projection (16, row-major), view (16),
//   and optionally azimuth, elevation, target (3), distance.
void write_camera(std::ostream& out, const SceneCamera& camera);
SceneCamera read_camera(std::istream& in);

// Object file: seed, kind, center, orientation (x y z w), half_extents,
// radius, inner_radius, half_height.
void write_object(std::ostream& out, const Scene& scene);
PrimitiveShape read_object(std::istream& in, std::uint64_t* seed);

// Scene directory layout, under <parent>/scene_<seed>/:
//   object.voxl, object.txt, cam_<az>_<el>.txt,
//   depth_<az>_<el>.dpth, mask_<az>_<el>.pgm, grasps.jsonl
std::string scene_dir_name(std::uint64_t seed);
void save_scene(const std::string& dir, const Scene& scene);
void save_renders(const std::string& dir, const Scene& scene, const std::vector<Projection>& renders);
Scene load_scene(const std::string& dir);
std::vector<Projection> load_renders(const std::string& dir, const Scene& scene);

// Scene, renders and grasps.jsonl. The seed pose is the record whose source
// is "seed"; only perturbed records are kept in `records`.
SceneData load_scene_data(const std::string& dir);

// Subdirectories named scene_* in name order.
std::vector<std::string> list_scene_dirs(const std::string& parent);

}  // namespace geograsp
