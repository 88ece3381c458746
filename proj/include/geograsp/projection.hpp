#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "geograsp/geom.hpp"
#include "geograsp/pose.hpp"
#include "geograsp/voxel_grid.hpp"

namespace geograsp {

// Raster images are stored row-major. Row r samples NDC y = (2r+1)/H - 1,
// so row 0 is the bottom of the image.
struct DepthMap {
  int width = 0;
  int height = 0;
  double z_near = 0.0;
  double z_far = 0.0;
  // Positive metric depth per pixel, meters.
  std::vector<double> values;

  double at(int row, int col) const { return values[static_cast<std::size_t>(row) * width + col]; }
};

struct MaskMap {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  double at(int row, int col) const { return values[static_cast<std::size_t>(row) * width + col]; }
};

enum class ProjectionMode { kExact, kSoft };

inline constexpr int kDefaultRaySamples = 64;
inline constexpr double kDefaultSharpness = 1.0;

struct ProjectionSpec {
  CameraModel camera;
  // D': samples along each ray, uniformly spaced in NDC depth.
  int ray_samples = kDefaultRaySamples;
  ProjectionMode mode = ProjectionMode::kExact;
  // Soft mode only. Samples are sharpened with sigmoid(k * logit(U)); k = 1
  // leaves them unchanged and k -> inf approaches the exact 0.5 threshold.
  double sharpness = kDefaultSharpness;

  void validate() const;
};

// Ray-aligned resampled volume U, indexed [n', m', l'] with l' innermost.
struct SampledVolume {
  int h = 0;
  int w = 0;
  int d = 0;
  std::vector<double> values;

  double at(int n, int m, int l) const {
    return values[(static_cast<std::size_t>(n) * w + m) * d + l];
  }
};

// World point of ray sample (row, col, slab) through the inverse view-projection.
Vec3 ray_sample_world(const CameraModel& cam, int row, int col, int slab, int ray_samples);

// |f^e(2l/D' - 1)| for every slab l: the metric depth at the near boundary of the slab.
std::vector<double> slab_depths(double z_near, double z_far, int ray_samples);

SampledVolume resample_to_ndc(const OccupancyGrid& grid, const ProjectionSpec& spec);

struct Projection {
  DepthMap depth;
  MaskMap mask;
};

// Channel-wise flattening of the resampled volume with the 0.5 threshold.
Projection project_exact(const OccupancyGrid& grid, const ProjectionSpec& spec);
Projection flatten_exact(const SampledVolume& u, double z_near, double z_far);

// Precomputed trilinear gather for one (grid placement, camera) pair. The
// soft renderer and its reverse pass reuse it across many grid values.
class RayPlan {
 public:
  RayPlan(const GridSpec& grid, const ProjectionSpec& spec);

  const GridSpec& grid_spec() const { return grid_; }
  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * height_; }

  // Soft first-hit rendering:
  //   mask  = 1 - prod(1 - u_l)
  //   depth = sum_l u_l prod_{j<l}(1 - u_j) d_l + (1 - mask) z_far
  Projection render_soft(const OccupancyGrid& grid) const;

  // Accumulates dL/dV into `grad_cells` given dL/d(depth) and dL/d(mask) per pixel.
  void backward_soft(const OccupancyGrid& grid, std::span<const double> grad_depth,
                     std::span<const double> grad_mask, std::span<double> grad_cells) const;

 private:
  struct Sample {
    int slab;
    std::size_t begin;  // into weights_
    std::size_t end;
  };

  double sharpen(double u) const;
  double sharpen_derivative(double u) const;
  double gather(std::span<const double> values, const Sample& s) const;

  GridSpec grid_;
  int width_;
  int height_;
  double z_near_;
  double z_far_;
  double sharpness_;
  std::vector<double> slab_depth_;
  std::vector<std::size_t> ray_begin_;  // pixel_count + 1 offsets into samples_
  std::vector<Sample> samples_;
  std::vector<CellWeight> weights_;
};

Projection project_soft(const OccupancyGrid& grid, const ProjectionSpec& spec);

// Gradient of sum(grad_depth * depth) + sum(grad_mask * mask) with respect to
// every grid value, for the soft projection.
std::vector<double> project_soft_backward(const OccupancyGrid& grid, const ProjectionSpec& spec,
                                          std::span<const double> grad_depth,
                                          std::span<const double> grad_mask);

// Straight-through exact-depth gradient: routes each pixel's upstream depth
// gradient to the cells feeding the first sample above threshold.
std::vector<double> project_exact_straight_through(const OccupancyGrid& grid,
                                                   const ProjectionSpec& spec,
                                                   std::span<const double> grad_depth);

Projection project(const OccupancyGrid& grid, const ProjectionSpec& spec);

// Virtual camera attached to the gripper palm, looking along the approach axis.
struct LocalViewConfig {
  int resolution = 48;
  double fovy_deg = 90.0;
  double z_near = 0.01;
  double z_far = 0.30;
  int ray_samples = kDefaultRaySamples;
};

CameraModel local_camera(const GraspPose& pose, const LocalViewConfig& cfg = {});
Projection project_local(const OccupancyGrid& grid, const GraspPose& pose,
                         const LocalViewConfig& cfg = {});

// DPTH file: "DPTH W H z_near z_far\n" + W*H little-endian float32.
void write_dpth(std::ostream& out, const DepthMap& depth);
DepthMap read_dpth(std::istream& in);
void save_dpth(const std::string& path, const DepthMap& depth);
DepthMap load_dpth(const std::string& path);

// Binary PGM (P5, maxval 255), value = round(mask * 255).
void write_mask_pgm(std::ostream& out, const MaskMap& mask);
MaskMap read_mask_pgm(std::istream& in);
void save_mask_pgm(const std::string& path, const MaskMap& mask);
MaskMap load_mask_pgm(const std::string& path);

}  // namespace geograsp
