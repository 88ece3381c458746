#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "geograsp/geom.hpp"

namespace geograsp {

inline constexpr double kOccupancyThreshold = 0.5;

// Placement of an H x W x D grid in the world. Axis mapping: index n (H)
// runs along world y, m (W) along world x and l (D) along world z. Cell
// centers sit at origin + (index + 0.5) * cell_size.
struct GridSpec {
  int h = 32;
  int w = 32;
  int d = 32;
  Vec3 origin{};
  double cell_size = 1.0;

  std::size_t cell_count() const {
    return static_cast<std::size_t>(h) * static_cast<std::size_t>(w) * static_cast<std::size_t>(d);
  }
  // Row-major flat index, H outer and D inner.
  std::size_t flat_index(int n, int m, int l) const {
    return (static_cast<std::size_t>(n) * w + static_cast<std::size_t>(m)) * d +
           static_cast<std::size_t>(l);
  }
  Vec3 extent() const { return {w * cell_size, h * cell_size, d * cell_size}; }
  Vec3 center() const { return origin + extent() * 0.5; }
  Vec3 cell_center(int n, int m, int l) const {
    return origin + Vec3{(m + 0.5) * cell_size, (n + 0.5) * cell_size, (l + 0.5) * cell_size};
  }
  void validate() const;
  bool operator==(const GridSpec&) const = default;

  // Cubic grid of `cells` per side, `extent` meters wide, centered on `center`.
  static GridSpec cube(int cells, double extent, const Vec3& center);
};

// Continuous coordinate in grid index space: x -> m, y -> n, z -> l.
// Integer values land on cell centers.
struct IndexCoord {
  double m = 0.0;
  double n = 0.0;
  double l = 0.0;
};

// The one conversion between world space and 0-based index space.
IndexCoord world_to_index(const GridSpec& spec, const Vec3& p);

// World-anchored occupancy volume with values in [0, 1].
class OccupancyGrid {
 public:
  OccupancyGrid() = default;
  explicit OccupancyGrid(const GridSpec& spec, double fill = 0.0);
  OccupancyGrid(const GridSpec& spec, std::vector<double> values);

  const GridSpec& spec() const { return spec_; }
  std::span<const double> values() const { return values_; }
  std::span<double> mutable_values() { return values_; }

  double at(int n, int m, int l) const { return values_[spec_.flat_index(n, m, l)]; }
  void set(int n, int m, int l, double v);
  bool in_bounds(int n, int m, int l) const {
    return n >= 0 && n < spec_.h && m >= 0 && m < spec_.w && l >= 0 && l < spec_.d;
  }

  std::size_t count_above(double threshold = kOccupancyThreshold) const;
  // True when a rasterized shape did not fit the grid AABB.
  bool clipped() const { return clipped_; }
  void set_clipped(bool c) { clipped_ = c; }

  // Throws RangeError when any value is outside [0, 1] or non-finite.
  void validate_values() const;

 private:
  GridSpec spec_{};
  std::vector<double> values_;
  bool clipped_ = false;
};

// Tent-kernel weighted sum over the (at most 8) neighbouring cells. Points
// outside the grid support return 0.
double trilinear_sample(const OccupancyGrid& grid, const IndexCoord& p);

// Weight of every neighbouring cell contributing to a sample, in (n, m, l)
// lexicographic order. Used by the projection backward pass.
struct CellWeight {
  std::size_t cell;
  double weight;
};
// Appends the non-zero contributions of `p` to `out`; returns how many.
std::size_t trilinear_weights(const GridSpec& spec, const IndexCoord& p,
                              std::vector<CellWeight>& out);

enum class PrimitiveKind { kBox, kCylinder, kSphere, kTube, kPlate };

std::string to_string(PrimitiveKind kind);
PrimitiveKind primitive_kind_from_string(const std::string& s);

// Solid primitive in a local frame placed at `center` with `orientation`.
// Box/plate use half_extents; cylinder/tube are aligned with local z with
// `radius` and `half_height`; the tube removes a coaxial cylinder of
// `inner_radius` over the full height.
struct PrimitiveShape {
  PrimitiveKind kind = PrimitiveKind::kBox;
  Vec3 center{};
  Quat orientation{};
  Vec3 half_extents{0.05, 0.05, 0.05};
  double radius = 0.05;
  double inner_radius = 0.0;
  double half_height = 0.05;

  bool contains(const Vec3& world_point) const;
  // Conservative world-space bounding radius around `center`.
  double bounding_radius() const;
  double volume() const;
};

OccupancyGrid rasterize_primitive(const PrimitiveShape& shape, const GridSpec& spec);

// |{a>t} & {b>t}| / |{a>t} | {b>t}|, 1 when both sets are empty.
double iou(const OccupancyGrid& a, const OccupancyGrid& b, double threshold = kOccupancyThreshold);

// VOXL file format: "VOXL H W D ox oy oz cell\n" followed by H*W*D
// little-endian float32 values, H outer and D inner.
void write_voxl(std::ostream& out, const OccupancyGrid& grid);
OccupancyGrid read_voxl(std::istream& in);
void save_voxl(const std::string& path, const OccupancyGrid& grid);
OccupancyGrid load_voxl(const std::string& path);

}  // namespace geograsp
