#include "geograsp/voxel_grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "geograsp/io.hpp"

namespace geograsp {

void GridSpec::validate() const {
  if (h < 1 || w < 1 || d < 1) throw InvalidArgumentError("grid dims must each be >= 1");
  if (!(cell_size > 0.0) || !std::isfinite(cell_size))
    throw InvalidArgumentError("grid cell_size must be positive and finite");
  if (!is_finite(origin) || !is_finite(origin + extent()))
    throw InvalidArgumentError("grid AABB must be finite");
}

GridSpec GridSpec::cube(int cells, double extent, const Vec3& center) {
  GridSpec s;
  s.h = s.w = s.d = cells;
  s.cell_size = extent / cells;
  s.origin = center - Vec3{extent, extent, extent} * 0.5;
  s.validate();
  return s;
}

IndexCoord world_to_index(const GridSpec& spec, const Vec3& p) {
  const Vec3 q = (p - spec.origin) / spec.cell_size;
  return {q.x - 0.5, q.y - 0.5, q.z - 0.5};
}

OccupancyGrid::OccupancyGrid(const GridSpec& spec, double fill)
    : spec_(spec), values_(spec.cell_count(), fill) {
  spec_.validate();
  validate_values();
}

OccupancyGrid::OccupancyGrid(const GridSpec& spec, std::vector<double> values)
    : spec_(spec), values_(std::move(values)) {
  spec_.validate();
  if (values_.size() != spec_.cell_count())
    throw InvalidArgumentError("grid value count does not match dims");
  validate_values();
}

void OccupancyGrid::set(int n, int m, int l, double v) {
  if (!(v >= 0.0 && v <= 1.0)) throw RangeError("occupancy must lie in [0, 1]");
  values_[spec_.flat_index(n, m, l)] = v;
}

std::size_t OccupancyGrid::count_above(double threshold) const {
  return static_cast<std::size_t>(
      std::count_if(values_.begin(), values_.end(), [&](double v) { return v > threshold; }));
}

void OccupancyGrid::validate_values() const {
  for (double v : values_)
    if (!(v >= 0.0 && v <= 1.0)) throw RangeError("occupancy value outside [0, 1]");
}

namespace {

inline double tent(double t) { return std::max(0.0, 1.0 - std::abs(t)); }

// Lower corner of the 2x2x2 neighbourhood, or false when p has no support.
bool support_corner(const GridSpec& s, const IndexCoord& p, int& n0, int& m0, int& l0) {
  if (!(p.m > -1.0 && p.m < s.w && p.n > -1.0 && p.n < s.h && p.l > -1.0 && p.l < s.d))
    return false;
  m0 = static_cast<int>(std::floor(p.m));
  n0 = static_cast<int>(std::floor(p.n));
  l0 = static_cast<int>(std::floor(p.l));
  return true;
}

}  // namespace

double trilinear_sample(const OccupancyGrid& grid, const IndexCoord& p) {
  const GridSpec& s = grid.spec();
  int n0, m0, l0;
  if (!support_corner(s, p, n0, m0, l0)) return 0.0;
  const auto values = grid.values();
  double acc = 0.0;
  for (int n = n0; n <= n0 + 1; ++n) {
    if (n < 0 || n >= s.h) continue;
    for (int m = m0; m <= m0 + 1; ++m) {
      if (m < 0 || m >= s.w) continue;
      for (int l = l0; l <= l0 + 1; ++l) {
        if (l < 0 || l >= s.d) continue;
        acc += values[s.flat_index(n, m, l)] * tent(p.m - m) * tent(p.n - n) * tent(p.l - l);
      }
    }
  }
  return acc;
}

std::size_t trilinear_weights(const GridSpec& s, const IndexCoord& p, std::vector<CellWeight>& out) {
  int n0, m0, l0;
  if (!support_corner(s, p, n0, m0, l0)) return 0;
  std::size_t added = 0;
  for (int n = n0; n <= n0 + 1; ++n) {
    if (n < 0 || n >= s.h) continue;
    const double wn = tent(p.n - n);
    for (int m = m0; m <= m0 + 1; ++m) {
      if (m < 0 || m >= s.w) continue;
      const double wm = tent(p.m - m);
      for (int l = l0; l <= l0 + 1; ++l) {
        if (l < 0 || l >= s.d) continue;
        const double w = wm * wn * tent(p.l - l);
        if (w == 0.0) continue;
        out.push_back({s.flat_index(n, m, l), w});
        ++added;
      }
    }
  }
  return added;
}

std::string to_string(PrimitiveKind kind) {
  switch (kind) {
    case PrimitiveKind::kBox: return "box";
    case PrimitiveKind::kCylinder: return "cylinder";
    case PrimitiveKind::kSphere: return "sphere";
    case PrimitiveKind::kTube: return "tube";
    case PrimitiveKind::kPlate: return "plate";
  }
  return "box";
}

PrimitiveKind primitive_kind_from_string(const std::string& s) {
  if (s == "box") return PrimitiveKind::kBox;
  if (s == "cylinder") return PrimitiveKind::kCylinder;
  if (s == "sphere") return PrimitiveKind::kSphere;
  if (s == "tube") return PrimitiveKind::kTube;
  if (s == "plate") return PrimitiveKind::kPlate;
  throw InvalidArgumentError("unknown primitive kind '" + s + "'");
}

bool PrimitiveShape::contains(const Vec3& world_point) const {
  const Quat inv{-orientation.x, -orientation.y, -orientation.z, orientation.w};
  const Vec3 p = inv.rotate(world_point - center);
  switch (kind) {
    case PrimitiveKind::kBox:
    case PrimitiveKind::kPlate:
      return std::abs(p.x) < half_extents.x && std::abs(p.y) < half_extents.y &&
             std::abs(p.z) < half_extents.z;
    case PrimitiveKind::kSphere:
      return dot(p, p) < radius * radius;
    case PrimitiveKind::kCylinder:
      return p.x * p.x + p.y * p.y < radius * radius && std::abs(p.z) < half_height;
    case PrimitiveKind::kTube: {
      const double r2 = p.x * p.x + p.y * p.y;
      return r2 < radius * radius && r2 > inner_radius * inner_radius &&
             std::abs(p.z) < half_height;
    }
  }
  return false;
}

double PrimitiveShape::bounding_radius() const {
  switch (kind) {
    case PrimitiveKind::kBox:
    case PrimitiveKind::kPlate:
      return norm(half_extents);
    case PrimitiveKind::kSphere:
      return radius;
    case PrimitiveKind::kCylinder:
    case PrimitiveKind::kTube:
      return std::sqrt(radius * radius + half_height * half_height);
  }
  return 0.0;
}

double PrimitiveShape::volume() const {
  switch (kind) {
    case PrimitiveKind::kBox:
    case PrimitiveKind::kPlate:
      return 8.0 * half_extents.x * half_extents.y * half_extents.z;
    case PrimitiveKind::kSphere:
      return 4.0 / 3.0 * kPi * radius * radius * radius;
    case PrimitiveKind::kCylinder:
      return kPi * radius * radius * 2.0 * half_height;
    case PrimitiveKind::kTube:
      return kPi * std::max(0.0, radius * radius - inner_radius * inner_radius) * 2.0 * half_height;
  }
  return 0.0;
}

namespace {

// Half extents of the world-aligned box enclosing the shape.
Vec3 world_half_extents(const PrimitiveShape& s) {
  Vec3 local;
  switch (s.kind) {
    case PrimitiveKind::kBox:
    case PrimitiveKind::kPlate:
      local = s.half_extents;
      break;
    case PrimitiveKind::kSphere:
      return {s.radius, s.radius, s.radius};
    case PrimitiveKind::kCylinder:
    case PrimitiveKind::kTube:
      local = {s.radius, s.radius, s.half_height};
      break;
  }
  const Mat4 r = s.orientation.to_matrix();
  Vec3 out;
  out.x = std::abs(r(0, 0)) * local.x + std::abs(r(0, 1)) * local.y + std::abs(r(0, 2)) * local.z;
  out.y = std::abs(r(1, 0)) * local.x + std::abs(r(1, 1)) * local.y + std::abs(r(1, 2)) * local.z;
  out.z = std::abs(r(2, 0)) * local.x + std::abs(r(2, 1)) * local.y + std::abs(r(2, 2)) * local.z;
  return out;
}

}  // namespace

OccupancyGrid rasterize_primitive(const PrimitiveShape& shape, const GridSpec& spec) {
  OccupancyGrid grid(spec, 0.0);
  auto values = grid.mutable_values();
  for (int n = 0; n < spec.h; ++n)
    for (int m = 0; m < spec.w; ++m)
      for (int l = 0; l < spec.d; ++l)
        if (shape.contains(spec.cell_center(n, m, l))) values[spec.flat_index(n, m, l)] = 1.0;

  const Vec3 half = world_half_extents(shape);
  const Vec3 lo = shape.center - half;
  const Vec3 hi = shape.center + half;
  const Vec3 g_lo = spec.origin;
  const Vec3 g_hi = spec.origin + spec.extent();
  grid.set_clipped(lo.x < g_lo.x || lo.y < g_lo.y || lo.z < g_lo.z || hi.x > g_hi.x ||
                   hi.y > g_hi.y || hi.z > g_hi.z);
  return grid;
}

double iou(const OccupancyGrid& a, const OccupancyGrid& b, double threshold) {
  if (!(a.spec() == b.spec())) throw InvalidArgumentError("iou: grid specs differ");
  std::size_t inter = 0;
  std::size_t uni = 0;
  const auto va = a.values();
  const auto vb = b.values();
  for (std::size_t i = 0; i < va.size(); ++i) {
    const bool x = va[i] > threshold;
    const bool y = vb[i] > threshold;
    inter += (x && y) ? 1 : 0;
    uni += (x || y) ? 1 : 0;
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

void write_voxl(std::ostream& out, const OccupancyGrid& grid) {
  const GridSpec& s = grid.spec();
  out << "VOXL " << s.h << ' ' << s.w << ' ' << s.d << ' ' << format_double(s.origin.x) << ' '
      << format_double(s.origin.y) << ' ' << format_double(s.origin.z) << ' '
      << format_double(s.cell_size) << '\n';
  for (double v : grid.values()) write_f32_le(out, static_cast<float>(v));
}

OccupancyGrid read_voxl(std::istream& in) {
  const auto t = read_header(in, "VOXL", 7);
  GridSpec s;
  const auto dim = [](const HeaderToken& tok) {
    const long long v = parse_int(tok);
    if (v < 1 || v > 4096) throw FormatError("VOXL: dimension out of range", tok.offset);
    return static_cast<int>(v);
  };
  s.h = dim(t[1]);
  s.w = dim(t[2]);
  s.d = dim(t[3]);
  s.origin = {parse_double(t[4]), parse_double(t[5]), parse_double(t[6])};
  s.cell_size = parse_double(t[7]);
  if (!(s.cell_size > 0.0)) throw FormatError("VOXL: cell_size must be positive", t[7].offset);
  const auto raw = read_f32_le(in, s.cell_count(), "VOXL");
  std::vector<double> values(raw.begin(), raw.end());
  const auto payload_start = static_cast<std::uint64_t>(t.back().offset + t.back().text.size() + 1);
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!(values[i] >= 0.0 && values[i] <= 1.0))
      throw FormatError("VOXL: occupancy value outside [0, 1]", payload_start + 4 * i);
  return OccupancyGrid(s, std::move(values));
}

void save_voxl(const std::string& path, const OccupancyGrid& grid) {
  std::ostringstream ss;
  write_voxl(ss, grid);
  write_file(path, ss.str());
}

OccupancyGrid load_voxl(const std::string& path) {
  std::istringstream in(read_file(path));
  return read_voxl(in);
}

}  // namespace geograsp
