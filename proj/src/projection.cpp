#include "geograsp/projection.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "geograsp/io.hpp"

namespace geograsp {

void ProjectionSpec::validate() const {
  if (ray_samples < 2) throw InvalidArgumentError("projection needs at least 2 ray samples");
  if (!(sharpness > 0.0) || !std::isfinite(sharpness))
    throw InvalidArgumentError("soft sharpness must be positive and finite");
}

Vec3 ray_sample_world(const CameraModel& cam, int row, int col, int slab, int ray_samples) {
  return ndc_to_world({pixel_center_ndc(col, cam.width()), pixel_center_ndc(row, cam.height()),
                       pixel_center_ndc(slab, ray_samples)},
                      cam);
}

std::vector<double> slab_depths(double z_near, double z_far, int ray_samples) {
  std::vector<double> d(static_cast<std::size_t>(ray_samples));
  for (int l = 0; l < ray_samples; ++l)
    d[l] = -ndc_depth_to_eye_depth(2.0 * l / ray_samples - 1.0, z_near, z_far);
  return d;
}

namespace {

// Index-space box outside which every trilinear sample is exactly zero.
struct SupportBox {
  bool empty = true;
  double lo[3];
  double hi[3];
};

SupportBox support_box(const OccupancyGrid& grid) {
  const GridSpec& s = grid.spec();
  int lo[3] = {s.w, s.h, s.d};
  int hi[3] = {-1, -1, -1};
  const auto v = grid.values();
  for (int n = 0; n < s.h; ++n)
    for (int m = 0; m < s.w; ++m)
      for (int l = 0; l < s.d; ++l) {
        if (v[s.flat_index(n, m, l)] == 0.0) continue;
        const int c[3] = {m, n, l};
        for (int k = 0; k < 3; ++k) {
          lo[k] = std::min(lo[k], c[k]);
          hi[k] = std::max(hi[k], c[k]);
        }
      }
  SupportBox box;
  if (hi[0] < 0) return box;
  box.empty = false;
  // The tent kernel reaches one cell; the slack absorbs rounding along the ray.
  for (int k = 0; k < 3; ++k) {
    box.lo[k] = lo[k] - 1.0 - 1e-6;
    box.hi[k] = hi[k] + 1.0 + 1e-6;
  }
  return box;
}

// Whether the segment a-b (index space) meets the box.
bool segment_hits(const SupportBox& box, const IndexCoord& a, const IndexCoord& b) {
  if (box.empty) return false;
  const double pa[3] = {a.m, a.n, a.l};
  const double pb[3] = {b.m, b.n, b.l};
  double t0 = 0.0;
  double t1 = 1.0;
  for (int k = 0; k < 3; ++k) {
    const double d = pb[k] - pa[k];
    if (d == 0.0) {
      if (pa[k] < box.lo[k] || pa[k] > box.hi[k]) return false;
      continue;
    }
    double ta = (box.lo[k] - pa[k]) / d;
    double tb = (box.hi[k] - pa[k]) / d;
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return false;
  }
  return true;
}

}  // namespace

SampledVolume resample_to_ndc(const OccupancyGrid& grid, const ProjectionSpec& spec) {
  spec.validate();
  const CameraModel& cam = spec.camera;
  SampledVolume u;
  u.h = cam.height();
  u.w = cam.width();
  u.d = spec.ray_samples;
  u.values.assign(static_cast<std::size_t>(u.h) * u.w * u.d, 0.0);
  const SupportBox box = support_box(grid);
  std::size_t idx = 0;
  for (int n = 0; n < u.h; ++n)
    for (int m = 0; m < u.w; ++m) {
      // Rays that never come near a nonzero cell sample zero throughout.
      const IndexCoord first = world_to_index(grid.spec(), ray_sample_world(cam, n, m, 0, u.d));
      const IndexCoord last = world_to_index(grid.spec(), ray_sample_world(cam, n, m, u.d - 1, u.d));
      if (!segment_hits(box, first, last)) {
        idx += static_cast<std::size_t>(u.d);
        continue;
      }
      for (int l = 0; l < u.d; ++l) {
        const Vec3 p = ray_sample_world(cam, n, m, l, u.d);
        u.values[idx++] = std::min(1.0, trilinear_sample(grid, world_to_index(grid.spec(), p)));
      }
    }
  return u;
}

Projection flatten_exact(const SampledVolume& u, double z_near, double z_far) {
  const std::vector<double> slab = slab_depths(z_near, z_far, u.d);
  Projection out;
  out.depth = {u.w, u.h, z_near, z_far, std::vector<double>(static_cast<std::size_t>(u.w) * u.h)};
  out.mask = {u.w, u.h, std::vector<double>(static_cast<std::size_t>(u.w) * u.h)};
  for (int n = 0; n < u.h; ++n) {
    for (int m = 0; m < u.w; ++m) {
      const std::size_t px = static_cast<std::size_t>(n) * u.w + m;
      const double* ray = &u.values[px * u.d];
      const double peak = *std::max_element(ray, ray + u.d);
      out.mask.values[px] = peak;
      if (peak < kOccupancyThreshold) {
        out.depth.values[px] = z_far;
        continue;
      }
      const double* hit = std::find_if(ray, ray + u.d, [](double v) { return v > kOccupancyThreshold; });
      // peak == 0.5 exactly has no strict crossing: fall back to the near plane.
      out.depth.values[px] = hit == ray + u.d ? z_near : slab[hit - ray];
    }
  }
  return out;
}

Projection project_exact(const OccupancyGrid& grid, const ProjectionSpec& spec) {
  return flatten_exact(resample_to_ndc(grid, spec), spec.camera.z_near(), spec.camera.z_far());
}

RayPlan::RayPlan(const GridSpec& grid, const ProjectionSpec& spec)
    : grid_(grid),
      width_(spec.camera.width()),
      height_(spec.camera.height()),
      z_near_(spec.camera.z_near()),
      z_far_(spec.camera.z_far()),
      sharpness_(spec.sharpness),
      slab_depth_(slab_depths(spec.camera.z_near(), spec.camera.z_far(), spec.ray_samples)) {
  spec.validate();
  grid_.validate();
  ray_begin_.reserve(pixel_count() + 1);
  for (int n = 0; n < height_; ++n) {
    for (int m = 0; m < width_; ++m) {
      ray_begin_.push_back(samples_.size());
      for (int l = 0; l < spec.ray_samples; ++l) {
        const Vec3 p = ray_sample_world(spec.camera, n, m, l, spec.ray_samples);
        const std::size_t begin = weights_.size();
        if (trilinear_weights(grid_, world_to_index(grid_, p), weights_) > 0)
          samples_.push_back({l, begin, weights_.size()});
      }
    }
  }
  ray_begin_.push_back(samples_.size());
}

double RayPlan::sharpen(double u) const {
  u = std::clamp(u, 0.0, 1.0);
  if (sharpness_ == 1.0 || u == 0.0 || u == 1.0) return u;
  const double logit = std::log(u) - std::log1p(-u);
  return 1.0 / (1.0 + std::exp(-sharpness_ * logit));
}

double RayPlan::sharpen_derivative(double u) const {
  if (sharpness_ == 1.0) return 1.0;
  const double uc = std::clamp(u, 1e-12, 1.0 - 1e-12);
  const double s = sharpen(uc);
  return sharpness_ * s * (1.0 - s) / (uc * (1.0 - uc));
}

double RayPlan::gather(std::span<const double> values, const Sample& s) const {
  double acc = 0.0;
  for (std::size_t i = s.begin; i < s.end; ++i) acc += values[weights_[i].cell] * weights_[i].weight;
  return acc;
}

Projection RayPlan::render_soft(const OccupancyGrid& grid) const {
  if (!(grid.spec() == grid_)) throw InvalidArgumentError("RayPlan: grid placement differs from plan");
  const auto values = grid.values();
  Projection out;
  out.depth = {width_, height_, z_near_, z_far_, std::vector<double>(pixel_count())};
  out.mask = {width_, height_, std::vector<double>(pixel_count())};
  for (std::size_t px = 0; px < pixel_count(); ++px) {
    double transmittance = 1.0;
    double depth = 0.0;
    for (std::size_t k = ray_begin_[px]; k < ray_begin_[px + 1]; ++k) {
      const double u = sharpen(gather(values, samples_[k]));
      depth += transmittance * u * slab_depth_[samples_[k].slab];
      transmittance *= 1.0 - u;
    }
    out.mask.values[px] = 1.0 - transmittance;
    out.depth.values[px] = depth + transmittance * z_far_;
  }
  return out;
}

void RayPlan::backward_soft(const OccupancyGrid& grid, std::span<const double> grad_depth,
                            std::span<const double> grad_mask, std::span<double> grad_cells) const {
  if (!(grid.spec() == grid_)) throw InvalidArgumentError("RayPlan: grid placement differs from plan");
  if (grad_depth.size() != pixel_count() || grad_mask.size() != pixel_count())
    throw InvalidArgumentError("RayPlan: upstream gradient size mismatch");
  if (grad_cells.size() != grid_.cell_count())
    throw InvalidArgumentError("RayPlan: gradient buffer size mismatch");
  const auto values = grid.values();
  std::vector<double> raw;
  std::vector<double> u;
  std::vector<double> trans;
  for (std::size_t px = 0; px < pixel_count(); ++px) {
    const double gd = grad_depth[px];
    const double gm = grad_mask[px];
    if (gd == 0.0 && gm == 0.0) continue;
    const std::size_t b = ray_begin_[px];
    const std::size_t e = ray_begin_[px + 1];
    raw.resize(e - b);
    u.resize(e - b);
    trans.resize(e - b);
    double t = 1.0;
    for (std::size_t k = b; k < e; ++k) {
      raw[k - b] = gather(values, samples_[k]);
      u[k - b] = sharpen(raw[k - b]);
      trans[k - b] = t;
      t *= 1.0 - u[k - b];
    }
    // Suffix values of the ray beyond sample k: what depth/mask would be if
    // the ray reached k+1 unoccluded.
    double rest_depth = z_far_;
    double rest_mask = 0.0;
    for (std::size_t k = e; k-- > b;) {
      const std::size_t i = k - b;
      const double d = slab_depth_[samples_[k].slab];
      const double dd_du = trans[i] * (d - rest_depth);
      const double dm_du = trans[i] * (1.0 - rest_mask);
      const double g = (gd * dd_du + gm * dm_du) * sharpen_derivative(raw[i]);
      if (g != 0.0)
        for (std::size_t w = samples_[k].begin; w < samples_[k].end; ++w)
          grad_cells[weights_[w].cell] += g * weights_[w].weight;
      rest_depth = u[i] * d + (1.0 - u[i]) * rest_depth;
      rest_mask = u[i] + (1.0 - u[i]) * rest_mask;
    }
  }
}

Projection project_soft(const OccupancyGrid& grid, const ProjectionSpec& spec) {
  return RayPlan(grid.spec(), spec).render_soft(grid);
}

std::vector<double> project_soft_backward(const OccupancyGrid& grid, const ProjectionSpec& spec,
                                          std::span<const double> grad_depth,
                                          std::span<const double> grad_mask) {
  std::vector<double> grad(grid.spec().cell_count(), 0.0);
  RayPlan(grid.spec(), spec).backward_soft(grid, grad_depth, grad_mask, grad);
  return grad;
}

std::vector<double> project_exact_straight_through(const OccupancyGrid& grid,
                                                   const ProjectionSpec& spec,
                                                   std::span<const double> grad_depth) {
  spec.validate();
  const CameraModel& cam = spec.camera;
  if (grad_depth.size() != static_cast<std::size_t>(cam.width()) * cam.height())
    throw InvalidArgumentError("straight-through: upstream gradient size mismatch");
  std::vector<double> grad(grid.spec().cell_count(), 0.0);
  std::vector<CellWeight> weights;
  for (int n = 0; n < cam.height(); ++n) {
    for (int m = 0; m < cam.width(); ++m) {
      const double g = grad_depth[static_cast<std::size_t>(n) * cam.width() + m];
      if (g == 0.0) continue;
      for (int l = 0; l < spec.ray_samples; ++l) {
        const IndexCoord p =
            world_to_index(grid.spec(), ray_sample_world(cam, n, m, l, spec.ray_samples));
        if (trilinear_sample(grid, p) > kOccupancyThreshold) {
          weights.clear();
          trilinear_weights(grid.spec(), p, weights);
          for (const auto& cw : weights) grad[cw.cell] += g * cw.weight;
          break;
        }
      }
    }
  }
  return grad;
}

Projection project(const OccupancyGrid& grid, const ProjectionSpec& spec) {
  return spec.mode == ProjectionMode::kExact ? project_exact(grid, spec) : project_soft(grid, spec);
}

CameraModel local_camera(const GraspPose& pose, const LocalViewConfig& cfg) {
  pose.validate();
  const Vec3 x_local = pose.orientation.rotate({1, 0, 0});
  const Vec3 y_local = pose.orientation.rotate({0, 1, 0});
  const Vec3 approach = pose.orientation.rotate({0, 0, 1});
  // The camera looks down its own -z, which must be the approach axis.
  const Mat4 cam_to_world = Mat4::rigid(-x_local, y_local, -approach, pose.position);
  return CameraModel(perspective(deg_to_rad(cfg.fovy_deg), 1.0, cfg.z_near, cfg.z_far),
                     cam_to_world.rigid_inverse(), cfg.z_near, cfg.z_far, cfg.resolution,
                     cfg.resolution);
}

Projection project_local(const OccupancyGrid& grid, const GraspPose& pose,
                         const LocalViewConfig& cfg) {
  ProjectionSpec spec{local_camera(pose, cfg), cfg.ray_samples, ProjectionMode::kExact,
                      kDefaultSharpness};
  return project_exact(grid, spec);
}

void write_dpth(std::ostream& out, const DepthMap& depth) {
  out << "DPTH " << depth.width << ' ' << depth.height << ' ' << format_double(depth.z_near) << ' '
      << format_double(depth.z_far) << '\n';
  for (double v : depth.values) write_f32_le(out, static_cast<float>(v));
}

DepthMap read_dpth(std::istream& in) {
  const auto t = read_header(in, "DPTH", 4);
  DepthMap d;
  const auto dim = [](const HeaderToken& tok) {
    const long long v = parse_int(tok);
    if (v < 1 || v > 65536) throw FormatError("DPTH: dimension out of range", tok.offset);
    return static_cast<int>(v);
  };
  d.width = dim(t[1]);
  d.height = dim(t[2]);
  d.z_near = parse_double(t[3]);
  d.z_far = parse_double(t[4]);
  if (!(d.z_near > 0.0) || !(d.z_far > d.z_near))
    throw FormatError("DPTH: requires 0 < z_near < z_far", t[3].offset);
  const auto raw = read_f32_le(in, static_cast<std::size_t>(d.width) * d.height, "DPTH");
  d.values.assign(raw.begin(), raw.end());
  return d;
}

void save_dpth(const std::string& path, const DepthMap& depth) {
  std::ostringstream ss;
  write_dpth(ss, depth);
  write_file(path, ss.str());
}

DepthMap load_dpth(const std::string& path) {
  std::istringstream in(read_file(path));
  return read_dpth(in);
}

void write_mask_pgm(std::ostream& out, const MaskMap& mask) {
  out << "P5\n" << mask.width << ' ' << mask.height << "\n255\n";
  for (double v : mask.values) {
    const long q = std::lround(std::clamp(v, 0.0, 1.0) * 255.0);
    out.put(static_cast<char>(static_cast<unsigned char>(q)));
  }
}

MaskMap read_mask_pgm(std::istream& in) {
  // Netpbm header: magic, width, height, maxval separated by whitespace,
  // '#' comments allowed, then exactly one whitespace byte.
  const auto next_token = [&in]() -> HeaderToken {
    int c = in.get();
    for (;;) {
      if (c == '#') {
        while (c != '\n' && c != std::char_traits<char>::eof()) c = in.get();
      } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        c = in.get();
      } else {
        break;
      }
    }
    HeaderToken tok;
    tok.offset = static_cast<std::uint64_t>(in.tellg()) - 1;
    while (c != std::char_traits<char>::eof() && !std::isspace(c)) {
      tok.text.push_back(static_cast<char>(c));
      c = in.get();
    }
    if (tok.text.empty()) throw FormatError("PGM: truncated header", tok.offset);
    return tok;
  };
  const HeaderToken magic = next_token();
  if (magic.text != "P5") throw FormatError("PGM: expected binary P5 magic", 0);
  const HeaderToken tw = next_token();
  const HeaderToken th = next_token();
  const HeaderToken tm = next_token();
  MaskMap mask;
  const long long w = parse_int(tw);
  const long long h = parse_int(th);
  if (w < 1 || w > 65536) throw FormatError("PGM: width out of range", tw.offset);
  if (h < 1 || h > 65536) throw FormatError("PGM: height out of range", th.offset);
  if (parse_int(tm) != 255) throw FormatError("PGM: maxval must be 255", tm.offset);
  mask.width = static_cast<int>(w);
  mask.height = static_cast<int>(h);
  const std::size_t count = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  std::string raw(count, '\0');
  const auto start = static_cast<std::uint64_t>(in.tellg());
  in.read(raw.data(), static_cast<std::streamsize>(count));
  if (static_cast<std::size_t>(in.gcount()) != count)
    throw FormatError("PGM: truncated pixel data", start + static_cast<std::uint64_t>(in.gcount()));
  if (in.peek() != std::char_traits<char>::eof())
    throw FormatError("PGM: trailing bytes after pixel data", start + count);
  mask.values.resize(count);
  for (std::size_t i = 0; i < count; ++i)
    mask.values[i] = static_cast<unsigned char>(raw[i]) / 255.0;
  return mask;
}

void save_mask_pgm(const std::string& path, const MaskMap& mask) {
  std::ostringstream ss;
  write_mask_pgm(ss, mask);
  write_file(path, ss.str());
}

MaskMap load_mask_pgm(const std::string& path) {
  std::istringstream in(read_file(path));
  return read_mask_pgm(in);
}

}  // namespace geograsp
