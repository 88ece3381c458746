#pragma once

// Reference implementations kept deliberately naive. They share no code with
// the library beyond plain data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "geograsp/geom.hpp"
#include "geograsp/projection.hpp"
#include "geograsp/voxel_grid.hpp"

namespace oracle {

using geograsp::CameraModel;
using geograsp::GridSpec;
using geograsp::Mat4;
using geograsp::OccupancyGrid;

// Ray marcher: every pixel ray is sampled at D uniform NDC depths and each
// sample is the tent-kernel sum over *all* cells of the grid, in (n, m, l)
// order. Then the channel-wise flattening, literally.
struct Images {
  std::vector<double> depth;
  std::vector<double> mask;
};

inline double tent(double t) { return std::max(0.0, 1.0 - std::abs(t)); }

inline Images march(const OccupancyGrid& grid, const CameraModel& cam, int samples) {
  const GridSpec& g = grid.spec();
  const Mat4& inv = cam.inverse_view_projection();
  const int H = cam.height(), W = cam.width(), D = samples;
  const double zn = cam.z_near(), zf = cam.z_far();
  const double alpha = (zn - zf) / (2.0 * zn * zf);
  const double beta = (zn + zf) / (2.0 * zn * zf);
  const auto vals = grid.values();

  Images out;
  out.depth.resize(static_cast<std::size_t>(H) * W);
  out.mask.resize(static_cast<std::size_t>(H) * W);
  std::vector<double> u(static_cast<std::size_t>(D));
  for (int r = 0; r < H; ++r) {
    for (int c = 0; c < W; ++c) {
      for (int l = 0; l < D; ++l) {
        const double ndc[4] = {(2.0 * c + 1.0) / W - 1.0, (2.0 * r + 1.0) / H - 1.0,
                               (2.0 * l + 1.0) / D - 1.0, 1.0};
        double h[4];
        for (int i = 0; i < 4; ++i)
          h[i] = inv(i, 0) * ndc[0] + inv(i, 1) * ndc[1] + inv(i, 2) * ndc[2] + inv(i, 3) * ndc[3];
        const double x = h[0] / h[3], y = h[1] / h[3], z = h[2] / h[3];
        const double pm = (x - g.origin.x) / g.cell_size - 0.5;
        const double pn = (y - g.origin.y) / g.cell_size - 0.5;
        const double pl = (z - g.origin.z) / g.cell_size - 0.5;
        double acc = 0.0;
        for (int n = 0; n < g.h; ++n)
          for (int m = 0; m < g.w; ++m)
            for (int k = 0; k < g.d; ++k)
              acc += vals[(static_cast<std::size_t>(n) * g.w + m) * g.d + k] * tent(pm - m) *
                     tent(pn - n) * tent(pl - k);
        u[l] = std::min(1.0, acc);
      }
      const std::size_t px = static_cast<std::size_t>(r) * W + c;
      double peak = 0.0;
      for (double v : u) peak = std::max(peak, v);
      out.mask[px] = peak;
      if (peak < 0.5) {
        out.depth[px] = zf;
        continue;
      }
      out.depth[px] = zn;
      for (int l = 0; l < D; ++l) {
        if (u[l] > 0.5) {
          const double zndc = 2.0 * l / D - 1.0;
          out.depth[px] = 1.0 / (alpha * zndc + beta);
          break;
        }
      }
    }
  }
  return out;
}

// Central difference of f along coordinate i of x.
inline double central_difference(const std::function<double(const std::vector<double>&)>& f,
                                 std::vector<double> x, std::size_t i, double h) {
  const double x0 = x[i];
  x[i] = x0 + h;
  const double fp = f(x);
  x[i] = x0 - h;
  const double fm = f(x);
  return (fp - fm) / (2.0 * h);
}

// |a - b| / max(|a|, |b|, floor)
inline double rel_error(double a, double b, double floor = 1e-8) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

inline OccupancyGrid random_grid(const GridSpec& spec, std::mt19937_64& rng, double density) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  OccupancyGrid g(spec);
  for (auto& v : g.mutable_values()) v = u(rng) < density ? u(rng) : 0.0;
  return g;
}

// Camera on a sphere around `target`, looking at it.
inline CameraModel orbit_camera(const geograsp::Vec3& target, double distance, double az_deg,
                                double el_deg, double fovy_deg, double zn, double zf, int w, int h) {
  const double a = geograsp::deg_to_rad(az_deg), e = geograsp::deg_to_rad(el_deg);
  const geograsp::Vec3 dir{std::cos(e) * std::cos(a), std::cos(e) * std::sin(a), std::sin(e)};
  const geograsp::Vec3 up = std::abs(dir.z) > 0.99 ? geograsp::Vec3{0, 1, 0} : geograsp::Vec3{0, 0, 1};
  return CameraModel::look_at_perspective(target + dir * distance, target, up,
                                          geograsp::deg_to_rad(fovy_deg), zn, zf, w, h);
}

// Number of cells whose center lies inside `inside`.
inline std::size_t count_cells(const GridSpec& g,
                               const std::function<bool(const geograsp::Vec3&)>& inside) {
  std::size_t n = 0;
  for (int i = 0; i < g.h; ++i)
    for (int j = 0; j < g.w; ++j)
      for (int k = 0; k < g.d; ++k) n += inside(g.cell_center(i, j, k)) ? 1 : 0;
  return n;
}

}  // namespace oracle
