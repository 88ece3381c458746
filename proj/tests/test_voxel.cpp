#include <doctest.h>

#include <random>
#include <sstream>

#include "geograsp/io.hpp"
#include "geograsp/voxel_grid.hpp"
#include "oracles.hpp"

using namespace geograsp;

namespace {

GridSpec small_spec(int h, int w, int d) {
  GridSpec s;
  s.h = h;
  s.w = w;
  s.d = d;
  s.origin = {-0.1, 0.2, 0.05};
  s.cell_size = 0.02;
  return s;
}

IndexCoord random_coord(const GridSpec& s, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> m(-1.5, s.w + 0.5), n(-1.5, s.h + 0.5), l(-1.5, s.d + 0.5);
  return {m(rng), n(rng), l(rng)};
}

}  // namespace

TEST_CASE("world_to_index puts cell centers on integers") {
  const GridSpec s = small_spec(4, 5, 6);
  const IndexCoord c = world_to_index(s, s.cell_center(2, 3, 4));
  CHECK(c.n == doctest::Approx(2.0));
  CHECK(c.m == doctest::Approx(3.0));
  CHECK(c.l == doctest::Approx(4.0));
  CHECK(s.flat_index(1, 2, 3) == (1u * 5 + 2) * 6 + 3);
}

TEST_CASE("trilinear_sample examples") {
  const GridSpec s = small_spec(3, 3, 3);
  OccupancyGrid g(s);
  g.set(1, 1, 1, 0.7);
  g.set(1, 2, 1, 1.0);
  CHECK(trilinear_sample(g, {1, 1, 1}) == 0.7);
  CHECK(trilinear_sample(g, {2, 1, 1}) == 1.0);
  g.set(1, 1, 1, 0.0);
  CHECK(trilinear_sample(g, {1.5, 1, 1}) == doctest::Approx(0.5));
  CHECK(trilinear_sample(g, {-5, -5, -5}) == 0.0);
  CHECK(trilinear_sample(g, {3.2, 1, 1}) == 0.0);
}

TEST_CASE("trilinear_sample is linear in the grid values") {
  std::mt19937_64 rng(1);
  const GridSpec s = small_spec(5, 6, 4);
  const OccupancyGrid a = oracle::random_grid(s, rng, 1.0);
  const OccupancyGrid b = oracle::random_grid(s, rng, 1.0);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  for (int i = 0; i < 200; ++i) {
    const double alpha = coef(rng), beta = coef(rng);
    std::vector<double> mix(s.cell_count());
    for (std::size_t k = 0; k < mix.size(); ++k) mix[k] = alpha * a.values()[k] + beta * b.values()[k];
    OccupancyGrid c(s);
    std::copy(mix.begin(), mix.end(), c.mutable_values().begin());
    const IndexCoord p = random_coord(s, rng);
    const double lhs = trilinear_sample(c, p);
    const double rhs = alpha * trilinear_sample(a, p) + beta * trilinear_sample(b, p);
    CHECK(std::abs(lhs - rhs) <= 1e-9);
  }
}

TEST_CASE("trilinear_sample matches the all-cells tent sum") {
  std::mt19937_64 rng(2);
  const GridSpec s = small_spec(4, 4, 4);
  const OccupancyGrid g = oracle::random_grid(s, rng, 0.6);
  for (int i = 0; i < 300; ++i) {
    const IndexCoord p = random_coord(s, rng);
    double acc = 0.0;
    for (int n = 0; n < s.h; ++n)
      for (int m = 0; m < s.w; ++m)
        for (int l = 0; l < s.d; ++l)
          acc += g.at(n, m, l) * oracle::tent(p.m - m) * oracle::tent(p.n - n) * oracle::tent(p.l - l);
    CHECK(trilinear_sample(g, p) == acc);
  }
}

TEST_CASE("trilinear_sample derivative per cell matches finite differences") {
  std::mt19937_64 rng(3);
  const GridSpec s = small_spec(3, 4, 3);
  const OccupancyGrid g = oracle::random_grid(s, rng, 1.0);
  std::vector<CellWeight> w;
  for (int i = 0; i < 50; ++i) {
    const IndexCoord p = random_coord(s, rng);
    w.clear();
    trilinear_weights(s, p, w);
    std::vector<double> analytic(s.cell_count(), 0.0);
    for (const auto& cw : w) analytic[cw.cell] += cw.weight;
    std::vector<double> x(g.values().begin(), g.values().end());
    const auto f = [&](const std::vector<double>& v) {
      OccupancyGrid t(s);
      std::copy(v.begin(), v.end(), t.mutable_values().begin());
      return trilinear_sample(t, p);
    };
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double fd = oracle::central_difference(f, x, k, 1e-4);
      if (analytic[k] == 0.0)
        CHECK(std::abs(fd) < 1e-12);
      else
        CHECK(oracle::rel_error(analytic[k], fd) < 1e-6);
    }
  }
}

TEST_CASE("trilinear_sample is Lipschitz") {
  std::mt19937_64 rng(4);
  const GridSpec s = small_spec(6, 6, 6);
  const OccupancyGrid g = oracle::random_grid(s, rng, 0.5);
  double vmax = 0.0;
  for (double v : g.values()) vmax = std::max(vmax, v);
  std::normal_distribution<double> step(0.0, 0.05);
  for (int i = 0; i < 500; ++i) {
    const IndexCoord p = random_coord(s, rng);
    const IndexCoord q{p.m + step(rng), p.n + step(rng), p.l + step(rng)};
    const double dist = std::sqrt((q.m - p.m) * (q.m - p.m) + (q.n - p.n) * (q.n - p.n) +
                                  (q.l - p.l) * (q.l - p.l));
    CHECK(std::abs(trilinear_sample(g, p) - trilinear_sample(g, q)) <= 3.0 * vmax * dist + 1e-15);
  }
}

TEST_CASE("rasterize a unit box in a 2 m grid") {
  const GridSpec s = GridSpec::cube(32, 2.0, {0, 0, 0});
  const double cell_volume = s.cell_size * s.cell_size * s.cell_size;
  const double shell = 6.0 * 1.0 / (s.cell_size * s.cell_size);
  for (const Vec3 c : {Vec3{0, 0, 0}, Vec3{0.013, -0.021, 0.04}}) {
    PrimitiveShape box;
    box.kind = PrimitiveKind::kBox;
    box.center = c;
    box.half_extents = {0.5, 0.5, 0.5};
    const OccupancyGrid g = rasterize_primitive(box, s);
    const double expected = std::round(1.0 / cell_volume);
    CHECK(std::abs(static_cast<double>(g.count_above()) - expected) <= shell);
    CHECK_FALSE(g.clipped());
  }
}

TEST_CASE("rasterize agrees with a per-cell containment count") {
  const GridSpec s = GridSpec::cube(20, 0.2, {0.1, 0, 0});
  PrimitiveShape cyl;
  cyl.kind = PrimitiveKind::kCylinder;
  cyl.center = {0.1, 0.01, 0};
  cyl.orientation = Quat::from_euler_xyz_deg({30, 10, 0});
  cyl.radius = 0.04;
  cyl.half_height = 0.06;
  const OccupancyGrid g = rasterize_primitive(cyl, s);
  const Quat inv{-cyl.orientation.x, -cyl.orientation.y, -cyl.orientation.z, cyl.orientation.w};
  const std::size_t n = oracle::count_cells(s, [&](const Vec3& p) {
    const Vec3 q = inv.rotate(p - cyl.center);
    return q.x * q.x + q.y * q.y < 0.04 * 0.04 && std::abs(q.z) < 0.06;
  });
  CHECK(g.count_above() == n);
  CHECK(n > 0);
}

TEST_CASE("degenerate primitives rasterize to empty grids") {
  const GridSpec s = GridSpec::cube(16, 0.2, {0, 0, 0});
  PrimitiveShape sphere;
  sphere.kind = PrimitiveKind::kSphere;
  sphere.radius = 0.0;
  CHECK(rasterize_primitive(sphere, s).count_above(0.0) == 0);
  PrimitiveShape tube;
  tube.kind = PrimitiveKind::kTube;
  tube.radius = 0.05;
  tube.inner_radius = 0.05;
  CHECK(rasterize_primitive(tube, s).count_above(0.0) == 0);
}

TEST_CASE("shapes leaving the grid set the clipped flag") {
  const GridSpec s = GridSpec::cube(16, 0.2, {0, 0, 0});
  PrimitiveShape sphere;
  sphere.kind = PrimitiveKind::kSphere;
  sphere.center = {0.09, 0, 0};
  sphere.radius = 0.05;
  const OccupancyGrid g = rasterize_primitive(sphere, s);
  CHECK(g.clipped());
  CHECK(g.count_above() > 0);
}

TEST_CASE("iou") {
  const GridSpec s = GridSpec::cube(16, 0.16, {0, 0, 0});
  PrimitiveShape a;
  a.kind = PrimitiveKind::kBox;
  a.half_extents = {0.02, 0.02, 0.02};
  a.center = {-0.01, 0, 0};
  PrimitiveShape b = a;
  b.center = {0.01, 0, 0};
  const OccupancyGrid ga = rasterize_primitive(a, s);
  const OccupancyGrid gb = rasterize_primitive(b, s);
  CHECK(iou(ga, ga) == 1.0);

  // brute-force count of the same thresholded sets
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < s.cell_count(); ++i) {
    const bool x = ga.values()[i] > 0.5, y = gb.values()[i] > 0.5;
    inter += x && y;
    uni += x || y;
  }
  CHECK(static_cast<double>(inter) / uni == doctest::Approx(1.0 / 3.0));
  CHECK(iou(ga, gb) == doctest::Approx(1.0 / 3.0));

  PrimitiveShape c = a;
  c.center = {0.05, 0.05, 0.05};
  CHECK(iou(ga, rasterize_primitive(c, s)) == 0.0);
  CHECK(iou(OccupancyGrid(s), OccupancyGrid(s)) == 1.0);
  CHECK_THROWS_AS(iou(ga, OccupancyGrid(GridSpec::cube(8, 0.16, {0, 0, 0}))), InvalidArgumentError);
}

TEST_CASE("grid values outside [0, 1] are rejected") {
  OccupancyGrid g(small_spec(2, 2, 2));
  CHECK_THROWS_AS(g.set(0, 0, 0, 1.5), RangeError);
  CHECK_THROWS_AS(OccupancyGrid(small_spec(2, 2, 2), std::vector<double>(8, -0.1)), RangeError);
  CHECK_THROWS(OccupancyGrid(small_spec(2, 2, 2), std::vector<double>(7, 0.0)));
}

TEST_CASE("VOXL round trip") {
  std::mt19937_64 rng(5);
  const GridSpec s = small_spec(3, 4, 5);
  const OccupancyGrid g = oracle::random_grid(s, rng, 0.5);
  std::stringstream ss;
  write_voxl(ss, g);
  const std::string bytes = ss.str();
  CHECK(bytes.rfind("VOXL 3 4 5 -0.1 0.2 0.05 0.02\n", 0) == 0);
  CHECK(bytes.size() == std::string("VOXL 3 4 5 -0.1 0.2 0.05 0.02\n").size() + 4 * 60);
  const OccupancyGrid r = read_voxl(ss);
  CHECK(r.spec() == s);
  for (std::size_t i = 0; i < s.cell_count(); ++i)
    CHECK(r.values()[i] == static_cast<double>(static_cast<float>(g.values()[i])));
  std::stringstream again;
  write_voxl(again, r);
  CHECK(again.str() == bytes);
}

TEST_CASE("VOXL errors carry byte offsets") {
  const std::string header = "VOXL 1 1 2 0 0 0 0.5\n";
  SUBCASE("bad magic") {
    std::istringstream in("VOXX 1 1 1 0 0 0 1\n");
    CHECK_THROWS_AS(read_voxl(in), FormatError);
  }
  SUBCASE("truncated payload") {
    std::istringstream in(header + std::string(5, '\0'));
    try {
      read_voxl(in);
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(e.offset() == header.size() + 5);
    }
  }
  SUBCASE("bad number") {
    std::istringstream in("VOXL 1 1 x 0 0 0 1\n");
    try {
      read_voxl(in);
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(e.offset() == 9);
    }
  }
  SUBCASE("value out of range") {
    std::ostringstream os;
    os << header;
    write_f32_le(os, 0.5f);
    write_f32_le(os, 2.0f);
    std::istringstream in(os.str());
    try {
      read_voxl(in);
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(e.offset() == header.size() + 4);
    }
  }
}
