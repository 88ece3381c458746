#include <doctest.h>

#include <random>

#include "geograsp/geom.hpp"
#include "geograsp/pose.hpp"
#include "geograsp/seeding.hpp"

using namespace geograsp;

namespace {

CameraModel axis_camera(double zn, double zf) {
  return CameraModel::look_at_perspective({0, 0, 0}, {0, 0, -1}, {0, 1, 0}, deg_to_rad(60), zn, zf,
                                          32, 32);
}

void check_near(const Vec3& a, const Vec3& b, double tol) {
  CHECK(std::abs(a.x - b.x) <= tol);
  CHECK(std::abs(a.y - b.y) <= tol);
  CHECK(std::abs(a.z - b.z) <= tol);
}

}  // namespace

TEST_CASE("world_to_ndc maps the near and far plane to -1 and +1") {
  const CameraModel cam = axis_camera(0.1, 10.0);
  const Vec3 n = world_to_ndc({0, 0, -0.1}, cam);
  const Vec3 f = world_to_ndc({0, 0, -10.0}, cam);
  CHECK(std::abs(n.x) < 1e-12);
  CHECK(std::abs(n.y) < 1e-12);
  CHECK(n.z == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(f.z == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("world_to_ndc rejects the eye point and points behind the camera") {
  const CameraModel cam = axis_camera(0.1, 10.0);
  CHECK_THROWS_AS(world_to_ndc({0, 0, 0}, cam), DegenerateProjectionError);
  CHECK_THROWS_AS(world_to_ndc({0, 0, 1}, cam), DegenerateProjectionError);
}

TEST_CASE("ndc_depth_to_eye_depth") {
  CHECK(ndc_depth_to_eye_depth(-1.0, 0.1, 10.0) == doctest::Approx(-0.1).epsilon(1e-12));
  CHECK(ndc_depth_to_eye_depth(1.0, 0.1, 10.0) == doctest::Approx(-10.0).epsilon(1e-12));
  // harmonic-mean closed form
  const double mid = -2.0 * 0.1 * 10.0 / (0.1 + 10.0);
  CHECK(ndc_depth_to_eye_depth(0.0, 0.1, 10.0) == doctest::Approx(mid).epsilon(1e-12));
  CHECK(ndc_depth_to_eye_depth(0.0, 0.1, 10.0) == doctest::Approx(-0.1980198).epsilon(1e-7));
  CHECK_THROWS_AS(ndc_depth_to_eye_depth(1.5, 0.1, 10.0), RangeError);
  CHECK_THROWS_AS(ndc_depth_to_eye_depth(-1.0000001, 0.1, 10.0), RangeError);
}

TEST_CASE("depth conversion round trip and monotonicity") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> near(0.01, 1.0), span(0.1, 50.0), z(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double zn = near(rng), zf = zn + span(rng);
    const double a = z(rng), b = z(rng);
    const double ea = ndc_depth_to_eye_depth(a, zn, zf);
    CHECK(eye_depth_to_ndc(ea, zn, zf) == doctest::Approx(a).epsilon(1e-9).scale(1));
    // deeper NDC is farther away
    if (a < b) CHECK(ea > ndc_depth_to_eye_depth(b, zn, zf));
  }
}

TEST_CASE("world_to_ndc agrees with the eye-depth conversion along the axis") {
  const CameraModel cam = axis_camera(0.2, 3.0);
  for (double d : {0.21, 0.35, 1.0, 2.5, 2.99}) {
    const Vec3 ndc = world_to_ndc({0, 0, -d}, cam);
    CHECK(ndc_depth_to_eye_depth(ndc.z, 0.2, 3.0) == doctest::Approx(-d).epsilon(1e-10));
  }
}

TEST_CASE("look_at") {
  SUBCASE("canonical frame") {
    const Mat4 v = look_at({0, 0, 1}, {0, 0, 0}, {0, 1, 0});
    const Vec3 o = v.transform_point({0, 0, 0});
    CHECK(std::abs(o.x) < 1e-12);
    CHECK(std::abs(o.y) < 1e-12);
    CHECK(o.z == doctest::Approx(-1.0));
  }
  SUBCASE("looking along -x with z up") {
    const Mat4 v = look_at({1, 0, 0}, {0, 0, 0}, {0, 0, 1});
    const Vec3 o = v.transform_point({0, 0, 0});
    CHECK(std::abs(o.x) < 1e-12);
    CHECK(std::abs(o.y) < 1e-12);
    CHECK(o.z == doctest::Approx(-1.0));
    // world up stays camera up
    const Vec3 up = v.transform_direction({0, 0, 1});
    CHECK(up.y == doctest::Approx(1.0));
    CHECK(v.is_rigid());
  }
  SUBCASE("degenerate input") {
    CHECK_THROWS_AS(look_at({1, 2, 3}, {1, 2, 3}, {0, 0, 1}), InvalidArgumentError);
    CHECK_THROWS_AS(look_at({0, 0, 1}, {0, 0, 0}, {0, 0, 1}), InvalidArgumentError);
  }
}

TEST_CASE("world and NDC round trip") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const CameraModel cam = CameraModel::look_at_perspective({0.4, -0.2, 0.3}, {0, 0, 0}, {0, 0, 1},
                                                           deg_to_rad(45), 0.15, 0.75, 48, 40);
  for (int i = 0; i < 100; ++i) {
    const Vec3 ndc{u(rng), u(rng), u(rng)};
    const Vec3 back = world_to_ndc(ndc_to_world(ndc, cam), cam);
    CHECK(std::abs(back.x - ndc.x) < 1e-9);
    CHECK(std::abs(back.y - ndc.y) < 1e-9);
    CHECK(std::abs(back.z - ndc.z) < 1e-9);
  }
  check_near(cam.eye_position(), {0.4, -0.2, 0.3}, 1e-12);
}

TEST_CASE("Mat4 inverse") {
  const Mat4 k = perspective(deg_to_rad(50), 1.3, 0.1, 5.0);
  const Mat4 id = k * k.inverse();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(std::abs(id(i, j) - (i == j ? 1.0 : 0.0)) < 1e-12);
  CHECK_THROWS_AS(Mat4().inverse(), DegenerateProjectionError);
}

TEST_CASE("quaternions") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> a(-170.0, 170.0), b(-80.0, 80.0);
  for (int i = 0; i < 100; ++i) {
    const Vec3 e{a(rng), b(rng), a(rng)};
    const Quat q = Quat::from_euler_xyz_deg(e);
    CHECK(q.norm() == doctest::Approx(1.0).epsilon(1e-12));
    check_near(q.to_euler_xyz_deg(), e, 1e-9);
    const Quat r = Quat::from_matrix(q.to_matrix());
    CHECK(rotation_angle_deg(q, r) < 1e-6);
    const Vec3 v{0.3, -0.4, 1.2};
    check_near(q.rotate(v), q.to_matrix().transform_direction(v), 1e-12);
  }
  const Quat z90 = Quat::from_axis_angle({0, 0, 1}, kPi / 2);
  check_near(z90.rotate({1, 0, 0}), {0, 1, 0}, 1e-12);
  CHECK(rotation_angle_deg(Quat{}, z90) == doctest::Approx(90.0));
  CHECK(rotation_angle_deg(z90, Quat{-z90.x, -z90.y, -z90.z, -z90.w}) < 1e-6);
}

TEST_CASE("grasp pose validation") {
  GraspPose p;
  CHECK_NOTHROW(p.validate());
  p.orientation = {0, 0, 0, 2};
  CHECK_THROWS_AS(p.validate(), InvalidArgumentError);
  const GraspPose e = GraspPose::from_euler_xyz_deg({0, 0, 0}, {0, 90, 0});
  check_near(e.approach_axis(), {1, 0, 0}, 1e-12);
}

TEST_CASE("seed derivation") {
  CHECK(derive_seed(1, "a", 0) == derive_seed(1, "a", 0));
  CHECK(derive_seed(1, "a", 0) != derive_seed(1, "b", 0));
  CHECK(derive_seed(1, "a", 0) != derive_seed(1, "a", 1));
  CHECK(derive_seed(1, "a", 0) != derive_seed(2, "a", 0));
  // FNV-1a reference values
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  Rng r1 = make_rng(9, "x", 4), r2 = make_rng(9, "x", 4);
  for (int i = 0; i < 10; ++i) CHECK(normal(r1) == normal(r2));
}
