#include <doctest.h>

#include <random>

#include "geograsp/grasp_sim.hpp"
#include "oracles.hpp"

using namespace geograsp;

namespace {

const GridSpec kWorkspace = GridSpec::cube(32, 0.24, {0, 0, 0});

// Top-down pose: approach along world -z, closing along world x.
GraspPose top_down(const Vec3& position) {
  return {position, Quat::from_axis_angle({0, 1, 0}, kPi)};
}

OccupancyGrid thin_wall() {
  PrimitiveShape wall;
  wall.kind = PrimitiveKind::kBox;
  wall.half_extents = {0.008, 0.03, 0.03};
  return rasterize_primitive(wall, kWorkspace);
}

GraspRecord record(bool success, int draw) {
  GraspRecord r;
  r.outcome = success ? GraspOutcome::kSuccess : GraspOutcome::kFailure;
  r.draw = draw;
  return r;
}

std::pair<int, int> class_counts(const std::vector<GraspRecord>& rs) {
  int pos = 0, neg = 0;
  for (const auto& r : rs) (r.success() ? pos : neg)++;
  return {pos, neg};
}

// Quarter turn about z followed by a whole-cell translation, applied to a
// grid (as a cell permutation) and to a pose.
struct CellMotion {
  int turns;
  int dm, dn, dl;

  Mat4 transform(const GridSpec& s) const {
    Mat4 m = Mat4::identity();
    for (int i = 0; i < turns; ++i)
      m = Mat4::rigid({0, 1, 0}, {-1, 0, 0}, {0, 0, 1}, {}) * m;
    const Vec3 t{dm * s.cell_size, dn * s.cell_size, dl * s.cell_size};
    return Mat4::translation(t) * m;
  }

  OccupancyGrid apply(const OccupancyGrid& g) const {
    const GridSpec& s = g.spec();
    GridSpec out = s;
    const Mat4 m = transform(s);
    // the transformed grid's lower corner is the image of some corner of the old one
    Vec3 lo{1e9, 1e9, 1e9};
    for (int i = 0; i < 8; ++i) {
      const Vec3 c = s.origin + Vec3{(i & 1) * s.w * s.cell_size, ((i >> 1) & 1) * s.h * s.cell_size,
                                     ((i >> 2) & 1) * s.d * s.cell_size};
      const Vec3 p = m.transform_point(c);
      lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
    }
    out.origin = lo;
    OccupancyGrid r(out);
    for (int n = 0; n < s.h; ++n)
      for (int mm = 0; mm < s.w; ++mm)
        for (int l = 0; l < s.d; ++l) {
          const IndexCoord c = world_to_index(out, m.transform_point(s.cell_center(n, mm, l)));
          r.set(static_cast<int>(std::lround(c.n)), static_cast<int>(std::lround(c.m)),
                static_cast<int>(std::lround(c.l)), g.at(n, mm, l));
        }
    return r;
  }

  GraspPose apply(const GraspPose& p, const GridSpec& s) const {
    const Mat4 m = transform(s);
    return {m.transform_point(p.position), (Quat::from_matrix(m) * p.orientation).normalized()};
  }
};

}  // namespace

TEST_CASE("gripper solids") {
  const GripperSolids s = gripper_solids({});
  CHECK(s.left_finger.center.x == doctest::Approx(-0.045));
  CHECK(s.right_finger.center.x == doctest::Approx(0.045));
  CHECK(s.closing.half.x == doctest::Approx(0.04));
  CHECK(s.palm.center.z == doctest::Approx(-0.01));
  GripperSpec bad;
  bad.max_opening = 0.005;
  CHECK_THROWS_AS(bad.validate(), InvalidArgumentError);
  bad = {};
  bad.finger_width = 0.0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgumentError);
}

TEST_CASE("grasp oracle examples") {
  const OccupancyGrid wall = thin_wall();
  const GripperSpec g;
  CHECK(grasp_oracle(wall, top_down({0, 0, 0.05}), g) == GraspOutcome::kSuccess);
  CHECK(grasp_oracle(wall, top_down({1.0, 0, 0.05}), g) == GraspOutcome::kFailure);
  CHECK(grasp_oracle(wall, top_down({0.045, 0, 0.05}), g) == GraspOutcome::kCollision);
  // palm pressed into the top of the wall
  CHECK(grasp_oracle(wall, top_down({0, 0, 0.02}), g) == GraspOutcome::kCollision);
  // fingertips above the wall: nothing between the fingers
  CHECK(grasp_oracle(wall, top_down({0, 0, 0.1}), g) == GraspOutcome::kFailure);
  // all material on one side of the closing plane
  CHECK(grasp_oracle(wall, top_down({0.025, 0, 0.05}), g) == GraspOutcome::kFailure);
  CHECK(grasp_oracle(OccupancyGrid(kWorkspace), top_down({0, 0, 0.05}), g) == GraspOutcome::kFailure);
  CHECK_FALSE(is_success(GraspOutcome::kCollision));
}

TEST_CASE("grasp oracle is invariant under cell-preserving motions") {
  std::mt19937_64 rng(21);
  SceneSpec spec;
  int compared = 0, successes = 0;
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    spec.seed = seed;
    const Scene scene = generate_scene(spec);
    const auto seed_pose = find_seed_grasp(scene.grid, {});
    if (!seed_pose) continue;
    const std::vector<GraspRecord> recs =
        augment_grasps(scene.grid, *seed_pose, {}, 30, seed, "", {0.02, 10.0});
    for (const CellMotion mo : {CellMotion{1, 0, 0, 0}, CellMotion{2, 3, -2, 1}, CellMotion{3, -1, 4, -3},
                                CellMotion{0, 5, 0, 2}}) {
      const OccupancyGrid moved = mo.apply(scene.grid);
      CHECK(moved.count_above() == scene.grid.count_above());
      for (const auto& r : recs) {
        CHECK(grasp_oracle(moved, mo.apply(r.pose, scene.grid.spec()), {}) == r.outcome);
        ++compared;
        successes += r.success();
      }
    }
  }
  CHECK(compared > 200);
  CHECK(successes > 0);
}

TEST_CASE("widening the opening never turns a success into a collision") {
  SceneSpec spec;
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    spec.seed = seed;
    const Scene scene = generate_scene(spec);
    const auto seed_pose = find_seed_grasp(scene.grid, {});
    if (!seed_pose) continue;
    for (const auto& r : augment_grasps(scene.grid, *seed_pose, {}, 200, seed, "", {0.01, 5.0})) {
      if (!r.success()) continue;
      for (double opening : {0.085, 0.09, 0.1, 0.12}) {
        GripperSpec wide;
        wide.max_opening = opening;
        CHECK(grasp_oracle(scene.grid, r.pose, wide) != GraspOutcome::kCollision);
        ++checked;
      }
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("seed grasp search") {
  const OccupancyGrid wall = thin_wall();
  const auto pose = find_seed_grasp(wall, {});
  REQUIRE(pose.has_value());
  CHECK(grasp_oracle(wall, *pose, {}) == GraspOutcome::kSuccess);
  // closes across the thin direction
  CHECK(std::abs(pose->closing_axis().x) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK_FALSE(find_seed_grasp(OccupancyGrid(kWorkspace), {}).has_value());
}

TEST_CASE("augment_grasps") {
  PrimitiveShape box;
  box.kind = PrimitiveKind::kBox;
  box.half_extents = {0.02, 0.025, 0.03};
  const OccupancyGrid grid = rasterize_primitive(box, kWorkspace);
  const auto seed_pose = find_seed_grasp(grid, {});
  REQUIRE(seed_pose.has_value());

  SUBCASE("zero noise copies the seed outcome") {
    const auto recs = augment_grasps(grid, *seed_pose, {}, 20, 1, "s", {0.0, 0.0});
    REQUIRE(recs.size() == 20);
    for (const auto& r : recs) {
      CHECK(r.pose == *seed_pose);
      CHECK(r.outcome == grasp_oracle(grid, *seed_pose, {}));
    }
  }
  SUBCASE("fixed seed is reproducible") {
    const auto a = augment_grasps(grid, *seed_pose, {}, 50, 9, "s");
    const auto b = augment_grasps(grid, *seed_pose, {}, 50, 9, "s");
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].pose == b[i].pose);
      CHECK(a[i].outcome == b[i].outcome);
      CHECK(a[i].draw == static_cast<int>(i));
    }
    // draw i does not depend on n
    const auto c = augment_grasps(grid, *seed_pose, {}, 10, 9, "s");
    for (std::size_t i = 0; i < c.size(); ++i) CHECK(c[i].pose == a[i].pose);
  }
  SUBCASE("both classes appear for a graspable centered box") {
    // thin across the jaws, long in the other two directions
    PrimitiveShape slab;
    slab.kind = PrimitiveKind::kBox;
    slab.half_extents = {0.015, 0.05, 0.05};
    const OccupancyGrid g = rasterize_primitive(slab, kWorkspace);
    const auto pose = find_seed_grasp(g, {});
    REQUIRE(pose.has_value());
    int mixed = 0;
    for (std::uint64_t s = 0; s < 1000; ++s) {
      const auto recs = augment_grasps(g, *pose, {}, 100, s);
      CHECK(recs.size() == 100);
      const auto [pos, neg] = class_counts(recs);
      mixed += pos > 0 && neg > 0;
    }
    CHECK(mixed >= 990);
  }
}

TEST_CASE("balance_records") {
  const auto make = [](int neg, int pos) {
    std::vector<GraspRecord> rs;
    for (int i = 0; i < neg + pos; ++i) rs.push_back(record(i >= neg, i));
    return rs;
  };
  SUBCASE("70 failures, 30 successes") {
    const auto out = balance_records(make(70, 30), 1);
    CHECK(class_counts(out) == std::pair{30, 30});
    for (std::size_t i = 1; i < out.size(); ++i) CHECK(out[i - 1].draw < out[i].draw);
  }
  SUBCASE("already balanced") {
    const auto in = make(25, 25);
    const auto out = balance_records(in, 1);
    REQUIRE(out.size() == in.size());
    for (std::size_t i = 0; i < in.size(); ++i) CHECK(out[i].draw == in[i].draw);
  }
  SUBCASE("3 failures, 97 successes") {
    CHECK(class_counts(balance_records(make(3, 97), 5)) == std::pair{3, 3});
  }
  SUBCASE("single class") {
    CHECK_THROWS_AS(balance_records(make(0, 10), 1), InvalidArgumentError);
    CHECK_THROWS_AS(balance_records(make(10, 0), 1), InvalidArgumentError);
  }
  SUBCASE("deterministic") {
    const auto a = balance_records(make(60, 20), 3);
    const auto b = balance_records(make(60, 20), 3);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].draw == b[i].draw);
  }
}

TEST_CASE("generate_scene") {
  SceneSpec spec;
  spec.seed = 42;
  const Scene a = generate_scene(spec);
  const Scene b = generate_scene(spec);
  CHECK(a.cameras.size() == 32);
  CHECK(std::equal(a.grid.values().begin(), a.grid.values().end(), b.grid.values().begin()));
  CHECK(a.grid.count_above() > 0);
  CHECK_FALSE(a.grid.clipped());
  for (std::size_t i = 0; i < a.cameras.size(); ++i) {
    const SceneCamera& c = a.cameras[i];
    CHECK(c.camera.view().data() == b.cameras[i].camera.view().data());
    const double d = norm(c.camera.eye_position() - c.target);
    CHECK(d >= 0.35 - 1e-12);
    CHECK(d <= 0.45 + 1e-12);
    CHECK(d == doctest::Approx(c.distance).epsilon(1e-9));
  }
  CHECK(split_cameras(a, spec, true).size() == 16);
  CHECK(split_cameras(a, spec, false).size() == 16);
  for (std::size_t i : split_cameras(a, spec, false))
    CHECK((a.cameras[i].elevation_deg == 30 || a.cameras[i].elevation_deg == 60));
  spec.seed = 43;
  const Scene c = generate_scene(spec);
  CHECK(c.cameras[0].camera.view().data() != a.cameras[0].camera.view().data());
}

TEST_CASE("the object centroid is in view of every camera") {
  SceneSpec spec;
  int good = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    spec.seed = seed;
    const Scene s = generate_scene(spec);
    bool all = true;
    for (const auto& c : s.cameras) {
      const Vec3 ndc = world_to_ndc(s.shape.center, c.camera);
      all = all && std::abs(ndc.x) < 1.0 && std::abs(ndc.y) < 1.0 && std::abs(ndc.z) < 1.0;
    }
    good += all;
  }
  CHECK(good >= 990);
}
