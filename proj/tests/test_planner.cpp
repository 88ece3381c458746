#include <doctest.h>

#include <algorithm>

#include "geograsp/pipeline.hpp"
#include "geograsp/planner.hpp"

using namespace geograsp;

namespace {

const std::vector<SceneData>& box_scenes() {
  static const std::vector<SceneData> scenes = [] {
    DatasetConfig cfg;
    cfg.seed = 77;
    cfg.scenes = 3;
    cfg.scene.kinds = {PrimitiveKind::kBox};
    return build_dataset(cfg);
  }();
  return scenes;
}

std::vector<PlanningCase> cases_with(const std::function<PoseScorer(const SceneData&)>& scorer) {
  std::vector<PlanningCase> cases;
  for (const SceneData& d : box_scenes()) {
    PlanningCase c;
    c.category = d.scene.category();
    c.scorers = {scorer(d)};
    c.oracle = scene_oracle(d, {});
    c.starts = planning_starts(d, {}, 8, {}, d.scene.seed);
    cases.push_back(std::move(c));
  }
  return cases;
}

void check_invariants(const PlanTrace& t, const PlanConfig& cfg, const PoseOracle& oracle) {
  REQUIRE(!t.steps.empty());
  CHECK(t.steps.size() <= static_cast<std::size_t>(cfg.max_steps) + 1);
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    CHECK(t.steps[i].step == static_cast<int>(i));
    CHECK(t.steps[i].outcome == oracle(t.steps[i].pose));
    if (i + 1 < t.steps.size()) CHECK_FALSE(is_success(t.steps[i].outcome));
  }
  if (t.success()) {
    CHECK(is_success(t.steps.back().outcome));
  } else {
    CHECK(t.steps.size() == static_cast<std::size_t>(cfg.max_steps) + 1);
    CHECK_FALSE(is_success(t.steps.back().outcome));
  }
}

}  // namespace

TEST_CASE("degenerate walk") {
  PlanConfig cfg;
  cfg.max_steps = 1;
  cfg.directions = 1;
  cfg.step = {0.0, 0.0};
  const GraspPose start = GraspPose::from_euler_xyz_deg({0.01, -0.02, 0.05}, {10, 20, 30});
  const PlanTrace t = plan_grasp(start, constant_scorer(0.5),
                                 [](const GraspPose&) { return GraspOutcome::kFailure; }, cfg);
  REQUIRE(t.steps.size() == 2);
  CHECK(t.steps[1].pose == start);
  CHECK(t.status == PlanStatus::kExhausted);
  CHECK(to_string(t.status) == "exhausted");
}

TEST_CASE("plan_grasp input checks") {
  const GraspPose start;
  const auto always = [](const GraspPose&) { return GraspOutcome::kSuccess; };
  CHECK_THROWS_AS(plan_grasp(start, constant_scorer(0.5), always, {}), PlanPreconditionError);
  PlanConfig cfg;
  cfg.max_steps = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgumentError);
  cfg = {};
  cfg.directions = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgumentError);
  cfg = {};
  cfg.step.position = -0.01;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgumentError);
  CHECK(plan_mode_from_string("cem") == PlanMode::kCem);
  CHECK_THROWS_AS(plan_mode_from_string("adam"), InvalidArgumentError);
}

TEST_CASE("oracle-guided planning from nearby failures") {
  const SceneData& d = box_scenes().front();
  const PoseOracle oracle = scene_oracle(d, {});
  const PoseScorer scorer = oracle_scorer(d, {});
  const std::vector<GraspPose> starts = planning_starts(d, {}, 100, {}, 5);
  REQUIRE(starts.size() == 100);
  PlanConfig cfg;
  int ok = 0;
  std::vector<std::size_t> steps;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    CHECK_FALSE(is_success(oracle(starts[i])));
    cfg.seed = i;
    const PlanTrace t = plan_grasp(starts[i], scorer, oracle, cfg);
    check_invariants(t, cfg, oracle);
    if (t.success()) {
      ++ok;
      steps.push_back(t.steps.size() - 1);
    }
  }
  MESSAGE("oracle scorer: " << ok << "/100 successes");
  CHECK(ok > 50);
  REQUIRE(!steps.empty());
  std::nth_element(steps.begin(), steps.begin() + steps.size() / 2, steps.end());
  CHECK(steps[steps.size() / 2] <= 3);
}

TEST_CASE("paired comparison: oracle scorer beats a constant scorer") {
  PlanConfig cfg;
  cfg.seed = 3;
  const PlanningSummary oracle =
      eval_planning(cases_with([](const SceneData& d) { return oracle_scorer(d, {}); }), cfg);
  const PlanningSummary constant =
      eval_planning(cases_with([](const SceneData&) { return constant_scorer(0.5); }), cfg);
  CHECK(oracle.overall.runs == 24);
  CHECK(constant.overall.runs == 24);
  CHECK(oracle.per_category.at("box").runs == 24);
  MESSAGE("oracle " << oracle.overall.rate() << ", constant " << constant.overall.rate());
  CHECK(constant.overall.rate() < oracle.overall.rate());
  CHECK(oracle.overall.rate() >= 0.9);
}

TEST_CASE("planning is deterministic and anytime") {
  const SceneData& d = box_scenes()[1];
  const PoseOracle oracle = scene_oracle(d, {});
  const PoseScorer scorer = constant_scorer(0.5);
  const GraspPose start = planning_starts(d, {}, 1, {}, 9).front();
  PlanConfig cfg;
  cfg.seed = 12;
  const PlanTrace a = plan_grasp(start, scorer, oracle, cfg);
  const PlanTrace b = plan_grasp(start, scorer, oracle, cfg);
  REQUIRE(a.steps.size() == b.steps.size());
  for (std::size_t i = 0; i < a.steps.size(); ++i) {
    CHECK(a.steps[i].pose == b.steps[i].pose);
    CHECK(a.steps[i].score == b.steps[i].score);
  }
  // a shorter budget replays a prefix of the longer trace
  cfg.max_steps = 5;
  const PlanTrace shorter = plan_grasp(start, scorer, oracle, cfg);
  for (std::size_t i = 0; i < shorter.steps.size(); ++i) CHECK(shorter.steps[i].pose == a.steps[i].pose);

  const auto cases = cases_with([](const SceneData&) { return constant_scorer(0.5); });
  double previous = -1.0;
  for (int budget : {5, 10, 20}) {
    cfg.max_steps = budget;
    const double rate = eval_planning(cases, cfg).overall.rate();
    CHECK(rate >= previous);
    previous = rate;
  }
}

TEST_CASE("cem mode and move_only_if_better") {
  const SceneData& d = box_scenes()[2];
  const PoseOracle oracle = scene_oracle(d, {});
  const GraspPose start = planning_starts(d, {}, 1, {}, 2).front();

  PlanConfig cfg;
  cfg.mode = PlanMode::kCem;
  cfg.seed = 4;
  const PlanTrace t = plan_grasp(start, oracle_scorer(d, {}), oracle, cfg);
  check_invariants(t, cfg, oracle);
  const PlanTrace again = plan_grasp(start, oracle_scorer(d, {}), oracle, cfg);
  CHECK(again.steps.size() == t.steps.size());
  CHECK(again.steps.back().pose == t.steps.back().pose);

  cfg = {};
  cfg.move_only_if_better = true;
  const PlanTrace still = plan_grasp(start, constant_scorer(0.5), oracle, cfg);
  CHECK(still.steps.size() == static_cast<std::size_t>(cfg.max_steps) + 1);
  for (const PlanStep& s : still.steps) CHECK(s.pose == start);
}
