#include "geograsp/planner.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "geograsp/seeding.hpp"

namespace geograsp {

std::string to_string(PlanMode m) { return m == PlanMode::kTopOne ? "top1" : "cem"; }

PlanMode plan_mode_from_string(const std::string& s) {
  if (s == "top1") return PlanMode::kTopOne;
  if (s == "cem") return PlanMode::kCem;
  throw InvalidArgumentError("unknown plan mode '" + s + "'");
}

std::string to_string(PlanStatus s) { return s == PlanStatus::kSuccess ? "success" : "exhausted"; }

void PlanConfig::validate() const {
  if (max_steps < 1) throw InvalidArgumentError("plan: max_steps must be >= 1");
  if (directions < 1) throw InvalidArgumentError("plan: directions must be >= 1");
  if (!(step.position >= 0.0) || !(step.rotation_deg >= 0.0))
    throw InvalidArgumentError("plan: step scales must be non-negative");
  if (mode == PlanMode::kCem && elites < 1) throw InvalidArgumentError("plan: elites must be >= 1");
}

namespace {

using Delta = std::array<double, 6>;  // position offset, Euler offset (degrees)

GraspPose apply_delta(const GraspPose& base, const Vec3& base_euler, const Delta& d) {
  GraspPose p = base;
  p.position = base.position + Vec3{d[0], d[1], d[2]};
  if (d[3] != 0.0 || d[4] != 0.0 || d[5] != 0.0)
    p.orientation = Quat::from_euler_xyz_deg(base_euler + Vec3{d[3], d[4], d[5]}).canonical();
  return p;
}

std::size_t argmax(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

PlanTrace plan_grasp(const GraspPose& start, const PoseScorer& scorer, const PoseOracle& oracle,
                     const PlanConfig& cfg) {
  cfg.validate();
  start.validate();
  PlanTrace trace;
  const GraspOutcome first = oracle(start);
  if (is_success(first))
    throw PlanPreconditionError("plan: the start pose already succeeds");
  GraspPose current = start;
  double current_score = scorer(start);
  trace.steps.push_back({0, start, current_score, first});

  // Classical CEM state, relative to the start pose.
  const Vec3 start_euler = start.euler_xyz_deg();
  Delta mean{};
  const Delta sigma0{cfg.step.position, cfg.step.position, cfg.step.position,
                     cfg.step.rotation_deg, cfg.step.rotation_deg, cfg.step.rotation_deg};
  Delta sigma = sigma0;

  for (int s = 1; s <= cfg.max_steps; ++s) {
    Rng rng = make_rng(cfg.seed, "plan-step", static_cast<std::uint64_t>(s));
    std::vector<GraspPose> cand;
    std::vector<Delta> deltas;
    cand.reserve(static_cast<std::size_t>(cfg.directions));
    for (int k = 0; k < cfg.directions; ++k) {
      if (cfg.mode == PlanMode::kTopOne) {
        cand.push_back(perturb_pose(current, cfg.step, rng));
      } else {
        Delta d;
        for (int i = 0; i < 6; ++i) d[i] = normal(rng, mean[i], sigma[i]);
        deltas.push_back(d);
        cand.push_back(apply_delta(start, start_euler, d));
      }
    }
    std::vector<double> scores(cand.size());
    for (std::size_t k = 0; k < cand.size(); ++k) scores[k] = scorer(cand[k]);
    const std::size_t best = argmax(scores);

    if (cfg.mode == PlanMode::kCem) {
      std::vector<std::size_t> order(cand.size());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
      const std::size_t ne = std::min<std::size_t>(static_cast<std::size_t>(cfg.elites), order.size());
      for (int i = 0; i < 6; ++i) {
        double m = 0.0;
        for (std::size_t e = 0; e < ne; ++e) m += deltas[order[e]][i];
        m /= static_cast<double>(ne);
        double v = 0.0;
        for (std::size_t e = 0; e < ne; ++e) v += (deltas[order[e]][i] - m) * (deltas[order[e]][i] - m);
        mean[i] = m;
        sigma[i] = std::max(std::sqrt(v / static_cast<double>(ne)), 0.1 * sigma0[i]);
      }
    }

    if (!cfg.move_only_if_better || scores[best] > current_score) {
      current = cand[best];
      current_score = scores[best];
    }
    const GraspOutcome outcome = oracle(current);
    trace.steps.push_back({s, current, current_score, outcome});
    if (is_success(outcome)) {
      trace.status = PlanStatus::kSuccess;
      break;
    }
  }
  return trace;
}

PlanningSummary eval_planning(const std::vector<PlanningCase>& cases, const PlanConfig& cfg,
                              int repeats) {
  if (repeats < 1) throw InvalidArgumentError("eval_planning: repeats must be >= 1");
  PlanningSummary sum;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const PlanningCase& pc = cases[c];
    if (pc.starts.empty() || pc.scorers.empty())
      throw InvalidArgumentError("eval_planning: case needs start poses and scorers");
    for (int r = 0; r < repeats; ++r) {
      PlanConfig run = cfg;
      run.seed = derive_seed(cfg.seed, "plan-run", c * static_cast<std::uint64_t>(repeats) + r);
      const GraspPose& start = pc.starts[static_cast<std::size_t>(r) % pc.starts.size()];
      const PoseScorer& scorer = pc.scorers[static_cast<std::size_t>(r) % pc.scorers.size()];
      const bool ok = plan_grasp(start, scorer, pc.oracle, run).success();
      for (PlanningTally* t : {&sum.overall, &sum.per_category[pc.category]}) {
        t->runs += 1;
        t->successes += ok ? 1 : 0;
      }
    }
  }
  return sum;
}

}  // namespace geograsp
