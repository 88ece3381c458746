#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "geograsp/grasp_sim.hpp"
#include "geograsp/pose.hpp"

namespace geograsp {

using PoseScorer = std::function<double(const GraspPose&)>;
using PoseOracle = std::function<GraspOutcome(const GraspPose&)>;

enum class PlanMode {
  kTopOne,  // sample candidates around the current pose, move to the best one
  kCem,     // classical cross-entropy method: refit a Gaussian to the elite set
};
std::string to_string(PlanMode m);
PlanMode plan_mode_from_string(const std::string& s);

struct PlanConfig {
  int max_steps = 20;
  int directions = 10;
  PoseNoise step{0.02, 8.0};
  std::uint64_t seed = 0;
  PlanMode mode = PlanMode::kTopOne;
  // Stay put unless the best candidate outscores the current pose.
  bool move_only_if_better = false;
  int elites = 3;  // kCem only

  void validate() const;
};

struct PlanStep {
  int step = 0;
  GraspPose pose;
  double score = 0.0;
  GraspOutcome outcome = GraspOutcome::kFailure;
};

enum class PlanStatus { kSuccess, kExhausted };
std::string to_string(PlanStatus s);

struct PlanTrace {
  std::vector<PlanStep> steps;  // steps[0] is the start pose
  PlanStatus status = PlanStatus::kExhausted;

  bool success() const { return status == PlanStatus::kSuccess; }
};

// Thrown when the start pose already succeeds.
class PlanPreconditionError : public InvalidArgumentError {
 public:
  using InvalidArgumentError::InvalidArgumentError;
};

// Predictor-guided pose search. Step s draws its candidates from the stream
// derive_seed(cfg.seed, "plan-step", s), so a shorter run is a prefix of a
// longer one. The oracle is queried once per step, at the chosen pose.
PlanTrace plan_grasp(const GraspPose& start, const PoseScorer& scorer, const PoseOracle& oracle,
                     const PlanConfig& cfg);

// One planning problem: a scene's oracle plus the scorers and failing start
// poses used by successive repeats (repeat r takes entry r modulo the size,
// so scorers may differ per repeat, e.g. by observation camera).
struct PlanningCase {
  std::string category;
  std::vector<PoseScorer> scorers;
  PoseOracle oracle;
  std::vector<GraspPose> starts;
};

struct PlanningTally {
  int successes = 0;
  int runs = 0;
  double rate() const { return runs > 0 ? static_cast<double>(successes) / runs : 0.0; }
};

struct PlanningSummary {
  PlanningTally overall;
  std::map<std::string, PlanningTally> per_category;
};

// Repeat r of case c runs with seed
// derive_seed(cfg.seed, "plan-run", c * repeats + r); methods evaluated with
// the same cfg.seed therefore share starts and candidate streams.
PlanningSummary eval_planning(const std::vector<PlanningCase>& cases, const PlanConfig& cfg,
                              int repeats = 8);

}  // namespace geograsp
