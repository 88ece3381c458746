#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "geograsp/projection.hpp"
#include "geograsp/voxel_grid.hpp"

namespace geograsp {

// One supervising observation: camera plus ground-truth depth and mask.
struct FitView {
  CameraModel camera;
  DepthMap depth;
  MaskMap mask;
};

inline constexpr double kDefaultLambdaDepth = 0.5;
inline constexpr double kDefaultLambdaMask = 10.0;

struct FitConfig {
  double lambda_depth = kDefaultLambdaDepth;
  double lambda_mask = kDefaultLambdaMask;
  std::vector<FitView> views;
  int iterations = 2000;
  double step_size = 300.0;
  double momentum = 0.9;
  // Optimize logits of the cell values instead of the values themselves.
  bool logit_parameterization = true;
  int ray_samples = kDefaultRaySamples;
  double sharpness = kDefaultSharpness;
  // Starting occupancy for every cell when no initial grid is supplied.
  double init_occupancy = 0.6;

  void validate() const;
};

struct ShapeLoss {
  double loss = 0.0;
  double loss_depth = 0.0;
  double loss_mask = 0.0;
  std::vector<double> gradient;  // dL/dV per cell
};

// Multi-view reconstruction loss: views are averaged, the depth term is the
// mean L1 over ground-truth foreground pixels (mask >= 0.5) and the mask term
// the mean squared error over all pixels.
//   L = lambda_D * mean_views(depth_l1) + lambda_M * mean_views(mask_l2)
class ShapeLossEvaluator {
 public:
  ShapeLossEvaluator(const GridSpec& grid, const FitConfig& cfg);
  ShapeLoss evaluate(const OccupancyGrid& grid) const;
  // Rendered soft projection from view `i`.
  Projection render(const OccupancyGrid& grid, std::size_t i) const;

 private:
  struct ViewTerm {
    RayPlan plan;
    const FitView* view;
    std::size_t foreground;
  };
  const FitConfig* cfg_;
  GridSpec grid_;
  std::vector<ViewTerm> terms_;
};

ShapeLoss shape_loss(const OccupancyGrid& grid, const FitConfig& cfg);

struct FitLogEntry {
  int iteration = 0;
  double loss = 0.0;
  double loss_depth = 0.0;
  double loss_mask = 0.0;
};

struct FitResult {
  OccupancyGrid grid;
  std::vector<FitLogEntry> log;  // entry i holds the loss before update i; last is final
};

class DivergenceError : public Error {
 public:
  DivergenceError(int iteration);
  int iteration() const { return iteration_; }

 private:
  int iteration_;
};

// Gradient descent with momentum on the cell logits. `on_iteration`, when
// set, observes every log entry as it is produced.
FitResult fit_shape(const FitConfig& cfg, const OccupancyGrid& init,
                    const std::function<void(const FitLogEntry&)>& on_iteration = {});
FitResult fit_shape(const FitConfig& cfg, const GridSpec& grid,
                    const std::function<void(const FitLogEntry&)>& on_iteration = {});

}  // namespace geograsp
