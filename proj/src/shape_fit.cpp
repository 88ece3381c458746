#include "geograsp/shape_fit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace geograsp {

void FitConfig::validate() const {
  if (!(lambda_depth >= 0.0) || !(lambda_mask >= 0.0))
    throw InvalidArgumentError("fit: lambda coefficients must be non-negative");
  if (views.empty()) throw InvalidArgumentError("fit: at least one view is required");
  if (iterations < 0) throw InvalidArgumentError("fit: iterations must be non-negative");
  if (!(step_size > 0.0) || !std::isfinite(step_size))
    throw InvalidArgumentError("fit: step size must be positive and finite");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw InvalidArgumentError("fit: momentum must be in [0, 1)");
  if (!(init_occupancy > 0.0 && init_occupancy < 1.0))
    throw InvalidArgumentError("fit: init occupancy must be in (0, 1)");
  for (const auto& v : views) {
    const auto pixels = static_cast<std::size_t>(v.camera.width()) * v.camera.height();
    if (v.depth.width != v.camera.width() || v.depth.height != v.camera.height() ||
        v.mask.width != v.camera.width() || v.mask.height != v.camera.height() ||
        v.depth.values.size() != pixels || v.mask.values.size() != pixels)
      throw InvalidArgumentError("fit: view images do not match the camera resolution");
    if (v.depth.z_near != v.camera.z_near() || v.depth.z_far != v.camera.z_far())
      throw InvalidArgumentError("fit: depth map clip planes differ from the view camera");
  }
}

ShapeLossEvaluator::ShapeLossEvaluator(const GridSpec& grid, const FitConfig& cfg)
    : cfg_(&cfg), grid_(grid) {
  cfg.validate();
  terms_.reserve(cfg.views.size());
  for (const auto& v : cfg.views) {
    ProjectionSpec spec{v.camera, cfg.ray_samples, ProjectionMode::kSoft, cfg.sharpness};
    const auto fg = static_cast<std::size_t>(std::count_if(
        v.mask.values.begin(), v.mask.values.end(), [](double m) { return m >= kOccupancyThreshold; }));
    terms_.push_back({RayPlan(grid, spec), &v, fg});
  }
}

Projection ShapeLossEvaluator::render(const OccupancyGrid& grid, std::size_t i) const {
  return terms_.at(i).plan.render_soft(grid);
}

ShapeLoss ShapeLossEvaluator::evaluate(const OccupancyGrid& grid) const {
  ShapeLoss out;
  out.gradient.assign(grid_.cell_count(), 0.0);
  const double view_weight = 1.0 / static_cast<double>(terms_.size());
  std::vector<double> grad_depth;
  std::vector<double> grad_mask;
  // Views are reduced in order so the result does not depend on scheduling.
  for (const auto& term : terms_) {
    const Projection p = term.plan.render_soft(grid);
    const FitView& v = *term.view;
    const std::size_t pixels = p.mask.values.size();
    grad_depth.assign(pixels, 0.0);
    grad_mask.assign(pixels, 0.0);

    double depth_l1 = 0.0;
    if (term.foreground > 0) {
      const double scale = cfg_->lambda_depth * view_weight / static_cast<double>(term.foreground);
      for (std::size_t px = 0; px < pixels; ++px) {
        if (v.mask.values[px] < kOccupancyThreshold) continue;
        const double diff = p.depth.values[px] - v.depth.values[px];
        depth_l1 += std::abs(diff);
        grad_depth[px] = scale * static_cast<double>((diff > 0.0) - (diff < 0.0));
      }
      depth_l1 /= static_cast<double>(term.foreground);
    }

    double mask_l2 = 0.0;
    const double mscale = cfg_->lambda_mask * view_weight / static_cast<double>(pixels);
    for (std::size_t px = 0; px < pixels; ++px) {
      const double diff = p.mask.values[px] - v.mask.values[px];
      mask_l2 += diff * diff;
      grad_mask[px] = mscale * 2.0 * diff;
    }
    mask_l2 /= static_cast<double>(pixels);

    out.loss_depth += cfg_->lambda_depth * view_weight * depth_l1;
    out.loss_mask += cfg_->lambda_mask * view_weight * mask_l2;
    term.plan.backward_soft(grid, grad_depth, grad_mask, out.gradient);
  }
  out.loss = out.loss_depth + out.loss_mask;
  return out;
}

ShapeLoss shape_loss(const OccupancyGrid& grid, const FitConfig& cfg) {
  return ShapeLossEvaluator(grid.spec(), cfg).evaluate(grid);
}

DivergenceError::DivergenceError(int iteration)
    : Error("shape fit diverged at iteration " + std::to_string(iteration)), iteration_(iteration) {}

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double logit(double v) {
  const double c = std::clamp(v, 1e-6, 1.0 - 1e-6);
  return std::log(c) - std::log1p(-c);
}

}  // namespace

FitResult fit_shape(const FitConfig& cfg, const OccupancyGrid& init,
                    const std::function<void(const FitLogEntry&)>& on_iteration) {
  const ShapeLossEvaluator evaluator(init.spec(), cfg);
  OccupancyGrid grid = init;
  auto values = grid.mutable_values();
  std::vector<double> params(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    params[i] = cfg.logit_parameterization ? logit(values[i]) : values[i];
  const auto sync_values = [&] {
    for (std::size_t i = 0; i < values.size(); ++i) {
      values[i] = cfg.logit_parameterization ? sigmoid(params[i]) : std::clamp(params[i], 0.0, 1.0);
      if (!(values[i] >= 0.0 && values[i] <= 1.0))
        throw RangeError("fit: occupancy left [0, 1] during optimization");
    }
  };
  sync_values();

  std::vector<double> velocity(params.size(), 0.0);
  FitResult result;
  result.log.reserve(static_cast<std::size_t>(cfg.iterations) + 1);
  for (int it = 0; it <= cfg.iterations; ++it) {
    const ShapeLoss l = evaluator.evaluate(grid);
    if (!std::isfinite(l.loss)) throw DivergenceError(it);
    const FitLogEntry entry{it, l.loss, l.loss_depth, l.loss_mask};
    result.log.push_back(entry);
    if (on_iteration) on_iteration(entry);
    if (it == cfg.iterations) break;
    for (std::size_t i = 0; i < params.size(); ++i) {
      double g = l.gradient[i];
      if (cfg.logit_parameterization) g *= values[i] * (1.0 - values[i]);
      velocity[i] = cfg.momentum * velocity[i] - cfg.step_size * g;
      params[i] += velocity[i];
      if (!cfg.logit_parameterization) params[i] = std::clamp(params[i], 0.0, 1.0);
    }
    sync_values();
  }
  result.grid = std::move(grid);
  return result;
}

FitResult fit_shape(const FitConfig& cfg, const GridSpec& grid,
                    const std::function<void(const FitLogEntry&)>& on_iteration) {
  return fit_shape(cfg, OccupancyGrid(grid, cfg.init_occupancy), on_iteration);
}

}  // namespace geograsp
