#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "geograsp/geom.hpp"
#include "geograsp/pose.hpp"
#include "geograsp/projection.hpp"
#include "geograsp/voxel_grid.hpp"

namespace geograsp {

enum class FeatureKind { kBaseline, kGeometryAware };
std::string to_string(FeatureKind k);
FeatureKind feature_kind_from_string(const std::string& s);

// The scene as seen by one observation camera.
struct Observation {
  DepthMap depth;
  MaskMap mask;
  CameraModel camera;
};

struct FeatureConfig {
  int observation_size = 16;  // pooled observation depth and mask
  int local_size = 12;        // pooled local-view depth and mask
  LocalViewConfig local;
};

inline constexpr int kPoseFeatureCount = 10;

struct FeatureVector {
  FeatureKind kind = FeatureKind::kBaseline;
  std::vector<double> values;
};

std::size_t feature_length(FeatureKind kind, const FeatureConfig& cfg = {});

// Layout: observation depth, observation mask, pose (position / half extent
// of `workspace`, canonical quaternion, three zeros), then for the
// geometry-aware kind local depth and local mask. Depths map to [0, 1]
// through (d - z_near) / (z_far - z_near). `grid` is required for the
// geometry-aware kind and ignored otherwise.
FeatureVector featurize(const Observation& obs, const GraspPose& pose, const GridSpec& workspace,
                        const OccupancyGrid* grid, FeatureKind kind, const FeatureConfig& cfg = {});

// Block average of a row-major image down to out x out.
std::vector<double> average_pool(std::span<const double> image, int width, int height, int out);

class NonFiniteLossError : public Error {
 public:
  explicit NonFiniteLossError(int iteration);
  int iteration() const { return iteration_; }

 private:
  int iteration_;
};

// Fully connected net: tanh hidden layers, sigmoid output.
class Mlp {
 public:
  Mlp() = default;
  // All-zero parameters.
  explicit Mlp(std::vector<int> sizes);
  // Xavier-uniform weights from the stream derive_seed(seed, "mlp-init", layer), zero biases.
  static Mlp xavier(std::vector<int> sizes, std::uint64_t seed);

  const std::vector<int>& sizes() const { return sizes_; }
  int input_size() const { return sizes_.front(); }
  std::size_t layer_count() const { return weights_.size(); }
  std::size_t parameter_count() const;

  // Weights row-major (out x in) then biases, layer by layer.
  std::vector<double> parameters() const;
  void set_parameters(std::span<const double> p);

  Eigen::MatrixXd& weight(std::size_t layer) { return weights_[layer]; }
  Eigen::VectorXd& bias(std::size_t layer) { return biases_[layer]; }

  double predict(std::span<const double> x) const;
  // One sample per row.
  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const;

  // Mean binary cross-entropy and its gradient, in parameters() order.
  double loss(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
              std::vector<double>* gradient = nullptr) const;

  void validate() const;

 private:
  Eigen::VectorXd logits(const Eigen::MatrixXd& x, std::vector<Eigen::MatrixXd>* acts) const;

  std::vector<int> sizes_;
  std::vector<Eigen::MatrixXd> weights_;
  std::vector<Eigen::VectorXd> biases_;
};

inline const std::vector<int> kDefaultHiddenSizes{64, 32};

struct TrainConfig {
  int epochs = 2000;
  double learning_rate = 0.05;
  std::uint64_t seed = 0;
  std::vector<int> hidden = kDefaultHiddenSizes;
  // Train on inputs shifted and scaled to zero mean and unit variance per
  // feature, then fold the scaling into the first layer so the returned
  // model takes raw features.
  bool standardize = true;
};

struct TrainResult {
  Mlp model;
  std::vector<double> loss_curve;  // loss before each update, then the final loss
};

// Full-batch gradient descent on mean cross-entropy.
TrainResult train_mlp(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const TrainConfig& cfg);

// Fraction of samples with (score >= 0.5) == label.
double accuracy(std::span<const double> scores, std::span<const double> labels);
double evaluate(const Mlp& model, const Eigen::MatrixXd& x, const Eigen::VectorXd& y);
// Probability that a random positive outscores a random negative (ties count half).
double auc(std::span<const double> scores, std::span<const double> labels);

Eigen::MatrixXd stack_features(const std::vector<FeatureVector>& features);

void write_mlp(std::ostream& out, const Mlp& model);
Mlp read_mlp(std::istream& in);
void save_mlp(const std::string& path, const Mlp& model);
Mlp load_mlp(const std::string& path);

}  // namespace geograsp
