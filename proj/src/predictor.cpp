#include "geograsp/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "geograsp/io.hpp"
#include "geograsp/seeding.hpp"

namespace geograsp {

std::string to_string(FeatureKind k) {
  return k == FeatureKind::kBaseline ? "baseline" : "geometry";
}

FeatureKind feature_kind_from_string(const std::string& s) {
  if (s == "baseline") return FeatureKind::kBaseline;
  if (s == "geometry" || s == "geometry-aware") return FeatureKind::kGeometryAware;
  throw InvalidArgumentError("unknown feature kind '" + s + "'");
}

std::size_t feature_length(FeatureKind kind, const FeatureConfig& cfg) {
  const auto obs = static_cast<std::size_t>(cfg.observation_size) * cfg.observation_size;
  const auto local = static_cast<std::size_t>(cfg.local_size) * cfg.local_size;
  std::size_t n = 2 * obs + kPoseFeatureCount;
  if (kind == FeatureKind::kGeometryAware) n += 2 * local;
  return n;
}

std::vector<double> average_pool(std::span<const double> image, int width, int height, int out) {
  if (out < 1 || width % out != 0 || height % out != 0)
    throw InvalidArgumentError("average_pool: " + std::to_string(width) + "x" +
                               std::to_string(height) + " does not divide into " +
                               std::to_string(out) + "x" + std::to_string(out));
  if (image.size() != static_cast<std::size_t>(width) * height)
    throw InvalidArgumentError("average_pool: image size mismatch");
  const int bw = width / out;
  const int bh = height / out;
  const double inv = 1.0 / (bw * bh);
  std::vector<double> res(static_cast<std::size_t>(out) * out, 0.0);
  for (int r = 0; r < out; ++r)
    for (int c = 0; c < out; ++c) {
      double acc = 0.0;
      for (int i = 0; i < bh; ++i)
        for (int j = 0; j < bw; ++j)
          acc += image[static_cast<std::size_t>(r * bh + i) * width + (c * bw + j)];
      res[static_cast<std::size_t>(r) * out + c] = acc * inv;
    }
  return res;
}

namespace {

void append_depth(std::vector<double>& dst, const DepthMap& depth, int out) {
  std::vector<double> norm(depth.values.size());
  const double span = depth.z_far - depth.z_near;
  for (std::size_t i = 0; i < norm.size(); ++i)
    norm[i] = std::clamp((depth.values[i] - depth.z_near) / span, 0.0, 1.0);
  const auto pooled = average_pool(norm, depth.width, depth.height, out);
  dst.insert(dst.end(), pooled.begin(), pooled.end());
}

void append_mask(std::vector<double>& dst, const MaskMap& mask, int out) {
  const auto pooled = average_pool(mask.values, mask.width, mask.height, out);
  for (double v : pooled) dst.push_back(std::clamp(v, 0.0, 1.0));
}

}  // namespace

FeatureVector featurize(const Observation& obs, const GraspPose& pose, const GridSpec& workspace,
                        const OccupancyGrid* grid, FeatureKind kind, const FeatureConfig& cfg) {
  if (kind == FeatureKind::kGeometryAware && grid == nullptr)
    throw InvalidArgumentError("geometry-aware features need an occupancy grid");
  pose.validate();
  FeatureVector f;
  f.kind = kind;
  f.values.reserve(feature_length(kind, cfg));
  append_depth(f.values, obs.depth, cfg.observation_size);
  append_mask(f.values, obs.mask, cfg.observation_size);

  const Vec3 rel = (pose.position - workspace.center());
  const Vec3 half = workspace.extent() * 0.5;
  f.values.push_back(std::clamp(rel.x / half.x, -1.0, 1.0));
  f.values.push_back(std::clamp(rel.y / half.y, -1.0, 1.0));
  f.values.push_back(std::clamp(rel.z / half.z, -1.0, 1.0));
  const Quat q = pose.orientation.canonical();
  f.values.insert(f.values.end(), {q.x, q.y, q.z, q.w, 0.0, 0.0, 0.0});

  if (kind == FeatureKind::kGeometryAware) {
    const Projection local = project_local(*grid, pose, cfg.local);
    append_depth(f.values, local.depth, cfg.local_size);
    append_mask(f.values, local.mask, cfg.local_size);
  }
  for (double v : f.values)
    if (!std::isfinite(v)) throw InvalidArgumentError("featurize produced a non-finite entry");
  return f;
}

NonFiniteLossError::NonFiniteLossError(int iteration)
    : Error("training loss became non-finite at epoch " + std::to_string(iteration)),
      iteration_(iteration) {}

Mlp::Mlp(std::vector<int> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.size() < 2) throw InvalidArgumentError("an MLP needs at least two layer sizes");
  if (sizes_.back() != 1) throw InvalidArgumentError("the MLP output layer must have size 1");
  for (int s : sizes_)
    if (s < 1) throw InvalidArgumentError("MLP layer sizes must be positive");
  for (std::size_t i = 0; i + 1 < sizes_.size(); ++i) {
    weights_.push_back(Eigen::MatrixXd::Zero(sizes_[i + 1], sizes_[i]));
    biases_.push_back(Eigen::VectorXd::Zero(sizes_[i + 1]));
  }
}

Mlp Mlp::xavier(std::vector<int> sizes, std::uint64_t seed) {
  Mlp m(std::move(sizes));
  for (std::size_t k = 0; k < m.weights_.size(); ++k) {
    Rng rng = make_rng(seed, "mlp-init", k);
    auto& w = m.weights_[k];
    const double a = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = uniform(rng, -a, a);
  }
  return m;
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t k = 0; k < weights_.size(); ++k)
    n += static_cast<std::size_t>(weights_[k].size() + biases_[k].size());
  return n;
}

std::vector<double> Mlp::parameters() const {
  std::vector<double> p;
  p.reserve(parameter_count());
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    const auto& w = weights_[k];
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) p.push_back(w(r, c));
    for (Eigen::Index r = 0; r < biases_[k].size(); ++r) p.push_back(biases_[k](r));
  }
  return p;
}

void Mlp::set_parameters(std::span<const double> p) {
  if (p.size() != parameter_count())
    throw InvalidArgumentError("MLP parameter count mismatch: expected " +
                               std::to_string(parameter_count()) + ", got " +
                               std::to_string(p.size()));
  std::size_t i = 0;
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    auto& w = weights_[k];
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = p[i++];
    for (Eigen::Index r = 0; r < biases_[k].size(); ++r) biases_[k](r) = p[i++];
  }
}

void Mlp::validate() const {
  for (std::size_t k = 0; k < weights_.size(); ++k)
    if (!weights_[k].allFinite() || !biases_[k].allFinite())
      throw InvalidArgumentError("MLP layer " + std::to_string(k) + " has non-finite parameters");
}

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

}  // namespace

// Activations are stored sample-per-column: acts[k] is (size_k x batch).
Eigen::VectorXd Mlp::logits(const Eigen::MatrixXd& x, std::vector<Eigen::MatrixXd>* acts) const {
  if (weights_.empty()) throw InvalidArgumentError("MLP has no layers");
  if (x.cols() != sizes_.front())
    throw InvalidArgumentError("feature length " + std::to_string(x.cols()) +
                               " does not match model input " + std::to_string(sizes_.front()));
  Eigen::MatrixXd a = x.transpose();
  if (acts) acts->push_back(a);
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    Eigen::MatrixXd z = weights_[k] * a;
    z.colwise() += biases_[k];
    if (k + 1 < weights_.size()) {
      a = z.array().tanh().matrix();
      if (acts) acts->push_back(a);
    } else {
      a = std::move(z);
    }
  }
  return a.row(0).transpose();
}

double Mlp::predict(std::span<const double> x) const {
  if (x.size() != static_cast<std::size_t>(sizes_.front()))
    throw InvalidArgumentError("feature length " + std::to_string(x.size()) +
                               " does not match model input " + std::to_string(sizes_.front()));
  const Eigen::Map<const Eigen::RowVectorXd> row(x.data(), static_cast<Eigen::Index>(x.size()));
  return sigmoid(logits(row, nullptr)(0));
}

Eigen::VectorXd Mlp::predict(const Eigen::MatrixXd& x) const {
  return logits(x, nullptr).unaryExpr([](double z) { return sigmoid(z); });
}

double Mlp::loss(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                 std::vector<double>* gradient) const {
  if (x.rows() != y.size() || x.rows() == 0)
    throw InvalidArgumentError("loss: need matching, non-empty features and labels");
  std::vector<Eigen::MatrixXd> acts;
  const Eigen::VectorXd z = logits(x, gradient ? &acts : nullptr);
  const double inv_n = 1.0 / static_cast<double>(y.size());
  // -y log s(z) - (1-y) log(1-s(z)) = softplus(z) - y z
  double total = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) total += softplus(z(i)) - y(i) * z(i);
  if (!gradient) return total * inv_n;

  std::vector<Eigen::MatrixXd> dw(weights_.size());
  std::vector<Eigen::VectorXd> db(weights_.size());
  Eigen::MatrixXd delta(1, z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) delta(0, i) = (sigmoid(z(i)) - y(i)) * inv_n;
  for (std::size_t k = weights_.size(); k-- > 0;) {
    dw[k] = delta * acts[k].transpose();
    db[k] = delta.rowwise().sum();
    if (k > 0) {
      Eigen::MatrixXd back = weights_[k].transpose() * delta;
      delta = back.array() * (1.0 - acts[k].array().square());
    }
  }
  gradient->clear();
  gradient->reserve(parameter_count());
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    for (Eigen::Index r = 0; r < dw[k].rows(); ++r)
      for (Eigen::Index c = 0; c < dw[k].cols(); ++c) gradient->push_back(dw[k](r, c));
    for (Eigen::Index r = 0; r < db[k].size(); ++r) gradient->push_back(db[k](r));
  }
  return total * inv_n;
}

TrainResult train_mlp(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const TrainConfig& cfg) {
  if (x.rows() < 2) throw InvalidArgumentError("training needs at least two records");
  bool pos = false;
  bool neg = false;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y(i) != 0.0 && y(i) != 1.0) throw InvalidArgumentError("labels must be 0 or 1");
    (y(i) == 1.0 ? pos : neg) = true;
  }
  if (!pos || !neg) throw InvalidArgumentError("training needs both outcome classes");
  if (cfg.epochs < 0 || !(cfg.learning_rate > 0.0))
    throw InvalidArgumentError("training needs epochs >= 0 and a positive learning rate");

  std::vector<int> sizes{static_cast<int>(x.cols())};
  sizes.insert(sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
  sizes.push_back(1);

  // Constant features keep scale 1.
  Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(x.cols());
  Eigen::RowVectorXd scale = Eigen::RowVectorXd::Ones(x.cols());
  if (cfg.standardize) {
    mean = x.colwise().mean();
    const Eigen::MatrixXd centered = x.rowwise() - mean;
    scale = (centered.array().square().colwise().sum() / static_cast<double>(x.rows())).sqrt();
    for (Eigen::Index j = 0; j < scale.size(); ++j)
      if (!(scale(j) > 1e-12)) scale(j) = 1.0;
  }
  const Eigen::MatrixXd xs =
      cfg.standardize ? Eigen::MatrixXd((x.rowwise() - mean).array().rowwise() / scale.array()) : x;

  TrainResult res{Mlp::xavier(sizes, cfg.seed), {}};
  res.loss_curve.reserve(static_cast<std::size_t>(cfg.epochs) + 1);
  std::vector<double> grad;
  std::vector<double> params = res.model.parameters();
  for (int e = 0; e <= cfg.epochs; ++e) {
    const double l = res.model.loss(xs, y, e < cfg.epochs ? &grad : nullptr);
    if (!std::isfinite(l)) throw NonFiniteLossError(e);
    res.loss_curve.push_back(l);
    if (e == cfg.epochs) break;
    for (std::size_t i = 0; i < params.size(); ++i) params[i] -= cfg.learning_rate * grad[i];
    res.model.set_parameters(params);
  }
  if (cfg.standardize) {
    // W z + b with z = (x - mean) / scale is (W / scale) x + (b - (W / scale) mean)
    Eigen::MatrixXd& w = res.model.weight(0);
    w = (w.array().rowwise() / scale.array()).matrix();
    res.model.bias(0) -= w * mean.transpose();
  }
  return res;
}

double accuracy(std::span<const double> scores, std::span<const double> labels) {
  if (scores.empty()) throw InvalidArgumentError("accuracy of an empty set");
  if (scores.size() != labels.size()) throw InvalidArgumentError("accuracy: size mismatch");
  std::size_t hit = 0;
  for (std::size_t i = 0; i < scores.size(); ++i)
    hit += (scores[i] >= 0.5) == (labels[i] >= 0.5) ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(scores.size());
}

double evaluate(const Mlp& model, const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  if (x.rows() == 0) throw InvalidArgumentError("evaluate on an empty set");
  const Eigen::VectorXd s = model.predict(x);
  return accuracy({s.data(), static_cast<std::size_t>(s.size())},
                  {y.data(), static_cast<std::size_t>(y.size())});
}

double auc(std::span<const double> scores, std::span<const double> labels) {
  if (scores.size() != labels.size()) throw InvalidArgumentError("auc: size mismatch");
  double wins = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] < 0.5) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] >= 0.5) continue;
      ++pairs;
      wins += scores[i] > scores[j] ? 1.0 : (scores[i] == scores[j] ? 0.5 : 0.0);
    }
  }
  if (pairs == 0) throw InvalidArgumentError("auc needs both classes");
  return wins / static_cast<double>(pairs);
}

Eigen::MatrixXd stack_features(const std::vector<FeatureVector>& features) {
  if (features.empty()) return {};
  const auto cols = static_cast<Eigen::Index>(features.front().values.size());
  Eigen::MatrixXd x(static_cast<Eigen::Index>(features.size()), cols);
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (static_cast<Eigen::Index>(features[i].values.size()) != cols)
      throw InvalidArgumentError("stack_features: mixed feature lengths");
    for (Eigen::Index c = 0; c < cols; ++c)
      x(static_cast<Eigen::Index>(i), c) = features[i].values[static_cast<std::size_t>(c)];
  }
  return x;
}

// "MLP <layers> <size_0> ... <size_layers>\n" then float32 parameters.
void write_mlp(std::ostream& out, const Mlp& model) {
  model.validate();
  out << "MLP " << model.layer_count();
  for (int s : model.sizes()) out << ' ' << s;
  out << '\n';
  for (double p : model.parameters()) write_f32_le(out, static_cast<float>(p));
}

Mlp read_mlp(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("MLP: missing header", 0);
  std::vector<HeaderToken> tok;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    const std::size_t next = std::min(line.find(' ', pos), line.size());
    tok.push_back({line.substr(pos, next - pos), pos});
    pos = next + 1;
  }
  if (tok.empty() || tok[0].text != "MLP") throw FormatError("MLP: bad magic", 0);
  if (tok.size() < 2) throw FormatError("MLP: missing layer count", line.size());
  const long long layers = parse_int(tok[1]);
  if (layers < 1 || layers > 64) throw FormatError("MLP: layer count out of range", tok[1].offset);
  if (tok.size() != static_cast<std::size_t>(layers) + 3)
    throw FormatError("MLP: expected " + std::to_string(layers + 1) + " layer sizes",
                      tok.size() > 2 ? tok[2].offset : line.size());
  std::vector<int> sizes;
  for (std::size_t i = 2; i < tok.size(); ++i) {
    const long long s = parse_int(tok[i]);
    if (s < 1 || s > 1'000'000) throw FormatError("MLP: layer size out of range", tok[i].offset);
    sizes.push_back(static_cast<int>(s));
  }
  if (sizes.back() != 1) throw FormatError("MLP: output size must be 1", tok.back().offset);
  Mlp m(sizes);
  const auto raw = read_f32_le(in, m.parameter_count(), "MLP");
  const std::vector<double> p(raw.begin(), raw.end());
  for (std::size_t i = 0; i < p.size(); ++i)
    if (!std::isfinite(p[i])) throw FormatError("MLP: non-finite parameter", line.size() + 1 + 4 * i);
  m.set_parameters(p);
  return m;
}

void save_mlp(const std::string& path, const Mlp& model) {
  std::ostringstream ss;
  write_mlp(ss, model);
  write_file(path, ss.str());
}

Mlp load_mlp(const std::string& path) {
  std::istringstream in(read_file(path));
  return read_mlp(in);
}

}  // namespace geograsp
