#include <algorithm>
#include <cmath>
#include <numeric>

#include "obo/problems.hpp"
#include "stream_seeds.hpp"

namespace obo {

namespace {

using detail::SeedSpace;
using detail::seeded;

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstWeights = Eigen::Map<const RowMajorMatrix>;

// Softmax of each row of `logits`, computed with the row max subtracted.
Matrix softmax_rows(const Matrix& logits) {
  Matrix p = logits.colwise() - logits.rowwise().maxCoeff();
  p = p.array().exp();
  p.array().colwise() /= p.rowwise().sum().array();
  return p;
}

double mean_cross_entropy(const Matrix& logits, const std::vector<int>& labels) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double m = logits.row(i).maxCoeff();
    const double lse = m + std::log((logits.row(i).array() - m).exp().sum());
    total += lse - logits(i, labels[static_cast<std::size_t>(i)]);
  }
  return total / static_cast<double>(logits.rows());
}

// (softmax - onehot) / n, one row per sample.
Matrix ce_residual(const Matrix& logits, const std::vector<int>& labels) {
  Matrix r = softmax_rows(logits);
  for (Eigen::Index i = 0; i < r.rows(); ++i) r(i, labels[static_cast<std::size_t>(i)]) -= 1.0;
  return r / static_cast<double>(r.rows());
}

// Round t of online hyperparameter optimization for multinomial logistic
// regression. Outer variable: log-scale per-feature ridge weights lambda (F).
// Inner variable: weights W (C x F), flattened row-major.
//   g_t(lambda, W) = mean CE on train + 1/2 sum_j exp(lambda_j) |W[:, j]|^2
//   f_t(lambda, W) = mean CE on validation
class HoOracle final : public RoundOracle {
 public:
  HoOracle(long t, int classes, double lambda_lo, double lambda_hi, HyperOptRoundView data)
      : t_(t), classes_(classes), lambda_lo_(lambda_lo), lambda_hi_(lambda_hi), data_(std::move(data)) {
    max_row_sq_ = data_.train_features.rowwise().squaredNorm().maxCoeff();
  }

  int round_index() const override { return static_cast<int>(t_); }
  Eigen::Index dim_x() const override { return features(); }
  Eigen::Index dim_y() const override { return classes_ * features(); }

  double f_value(const Vector& /*x*/, const Vector& y) const override {
    return mean_cross_entropy(data_.val_features * weights(y).transpose(), data_.val_labels);
  }
  Vector grad_f_x(const Vector& x, const Vector& /*y*/) const override { return Vector::Zero(x.size()); }
  Vector grad_f_y(const Vector& /*x*/, const Vector& y) const override {
    const Matrix r = ce_residual(data_.val_features * weights(y).transpose(), data_.val_labels);
    return flat(r.transpose() * data_.val_features);
  }

  std::optional<double> g_value(const Vector& x, const Vector& y) const override {
    const auto w = weights(y);
    const double loss = mean_cross_entropy(data_.train_features * w.transpose(), data_.train_labels);
    return loss + 0.5 * (w.colwise().squaredNorm().array() * x.array().exp().transpose()).sum();
  }
  Vector grad_g_y(const Vector& x, const Vector& y) const override {
    const auto w = weights(y);
    const Matrix r = ce_residual(data_.train_features * w.transpose(), data_.train_labels);
    Matrix grad = r.transpose() * data_.train_features;
    grad += w * x.array().exp().matrix().asDiagonal();
    return flat(grad);
  }
  Vector hess_g_yy_vec(const Vector& x, const Vector& y, const Vector& v) const override {
    const auto w = weights(y);
    const auto dv = weights(v);
    const Matrix p = softmax_rows(data_.train_features * w.transpose());
    const Matrix u = data_.train_features * dv.transpose();  // n x C
    // Softmax Jacobian (diag(p) - p p') applied row-wise.
    Matrix ju = p.cwiseProduct(u);
    const Vector pu = ju.rowwise().sum();
    ju -= p.cwiseProduct(pu.replicate(1, p.cols()));
    Matrix out = ju.transpose() * data_.train_features / static_cast<double>(p.rows());
    out += dv * x.array().exp().matrix().asDiagonal();
    return flat(out);
  }
  Vector cross_g_xy_vec(const Vector& x, const Vector& y, const Vector& v) const override {
    const auto w = weights(y);
    const auto dv = weights(v);
    return (x.array().exp() * w.cwiseProduct(dv).colwise().sum().transpose().array()).matrix();
  }

  double inner_lipschitz(const Vector& x) const override {
    // The softmax cross-entropy Hessian in the logits is bounded by 1/2 I.
    return 0.5 * max_row_sq_ + x.array().exp().maxCoeff();
  }
  // Valid over the configured box of lambda.
  RegularityConstants constants() const override {
    return {std::exp(lambda_lo_), 0.5 * max_row_sq_ + std::exp(lambda_hi_), 0.0};
  }

  const HyperOptRoundView& view() const { return data_; }

 private:
  Eigen::Index features() const { return data_.train_features.cols(); }
  ConstWeights weights(const Vector& y) const {
    if (y.size() != classes_ * features()) throw DimensionError("hyperopt: inner variable has wrong dimension");
    return ConstWeights(y.data(), classes_, features());
  }
  static Vector flat(const Matrix& m) { return flatten_row_major(m); }

  long t_;
  int classes_;
  double lambda_lo_;
  double lambda_hi_;
  HyperOptRoundView data_;
  double max_row_sq_ = 0.0;
};

class HoStream final : public Stream {
 public:
  explicit HoStream(StreamConfig cfg) : Stream(std::move(cfg)) {
    Rng rng = seeded(cfg_.seed, SeedSpace::structure);
    const auto& h = cfg_.hyperopt;
    drift_dir_ = rng.normal_matrix(h.classes, h.informative);
    if (drift_dir_.size() > 0) drift_dir_ /= drift_dir_.norm();
  }

  // Estimated on the first round; later batches may differ.
  RegularityConstants constants() const override { return round(1)->constants(); }

  std::optional<Domain> default_domain() const override {
    const auto& h = cfg_.hyperopt;
    return BoxDomain{Vector::Constant(cfg_.d1, h.lambda_lo), Vector::Constant(cfg_.d1, h.lambda_hi)};
  }

 protected:
  OraclePtr make_round(long t) const override {
    const auto& h = cfg_.hyperopt;
    const Matrix means = class_means(t);
    Rng rng = seeded(cfg_.seed, SeedSpace::rounds, static_cast<std::uint64_t>(t));

    HyperOptRoundView data;
    draw(rng, means, h.batch_train, data.train_features, data.clean_train_labels);
    draw(rng, means, h.batch_val, data.val_features, data.val_labels);
    data.train_labels = data.clean_train_labels;

    const double level = corruption_at(t);
    if (level > 0.0) {
      Rng noise = seeded(cfg_.seed, SeedSpace::corruption, static_cast<std::uint64_t>(t));
      std::vector<std::size_t> order(data.train_labels.size());
      std::iota(order.begin(), order.end(), 0);
      // Fisher-Yates with the portable generator.
      for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[noise.below(i)]);
      const auto flips = static_cast<std::size_t>(std::lround(level * static_cast<double>(order.size())));
      for (std::size_t k = 0; k < flips; ++k) {
        int& label = data.train_labels[order[k]];
        label = static_cast<int>((label + 1 + noise.below(static_cast<std::uint64_t>(h.classes - 1))) %
                                 static_cast<std::uint64_t>(h.classes));
      }
    }
    return std::make_shared<HoOracle>(t, h.classes, h.lambda_lo, h.lambda_hi, std::move(data));
  }

 private:
  double corruption_at(long t) const {
    double level = 0.0;
    for (const auto& c : cfg_.hyperopt.corruption)
      if (c.start_round <= t) level = c.label_noise;
    return level;
  }

  // Class means live on the informative features only.
  Matrix class_means(long t) const {
    const auto& h = cfg_.hyperopt;
    Rng rng = seeded(cfg_.seed, SeedSpace::stages, static_cast<std::uint64_t>(cfg_.drift.stage(t)));
    Matrix means = Matrix::Zero(h.classes, h.features);
    if (h.informative == 0) return means;
    const double scale = h.class_separation / std::sqrt(static_cast<double>(h.informative));
    Matrix informative = scale * rng.normal_matrix(h.classes, h.informative);
    if (cfg_.drift.kind == DriftKind::smooth) {
      informative += cfg_.drift.rate * std::sqrt(static_cast<double>(t - 1)) * drift_dir_;
    }
    means.leftCols(h.informative) = informative;
    return means;
  }

  void draw(Rng& rng, const Matrix& means, int n, Matrix& features, std::vector<int>& labels) const {
    const auto& h = cfg_.hyperopt;
    const double noise = 1.0 / std::sqrt(static_cast<double>(h.features));
    features.resize(n, h.features);
    labels.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const int label = static_cast<int>(rng.below(static_cast<std::uint64_t>(h.classes)));
      labels[static_cast<std::size_t>(i)] = label;
      for (int j = 0; j < h.features; ++j) features(i, j) = means(label, j) + noise * rng.normal();
    }
  }

  Matrix drift_dir_;
};

}  // namespace

StreamPtr make_ho_stream(StreamConfig cfg) {
  if (cfg.family != Family::hyperopt) throw ConfigError("make_ho_stream: family must be hyperopt");
  cfg.normalize();
  return std::make_shared<HoStream>(std::move(cfg));
}

HyperOptRoundView hyper_opt_view(const Stream& stream, long t) {
  const OraclePtr oracle = stream.round(t);
  const auto* ho = dynamic_cast<const HoOracle*>(oracle.get());
  if (!ho) throw ArgumentError("hyper_opt_view: stream is not hyperopt");
  return ho->view();
}

}  // namespace obo
