#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "obo/problems.hpp"
#include "stream_seeds.hpp"

namespace obo {

namespace {

using detail::SeedSpace;
using detail::seeded;

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstRepr = Eigen::Map<const RowMajorMatrix>;

// Linear ground-truth model Y = X * lambda * w.
struct HrModel {
  Matrix lambda;  // p x d
  Vector w;       // d
};

// Round t of online hyper-representation learning. The outer variable is the
// representation flattened row-major, x[i * d + j] = Lambda(i, j).
//   g_t(Lambda, w) = |Xg Lambda w - Yg|^2 + gamma/2 |w|^2
//   f_t(Lambda, w) = |Xf Lambda w - Yf|^2
class HrOracle final : public RoundOracle {
 public:
  HrOracle(long t, Matrix xf, Vector yf, Matrix xg, Vector yg, double gamma, HrModel truth)
      : t_(t), xf_(std::move(xf)), yf_(std::move(yf)), xg_(std::move(xg)), yg_(std::move(yg)),
        gamma_(gamma), truth_(std::move(truth)) {}

  int round_index() const override { return static_cast<int>(t_); }
  Eigen::Index dim_x() const override { return p() * d(); }
  Eigen::Index dim_y() const override { return d(); }

  double f_value(const Vector& x, const Vector& y) const override {
    return (xf_ * (repr(x) * y) - yf_).squaredNorm();
  }
  Vector grad_f_x(const Vector& x, const Vector& y) const override {
    const Vector r = xf_ * (repr(x) * y) - yf_;
    return flat(2.0 * (xf_.transpose() * r) * y.transpose());
  }
  Vector grad_f_y(const Vector& x, const Vector& y) const override {
    const Vector r = xf_ * (repr(x) * y) - yf_;
    return 2.0 * (repr(x).transpose() * (xf_.transpose() * r));
  }

  std::optional<double> g_value(const Vector& x, const Vector& y) const override {
    return (xg_ * (repr(x) * y) - yg_).squaredNorm() + 0.5 * gamma_ * y.squaredNorm();
  }
  Vector grad_g_y(const Vector& x, const Vector& y) const override {
    const Vector r = xg_ * (repr(x) * y) - yg_;
    return 2.0 * (repr(x).transpose() * (xg_.transpose() * r)) + gamma_ * y;
  }
  Vector hess_g_yy_vec(const Vector& x, const Vector& /*y*/, const Vector& v) const override {
    const auto lam = repr(x);
    return 2.0 * (lam.transpose() * (xg_.transpose() * (xg_ * (lam * v)))) + gamma_ * v;
  }
  Vector cross_g_xy_vec(const Vector& x, const Vector& y, const Vector& v) const override {
    const auto lam = repr(x);
    const Vector r = xg_ * (lam * y) - yg_;
    const Vector mv = xg_ * (lam * v);
    return flat(2.0 * (xg_.transpose() * r) * v.transpose() + 2.0 * (xg_.transpose() * mv) * y.transpose());
  }

  bool has_exact_inner() const override { return true; }
  Vector y_star(const Vector& x) const override {
    const Matrix m = xg_ * repr(x);
    Matrix h = 2.0 * m.transpose() * m;
    h.diagonal().array() += gamma_;
    return h.llt().solve(2.0 * m.transpose() * yg_);
  }

  double inner_lipschitz(const Vector& x) const override {
    const Matrix m = xg_ * repr(x);
    const Matrix gram = m.transpose() * m;
    return 2.0 * Eigen::SelfAdjointEigenSolver<Matrix>(gram, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff() + gamma_;
  }
  RegularityConstants constants() const override {
    return {gamma_, inner_lipschitz(flatten_row_major(truth_.lambda)), 0.0};
  }

  HyperRepRoundView view() const { return {xf_, xg_, yf_, yg_, truth_.lambda, truth_.w, gamma_}; }

 private:
  Eigen::Index p() const { return xf_.cols(); }
  Eigen::Index d() const { return truth_.w.size(); }
  ConstRepr repr(const Vector& x) const {
    if (x.size() != p() * d()) throw DimensionError("hyper_rep: outer variable has wrong dimension");
    return ConstRepr(x.data(), p(), d());
  }
  static Vector flat(const Matrix& m) { return flatten_row_major(m); }

  long t_;
  Matrix xf_;
  Vector yf_;
  Matrix xg_;
  Vector yg_;
  double gamma_;
  HrModel truth_;
};

class HrStream final : public Stream {
 public:
  explicit HrStream(StreamConfig cfg) : Stream(std::move(cfg)) {
    const auto& h = cfg_.hyper_rep;
    Rng rng = seeded(cfg_.seed, SeedSpace::structure);
    drift_dir_ = rng.normal_matrix(h.p, h.d);
    drift_dir_ /= drift_dir_.norm();
  }

  RegularityConstants constants() const override { return round(1)->constants(); }

  Vector initial_x(std::uint64_t seed) const override {
    // The origin is a stationary point of every round (zero representation
    // gives zero inner solution and zero hypergradient), so start off it.
    Rng rng(seed);
    return rng.normal_vector(cfg_.d1);
  }

 protected:
  OraclePtr make_round(long t) const override {
    const auto& h = cfg_.hyper_rep;
    HrModel truth = model(cfg_.drift.stage(t));
    if (cfg_.drift.kind == DriftKind::smooth) {
      truth.lambda += cfg_.drift.rate * std::sqrt(static_cast<double>(t - 1)) * drift_dir_;
    }
    Rng rng = seeded(cfg_.seed, SeedSpace::rounds, static_cast<std::uint64_t>(t));
    Matrix xf = rng.normal_matrix(h.batch_f, h.p);
    Matrix xg = rng.normal_matrix(h.batch_g, h.p);
    const Vector coef = truth.lambda * truth.w;
    Vector yf = xf * coef;
    Vector yg = xg * coef;
    if (cfg_.noise_std > 0.0) {
      yf += cfg_.noise_std * rng.normal_vector(h.batch_f);
      yg += cfg_.noise_std * rng.normal_vector(h.batch_g);
    }
    return std::make_shared<HrOracle>(t, std::move(xf), std::move(yf), std::move(xg), std::move(yg), h.gamma,
                                      std::move(truth));
  }

 private:
  HrModel model(long stage) const {
    const auto& h = cfg_.hyper_rep;
    Rng rng = seeded(cfg_.seed, SeedSpace::stages, static_cast<std::uint64_t>(stage));
    HrModel m;
    m.lambda = rng.normal_matrix(h.p, h.d);
    m.w = rng.normal_vector(h.d);
    return m;
  }

  Matrix drift_dir_;
};

}  // namespace

StreamPtr make_hr_stream(StreamConfig cfg) {
  if (cfg.family != Family::hyper_rep) throw ConfigError("make_hr_stream: family must be hyper_rep");
  cfg.normalize();
  return std::make_shared<HrStream>(std::move(cfg));
}

HyperRepRoundView hyper_rep_view(const Stream& stream, long t) {
  const OraclePtr oracle = stream.round(t);
  const auto* hr = dynamic_cast<const HrOracle*>(oracle.get());
  if (!hr) throw ArgumentError("hyper_rep_view: stream is not hyper_rep");
  return hr->view();
}

}  // namespace obo
