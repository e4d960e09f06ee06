#pragma once

#include <Eigen/QR>

#include "obo/oracle.hpp"
#include "obo/problems.hpp"
#include "obo/rng.hpp"

namespace obo::test {

// Random SPD matrix with eigenvalues spread over [mu, L].
inline Matrix random_spd(Rng& rng, Eigen::Index n, double mu, double L) {
  const Eigen::HouseholderQR<Matrix> qr(rng.normal_matrix(n, n));
  const Matrix q = qr.householderQ();
  Vector eig(n);
  for (Eigen::Index i = 0; i < n; ++i) eig[i] = n == 1 ? mu : mu + (L - mu) * double(i) / double(n - 1);
  Matrix a = q * eig.asDiagonal() * q.transpose();
  return 0.5 * (a + a.transpose());
}

// f(x, y) = a/2 |x|^2 + b/2 |y - shift|^2, g(x, y) = 1/2 |y - center|^2 with no x dependence.
class SeparableOracle : public RoundOracle {
 public:
  SeparableOracle(Eigen::Index dx, Eigen::Index dy, double a, double b, Vector shift, Vector center)
      : dx_(dx), dy_(dy), a_(a), b_(b), shift_(std::move(shift)), center_(std::move(center)) {}

  int round_index() const override { return 1; }
  Eigen::Index dim_x() const override { return dx_; }
  Eigen::Index dim_y() const override { return dy_; }
  double f_value(const Vector& x, const Vector& y) const override {
    return 0.5 * a_ * x.squaredNorm() + 0.5 * b_ * (y - shift_).squaredNorm();
  }
  Vector grad_f_x(const Vector& x, const Vector&) const override { return a_ * x; }
  Vector grad_f_y(const Vector&, const Vector& y) const override { return b_ * (y - shift_); }
  std::optional<double> g_value(const Vector&, const Vector& y) const override {
    return 0.5 * (y - center_).squaredNorm();
  }
  Vector grad_g_y(const Vector&, const Vector& y) const override { return y - center_; }
  Vector hess_g_yy_vec(const Vector&, const Vector&, const Vector& v) const override { return v; }
  Vector cross_g_xy_vec(const Vector&, const Vector&, const Vector&) const override { return Vector::Zero(dx_); }
  bool has_exact_inner() const override { return exact_; }
  Vector y_star(const Vector&) const override { return center_; }
  RegularityConstants constants() const override { return {1.0, std::max({1.0, a_, b_}), 0.0}; }

  void set_exact(bool exact) { exact_ = exact; }

 private:
  Eigen::Index dx_, dy_;
  double a_, b_;
  Vector shift_, center_;
  bool exact_ = true;
};

// Delegates everything and doubles grad_f_x.
class DoubledGradOracle : public RoundOracle {
 public:
  explicit DoubledGradOracle(OraclePtr inner) : inner_(std::move(inner)) {}
  int round_index() const override { return inner_->round_index(); }
  Eigen::Index dim_x() const override { return inner_->dim_x(); }
  Eigen::Index dim_y() const override { return inner_->dim_y(); }
  double f_value(const Vector& x, const Vector& y) const override { return inner_->f_value(x, y); }
  Vector grad_f_x(const Vector& x, const Vector& y) const override { return 2.0 * inner_->grad_f_x(x, y); }
  Vector grad_f_y(const Vector& x, const Vector& y) const override { return inner_->grad_f_y(x, y); }
  std::optional<double> g_value(const Vector& x, const Vector& y) const override { return inner_->g_value(x, y); }
  Vector grad_g_y(const Vector& x, const Vector& y) const override { return inner_->grad_g_y(x, y); }
  Vector hess_g_yy_vec(const Vector& x, const Vector& y, const Vector& v) const override {
    return inner_->hess_g_yy_vec(x, y, v);
  }
  Vector cross_g_xy_vec(const Vector& x, const Vector& y, const Vector& v) const override {
    return inner_->cross_g_xy_vec(x, y, v);
  }
  bool has_exact_inner() const override { return inner_->has_exact_inner(); }
  Vector y_star(const Vector& x) const override { return inner_->y_star(x); }
  RegularityConstants constants() const override { return inner_->constants(); }

 private:
  OraclePtr inner_;
};

inline StreamConfig quadratic_config(std::uint64_t seed, long horizon = 100, DriftKind drift = DriftKind::static_) {
  StreamConfig cfg;
  cfg.family = Family::quadratic;
  cfg.d1 = 5;
  cfg.d2 = 5;
  cfg.horizon = horizon;
  cfg.seed = seed;
  cfg.drift.kind = drift;
  cfg.drift.period = 20;
  cfg.drift.rate = 0.5;
  return cfg;
}

inline StreamConfig hr_config(std::uint64_t seed, long horizon = 100, DriftKind drift = DriftKind::static_) {
  StreamConfig cfg;
  cfg.family = Family::hyper_rep;
  cfg.horizon = horizon;
  cfg.seed = seed;
  cfg.hyper_rep.p = 6;
  cfg.hyper_rep.d = 3;
  cfg.drift.kind = drift;
  cfg.drift.period = 20;
  cfg.noise_std = 0.1;
  return cfg;
}

inline StreamConfig ho_config(std::uint64_t seed, long horizon = 100) {
  StreamConfig cfg;
  cfg.family = Family::hyperopt;
  cfg.horizon = horizon;
  cfg.seed = seed;
  cfg.hyperopt.classes = 3;
  cfg.hyperopt.features = 6;
  cfg.hyperopt.informative = 3;
  cfg.hyperopt.batch_train = 8;
  cfg.hyperopt.batch_val = 8;
  return cfg;
}

// Random point inside the stream's default domain, if any.
inline Vector random_outer(const Stream& stream, Rng& rng, double scale = 1.0) {
  Vector x = scale * rng.normal_vector(stream.dim_x());
  if (auto d = stream.default_domain()) {
    if (const auto* box = std::get_if<BoxDomain>(&*d)) x = x.cwiseMax(box->lo).cwiseMin(box->hi);
  }
  return x;
}

}  // namespace obo::test
