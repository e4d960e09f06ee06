#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "obo/problems.hpp"
#include "stream_seeds.hpp"

namespace obo {

namespace {

using detail::SeedSpace;
using detail::seeded;

struct QuadraticShared {
  Matrix A;
  Matrix B;
  Eigen::LLT<Matrix> A_llt;
  double r = 1.0;
  RegularityConstants constants;
};

class QuadraticOracle final : public RoundOracle {
 public:
  QuadraticOracle(long t, std::shared_ptr<const QuadraticShared> shared, Vector c, Vector d, Vector e)
      : t_(t), s_(std::move(shared)), c_(std::move(c)), d_(std::move(d)), e_(std::move(e)) {}

  int round_index() const override { return static_cast<int>(t_); }
  Eigen::Index dim_x() const override { return s_->B.cols(); }
  Eigen::Index dim_y() const override { return s_->A.rows(); }

  double f_value(const Vector& x, const Vector& y) const override {
    return 0.5 * (y - d_).squaredNorm() + 0.5 * s_->r * (x - e_).squaredNorm();
  }
  Vector grad_f_x(const Vector& x, const Vector& /*y*/) const override { return s_->r * (x - e_); }
  Vector grad_f_y(const Vector& /*x*/, const Vector& y) const override { return y - d_; }

  std::optional<double> g_value(const Vector& x, const Vector& y) const override {
    return 0.5 * y.dot(s_->A * y) - y.dot(s_->B * x + c_);
  }
  Vector grad_g_y(const Vector& x, const Vector& y) const override { return s_->A * y - s_->B * x - c_; }
  Vector hess_g_yy_vec(const Vector& /*x*/, const Vector& /*y*/, const Vector& v) const override {
    return s_->A * v;
  }
  Vector cross_g_xy_vec(const Vector& /*x*/, const Vector& /*y*/, const Vector& v) const override {
    return -(s_->B.transpose() * v);
  }

  bool has_exact_inner() const override { return true; }
  Vector y_star(const Vector& x) const override { return s_->A_llt.solve(s_->B * x + c_); }

  RegularityConstants constants() const override { return s_->constants; }

  QuadraticRoundView view() const { return {s_->A, s_->B, c_, d_, e_, s_->r}; }

 private:
  long t_;
  std::shared_ptr<const QuadraticShared> s_;
  Vector c_, d_, e_;
};

class QuadraticStream final : public Stream {
 public:
  explicit QuadraticStream(StreamConfig cfg) : Stream(std::move(cfg)) {
    const auto& q = cfg_.quadratic;
    const Eigen::Index n1 = cfg_.d1;
    const Eigen::Index n2 = cfg_.d2;
    Rng rng = seeded(cfg_.seed, SeedSpace::structure);

    auto shared = std::make_shared<QuadraticShared>();
    if (q.A.size() != 0) {
      shared->A = q.A;
    } else {
      // Random orthogonal basis with eigenvalues spread evenly over [mu, L].
      const Eigen::HouseholderQR<Matrix> qr(rng.normal_matrix(n2, n2));
      const Matrix basis = qr.householderQ();
      Vector spectrum(n2);
      for (Eigen::Index i = 0; i < n2; ++i) {
        spectrum[i] = n2 == 1 ? q.mu : q.mu + (q.L - q.mu) * static_cast<double>(i) / static_cast<double>(n2 - 1);
      }
      shared->A = basis * spectrum.asDiagonal() * basis.transpose();
      shared->A = 0.5 * (shared->A + shared->A.transpose());
    }
    shared->B = q.B.size() != 0 ? q.B : Matrix(q.coupling / std::sqrt(static_cast<double>(n1)) * rng.normal_matrix(n2, n1));
    shared->A_llt.compute(shared->A);
    if (shared->A_llt.info() != Eigen::Success) throw ConfigError("quadratic stream: A is not positive definite");
    shared->r = q.outer_weight;

    const Eigen::SelfAdjointEigenSolver<Matrix> eig_a(shared->A);
    const double mu_g = eig_a.eigenvalues().minCoeff();
    if (!(mu_g > 0.0)) throw ConfigError("quadratic stream: A is not positive definite");
    // Joint Hessian of g in (x, y) is [[0, -B'], [-B, A]]; that of f is diag(r I, I).
    Matrix joint = Matrix::Zero(n1 + n2, n1 + n2);
    joint.block(0, n1, n1, n2) = -shared->B.transpose();
    joint.block(n1, 0, n2, n1) = -shared->B;
    joint.block(n1, n1, n2, n2) = shared->A;
    const Eigen::SelfAdjointEigenSolver<Matrix> eig_joint(joint);
    const double l_g = eig_joint.eigenvalues().cwiseAbs().maxCoeff();
    const double l_f = std::max(1.0, q.outer_weight);
    shared->constants = {mu_g, std::max({l_g, l_f, mu_g}), 0.0};
    shared_ = std::move(shared);

    c0_ = rng.normal_vector(n2);
    d0_ = rng.normal_vector(n2);
    e0_ = rng.normal_vector(n1);
    dir_c_ = rng.normal_vector(n2).normalized();
    dir_d_ = rng.normal_vector(n2).normalized();
    dir_e_ = rng.normal_vector(n1).normalized();
  }

  RegularityConstants constants() const override { return shared_->constants; }

 protected:
  OraclePtr make_round(long t) const override {
    Vector c = c0_, d = d0_, e = e0_;
    const Drift& drift = cfg_.drift;
    switch (drift.kind) {
      case DriftKind::static_:
        break;
      case DriftKind::staged: {
        const long stage = drift.stage(t);
        if (stage > 0) {
          Rng rng = seeded(cfg_.seed, SeedSpace::stages, static_cast<std::uint64_t>(stage));
          c += drift.magnitude * rng.normal_vector(c.size());
          d += drift.magnitude * rng.normal_vector(d.size());
          e += drift.magnitude * rng.normal_vector(e.size());
        }
        break;
      }
      case DriftKind::smooth: {
        const double shift = drift.rate * std::sqrt(static_cast<double>(t - 1));
        c += shift * dir_c_;
        d += shift * dir_d_;
        e += shift * dir_e_;
        break;
      }
    }
    if (cfg_.noise_std > 0.0) {
      Rng rng = seeded(cfg_.seed, SeedSpace::rounds, static_cast<std::uint64_t>(t));
      c += cfg_.noise_std * rng.normal_vector(c.size());
      d += cfg_.noise_std * rng.normal_vector(d.size());
      e += cfg_.noise_std * rng.normal_vector(e.size());
    }
    return std::make_shared<QuadraticOracle>(t, shared_, std::move(c), std::move(d), std::move(e));
  }

 private:
  std::shared_ptr<const QuadraticShared> shared_;
  Vector c0_, d0_, e0_;
  Vector dir_c_, dir_d_, dir_e_;
};

}  // namespace

Vector QuadraticRoundView::y_star(const Vector& x) const { return A.llt().solve(B * x + c); }

Vector QuadraticRoundView::composite_gradient(const Vector& x) const {
  const auto llt = A.llt();
  const Vector inner = llt.solve(B * x + c) - d;
  return B.transpose() * A.transpose().llt().solve(inner) + r * (x - e);
}

StreamPtr make_quadratic_stream(StreamConfig cfg) {
  if (cfg.family != Family::quadratic) throw ConfigError("make_quadratic_stream: family must be quadratic");
  cfg.normalize();
  return std::make_shared<QuadraticStream>(std::move(cfg));
}

QuadraticRoundView quadratic_view(const Stream& stream, long t) {
  const OraclePtr oracle = stream.round(t);
  const auto* q = dynamic_cast<const QuadraticOracle*>(oracle.get());
  if (!q) throw ArgumentError("quadratic_view: stream is not quadratic");
  return q->view();
}

}  // namespace obo
