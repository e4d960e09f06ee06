#pragma once

#include <memory>
#include <optional>

#include "obo/types.hpp"

namespace obo {

// Regularity of one round's bilevel pair.
//   mu_g   : strong-convexity modulus of g_t in y
//   l1     : Lipschitz bound of the gradients of f_t and g_t
//   d_bound: diameter of the feasible outer set, 0 when unconstrained
struct RegularityConstants {
  double mu_g = 1.0;
  double l1 = 1.0;
  double d_bound = 0.0;

  bool consistent() const { return mu_g > 0.0 && l1 > 0.0 && mu_g <= l1 && d_bound >= 0.0; }
};

// One round's pair (f_t, g_t), exposed through first-order and
// Hessian-vector-product callbacks. Implementations must be immutable after
// construction so that a single instance can be shared between threads and
// retained for windowed baselines.
class RoundOracle {
 public:
  virtual ~RoundOracle() = default;

  virtual int round_index() const = 0;
  virtual Eigen::Index dim_x() const = 0;
  virtual Eigen::Index dim_y() const = 0;

  virtual double f_value(const Vector& x, const Vector& y) const = 0;
  virtual Vector grad_f_x(const Vector& x, const Vector& y) const = 0;
  virtual Vector grad_f_y(const Vector& x, const Vector& y) const = 0;

  // g_t is only required through its derivatives; oracles that can evaluate
  // it return a value so that grad_g_y can be checked against it.
  virtual std::optional<double> g_value(const Vector& /*x*/, const Vector& /*y*/) const {
    return std::nullopt;
  }
  virtual Vector grad_g_y(const Vector& x, const Vector& y) const = 0;
  // Hessian of g_t in y applied to v.
  virtual Vector hess_g_yy_vec(const Vector& x, const Vector& y, const Vector& v) const = 0;
  // Mixed derivative: grad_x <grad_y g_t(x, y), v>, a vector of size dim_x.
  virtual Vector cross_g_xy_vec(const Vector& x, const Vector& y, const Vector& v) const = 0;

  virtual bool has_exact_inner() const { return false; }
  virtual Vector y_star(const Vector& x) const;

  virtual RegularityConstants constants() const = 0;
  // Gradient-Lipschitz bound of y -> g_t(x, y) at a given x. Defaults to the
  // round-wide l1; oracles with x-dependent curvature override it.
  virtual double inner_lipschitz(const Vector& /*x*/) const { return constants().l1; }
};

using OraclePtr = std::shared_ptr<const RoundOracle>;

}  // namespace obo
