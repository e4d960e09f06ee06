#include "obo/oracle_check.hpp"

#include <algorithm>
#include <cmath>

#include "obo/rng.hpp"

namespace obo {

double relative_error(const Vector& actual, const Vector& reference, double floor) {
  if (actual.size() != reference.size()) throw DimensionError("relative_error: size mismatch");
  if (actual.size() == 0) return 0.0;
  return (actual - reference).norm() / std::max(reference.norm(), floor);
}

double ConsistencyReport::max_relative_error() const {
  double worst = 0.0;
  for (const auto& item : items) worst = std::max(worst, item.relative_error);
  return worst;
}

const ConsistencyItem* ConsistencyReport::find(const std::string& name) const {
  for (const auto& item : items)
    if (item.name == name) return &item;
  return nullptr;
}

ConsistencyReport check_oracle(const RoundOracle& oracle, const Vector& x, const Vector& y,
                               const OracleCheckOptions& options) {
  require_dim(x, oracle.dim_x(), "check_oracle x");
  require_dim(y, oracle.dim_y(), "check_oracle y");
  require_finite(x, "check_oracle x");
  require_finite(y, "check_oracle y");
  if (!(options.eps > 1e-9 && options.eps < 1e-2)) throw ArgumentError("check_oracle: eps out of range");

  ConsistencyReport report;
  auto add = [&](std::string name, double err) {
    if (!std::isfinite(err)) throw NumericalError("check_oracle: non-finite error in " + name);
    report.items.push_back({std::move(name), err, err < options.tolerance});
  };
  // Absolute floor for near-zero gradients, scaled to the function's magnitude.
  auto floor_for = [&](double value) { return 1e-6 * (1.0 + std::abs(value)); };

  const double f0 = oracle.f_value(x, y);
  if (!std::isfinite(f0)) throw NumericalError("check_oracle: non-finite f_value");

  const Vector gx = oracle.grad_f_x(x, y);
  const Vector gy = oracle.grad_f_y(x, y);
  require_dim(gx, oracle.dim_x(), "grad_f_x");
  require_dim(gy, oracle.dim_y(), "grad_f_y");
  require_finite(gx, "grad_f_x");
  require_finite(gy, "grad_f_y");

  const Vector fd_x = central_difference([&](const Vector& p) { return oracle.f_value(p, y); }, x, options.eps);
  const Vector fd_y = central_difference([&](const Vector& p) { return oracle.f_value(x, p); }, y, options.eps);
  add("grad_f_x", relative_error(gx, fd_x, floor_for(f0)));
  add("grad_f_y", relative_error(gy, fd_y, floor_for(f0)));

  const Vector gg = oracle.grad_g_y(x, y);
  require_dim(gg, oracle.dim_y(), "grad_g_y");
  require_finite(gg, "grad_g_y");
  if (const auto g0 = oracle.g_value(x, y)) {
    const Vector fd_g = central_difference([&](const Vector& p) { return *oracle.g_value(x, p); }, y, options.eps);
    add("grad_g_y", relative_error(gg, fd_g, floor_for(*g0)));
  }

  const double mu = options.mu_g > 0.0 ? options.mu_g : oracle.constants().mu_g;
  Rng rng(options.seed);
  double sym_err = 0.0;
  double pd_err = 0.0;
  for (int probe = 0; probe < std::max(1, options.probes); ++probe) {
    const Vector u = rng.normal_vector(oracle.dim_y());
    const Vector v = rng.normal_vector(oracle.dim_y());
    const Vector hu = oracle.hess_g_yy_vec(x, y, u);
    const Vector hv = oracle.hess_g_yy_vec(x, y, v);
    require_finite(hu, "hess_g_yy_vec");
    require_finite(hv, "hess_g_yy_vec");
    const double uhv = u.dot(hv);
    const double vhu = v.dot(hu);
    sym_err = std::max(sym_err, std::abs(uhv - vhu) / std::max(std::abs(uhv) + std::abs(vhu), 1e-300));
    const double curvature = v.dot(hv);
    const double floor = mu * v.squaredNorm();
    pd_err = std::max(pd_err, std::max(0.0, floor - curvature) / floor);
  }
  add("hess_symmetry", sym_err);
  add("hess_pd", pd_err);

  report.passed = std::all_of(report.items.begin(), report.items.end(),
                              [](const ConsistencyItem& i) { return i.passed; });
  return report;
}

}  // namespace obo
