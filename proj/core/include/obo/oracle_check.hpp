#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "obo/oracle.hpp"

namespace obo {

struct ConsistencyItem {
  std::string name;
  double relative_error = 0.0;
  bool passed = false;
};

struct ConsistencyReport {
  std::vector<ConsistencyItem> items;
  bool passed = false;

  double max_relative_error() const;
  const ConsistencyItem* find(const std::string& name) const;
};

struct OracleCheckOptions {
  double eps = 1e-5;
  double tolerance = 1e-4;
  // mu_g used by the positive-definiteness probe; <= 0 means oracle.constants().mu_g.
  double mu_g = -1.0;
  int probes = 3;
  std::uint64_t seed = 0x5eed;
};

// Compares the derivative callbacks of an oracle against central differences
// of its values, and probes symmetry and positive-definiteness of the inner
// Hessian-vector product.
//
// Items, in order:
//   grad_f_x, grad_f_y   central differences of f_value
//   grad_g_y             central differences of g_value (only if available)
//   hess_symmetry        |<u, Hv> - <v, Hu>| / (|<u, Hv>| + |<v, Hu>|)
//   hess_pd              max(0, mu_g |v|^2 - <v, Hv>) / (mu_g |v|^2)
ConsistencyReport check_oracle(const RoundOracle& oracle, const Vector& x, const Vector& y,
                               const OracleCheckOptions& options = {});

// Central-difference gradient of a scalar function. Shared by the oracle
// checker and the finite-difference hypergradient.
template <typename F>
Vector central_difference(F&& fn, const Vector& at, double eps) {
  Vector grad(at.size());
  Vector probe = at;
  for (Eigen::Index i = 0; i < at.size(); ++i) {
    const double h = eps * std::max(1.0, std::abs(at[i]));
    probe[i] = at[i] + h;
    const double up = fn(probe);
    probe[i] = at[i] - h;
    const double down = fn(probe);
    probe[i] = at[i];
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

// |a - b| / max(|b|, floor), with floor guarding near-zero references.
double relative_error(const Vector& actual, const Vector& reference, double floor = 1e-8);

}  // namespace obo
