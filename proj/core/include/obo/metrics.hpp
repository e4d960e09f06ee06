#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "obo/problems.hpp"
#include "obo/types.hpp"

namespace obo {

// Everything measured in one round t.
struct RoundRecord {
  long t = 1;
  Vector x;               // x_t
  Vector y_next;          // y_{t+1}
  Vector est_grad;        // estimated hypergradient at (x_t, y_{t+1})
  Vector exact_grad;      // exact hypergradient of round t at x_t
  Vector y_star;          // y_t*(x_t)
  double f_at_optimum = 0.0;  // f_t(x_t, y_t*(x_t))
  // Next round evaluated at x_t; absent on the last round or when not measured.
  std::optional<Vector> next_y_star;   // y_{t+1}*(x_t)
  std::optional<double> next_f_at_optimum;  // f_{t+1}(x_t, y_{t+1}*(x_t))
  std::int64_t wallclock_ns = 0;
};

// Append-only trace of a run; rounds are contiguous from 1.
class RunLog {
 public:
  void append(RoundRecord record);
  const std::vector<RoundRecord>& rounds() const { return rounds_; }
  std::size_t size() const { return rounds_.size(); }
  bool empty() const { return rounds_.empty(); }
  const RoundRecord& operator[](std::size_t i) const { return rounds_[i]; }

 private:
  std::vector<RoundRecord> rounds_;
};

// Running sum with Neumaier compensation.
class CompensatedSum {
 public:
  void add(double value);
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

std::vector<double> cumulative(const std::vector<double>& series);

// Per-round local regret: |(1/W) sum_{i<K} eta^i exact_grad_{t-i}|^2, rounds
// before the first contributing zero.
std::vector<double> blr_series(const RunLog& log, double eta, int k);

// Same window, but every past round's hypergradient is recomputed at the
// current iterate x_t against that round's oracle.
std::vector<double> blr_static_series(const RunLog& log, const Stream& stream, double eta, int k);

// |exact_grad_t - est_grad_t|^2.
std::vector<double> hypergrad_error_series(const RunLog& log);

struct VariationStats {
  // Both proxies evaluate the sup over x at the trajectory point, so they
  // are lower bounds of the true variations.
  double v1_proxy = 0.0;
  double h2_proxy = 0.0;
  std::vector<double> v1_increments;   // per round, 0 where unavailable
  std::vector<double> h2_increments;   // element t: |y*_{t-1}(x_{t-1}) - y*_t(x_{t-1})|^2
  std::vector<double> inner_err_series;  // |y_{t+1} - y_t*(x_t)|^2
};

VariationStats variation_stats(const RunLog& log);

}  // namespace obo
