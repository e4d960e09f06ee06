#include "obo/metrics.hpp"

#include <cmath>

#include "obo/hypergrad.hpp"

namespace obo {

namespace {

double window_normalizer(int k, double eta) {
  double total = 0.0;
  double weight = 1.0;
  for (int i = 0; i < k; ++i) {
    total += weight;
    weight *= eta;
  }
  return total;
}

void check_window_args(double eta, int k) {
  if (!(eta > 0.0 && eta <= 1.0)) throw ArgumentError("regret window: eta must lie in (0, 1]");
  if (k < 1) throw ArgumentError("regret window: k must be >= 1");
}

}  // namespace

void RunLog::append(RoundRecord record) {
  const long expected = static_cast<long>(rounds_.size()) + 1;
  if (record.t != expected) {
    throw ArgumentError("RunLog: expected round " + std::to_string(expected) + ", got " + std::to_string(record.t));
  }
  rounds_.push_back(std::move(record));
}

void CompensatedSum::add(double value) {
  const double t = sum_ + value;
  if (std::abs(sum_) >= std::abs(value)) {
    compensation_ += (sum_ - t) + value;
  } else {
    compensation_ += (value - t) + sum_;
  }
  sum_ = t;
}

std::vector<double> cumulative(const std::vector<double>& series) {
  std::vector<double> out;
  out.reserve(series.size());
  CompensatedSum sum;
  for (double v : series) {
    sum.add(v);
    out.push_back(sum.value());
  }
  return out;
}

std::vector<double> blr_series(const RunLog& log, double eta, int k) {
  if (log.empty()) throw EmptyLogError("blr_series: empty log");
  check_window_args(eta, k);
  const double normalizer = window_normalizer(k, eta);
  std::vector<double> out;
  out.reserve(log.size());
  for (std::size_t t = 0; t < log.size(); ++t) {
    Vector sum = Vector::Zero(log[t].exact_grad.size());
    double weight = 1.0;
    for (std::size_t age = 0; age < static_cast<std::size_t>(k) && age <= t; ++age) {
      sum += weight * log[t - age].exact_grad;
      weight *= eta;
    }
    out.push_back((sum / normalizer).squaredNorm());
  }
  return out;
}

std::vector<double> blr_static_series(const RunLog& log, const Stream& stream, double eta, int k) {
  if (log.empty()) throw EmptyLogError("blr_static_series: empty log");
  check_window_args(eta, k);
  const double normalizer = window_normalizer(k, eta);
  std::vector<double> out;
  out.reserve(log.size());
  for (std::size_t t = 0; t < log.size(); ++t) {
    const Vector& x = log[t].x;
    Vector sum = Vector::Zero(x.size());
    double weight = 1.0;
    for (std::size_t age = 0; age < static_cast<std::size_t>(k) && age <= t; ++age) {
      const long round = log[t - age].t;
      // The current round's gradient at x_t is already in the log.
      const Vector grad = age == 0 ? log[t].exact_grad : exact_hypergrad(*stream.round(round), x, 1e-12);
      sum += weight * grad;
      weight *= eta;
    }
    out.push_back((sum / normalizer).squaredNorm());
  }
  return out;
}

std::vector<double> hypergrad_error_series(const RunLog& log) {
  std::vector<double> out;
  out.reserve(log.size());
  for (const auto& r : log.rounds()) out.push_back((r.exact_grad - r.est_grad).squaredNorm());
  return out;
}

VariationStats variation_stats(const RunLog& log) {
  VariationStats out;
  const std::size_t n = log.size();
  out.v1_increments.assign(n, 0.0);
  out.h2_increments.assign(n, 0.0);
  out.inner_err_series.reserve(n);
  CompensatedSum v1, h2;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = log[i];
    out.inner_err_series.push_back((r.y_next - r.y_star).squaredNorm());
    if (r.next_f_at_optimum && i + 1 < n) {
      out.v1_increments[i] = *r.next_f_at_optimum - r.f_at_optimum;
      v1.add(out.v1_increments[i]);
    }
    if (r.next_y_star && i + 1 < n) {
      // Attributed to the round in which the inner solution moved.
      out.h2_increments[i + 1] = (r.y_star - *r.next_y_star).squaredNorm();
      h2.add(out.h2_increments[i + 1]);
    }
  }
  out.v1_proxy = v1.value();
  out.h2_proxy = h2.value();
  return out;
}

}  // namespace obo
