#include "obo/problems.hpp"

#include "obo/rng.hpp"

namespace obo {

const char* to_string(Family family) {
  switch (family) {
    case Family::quadratic:
      return "quadratic";
    case Family::hyper_rep:
      return "hyper_rep";
    case Family::hyperopt:
      return "hyperopt";
  }
  return "?";
}

Family family_from_string(const std::string& name) {
  if (name == "quadratic") return Family::quadratic;
  if (name == "hyper_rep" || name == "hr") return Family::hyper_rep;
  if (name == "hyperopt" || name == "ho") return Family::hyperopt;
  throw ConfigError("unknown stream family '" + name + "'");
}

const char* to_string(DriftKind kind) {
  switch (kind) {
    case DriftKind::static_:
      return "static";
    case DriftKind::staged:
      return "staged";
    case DriftKind::smooth:
      return "smooth";
  }
  return "?";
}

DriftKind drift_from_string(const std::string& name) {
  if (name == "static") return DriftKind::static_;
  if (name == "staged") return DriftKind::staged;
  if (name == "smooth") return DriftKind::smooth;
  throw ConfigError("unknown drift kind '" + name + "'");
}

long Drift::stage(long t) const {
  if (kind != DriftKind::staged) return 0;
  return (t - 1) / period;
}

void StreamConfig::normalize() {
  auto fail = [](const std::string& msg) { throw ConfigError("stream config: " + msg); };
  if (horizon < 1) fail("horizon must be >= 1");
  if (!(noise_std >= 0.0)) fail("noise_std must be >= 0");
  if (drift.kind == DriftKind::staged && drift.period < 1) fail("drift period must be >= 1");
  if (drift.kind == DriftKind::smooth && !(drift.rate >= 0.0)) fail("drift rate must be >= 0");
  if (!(drift.magnitude >= 0.0)) fail("drift magnitude must be >= 0");

  switch (family) {
    case Family::quadratic: {
      const auto& q = quadratic;
      if (d1 < 1 || d2 < 1) fail("d1 and d2 must be positive");
      if (q.A.size() == 0 && !(q.mu > 0.0 && q.mu <= q.L)) fail("spectrum must satisfy 0 < mu <= L");
      if (q.A.size() != 0 && (q.A.rows() != d2 || q.A.cols() != d2)) fail("A must be d2 x d2");
      if (q.B.size() != 0 && (q.B.rows() != d2 || q.B.cols() != d1)) fail("B must be d2 x d1");
      if (!(q.outer_weight >= 0.0)) fail("outer_weight must be >= 0");
      break;
    }
    case Family::hyper_rep: {
      const auto& h = hyper_rep;
      if (h.p < 1 || h.d < 1 || h.batch_f < 1 || h.batch_g < 1) fail("hyper_rep dimensions must be positive");
      if (!(h.gamma > 0.0)) fail("gamma must be > 0");
      d1 = h.p * h.d;
      d2 = h.d;
      break;
    }
    case Family::hyperopt: {
      const auto& h = hyperopt;
      if (h.classes < 2) fail("classes must be >= 2");
      if (h.features < 1 || h.batch_train < 1 || h.batch_val < 1) fail("hyperopt sizes must be positive");
      if (h.informative < 0 || h.informative > h.features) fail("informative must lie in [0, features]");
      if (!(h.lambda_lo <= h.lambda_hi)) fail("lambda box must satisfy lo <= hi");
      long last_start = 0;
      for (const auto& level : h.corruption) {
        if (level.start_round < 1 || level.start_round <= last_start)
          fail("corruption schedule start rounds must be >= 1 and strictly increasing");
        if (!(level.label_noise >= 0.0 && level.label_noise < 1.0))
          fail("corruption fractions must lie in [0, 1)");
        last_start = level.start_round;
      }
      d1 = h.features;
      d2 = h.classes * h.features;
      break;
    }
  }
}

OraclePtr Stream::round(long t) const {
  if (t < 1 || t > cfg_.horizon) {
    throw ArgumentError("round " + std::to_string(t) + " outside [1, " + std::to_string(cfg_.horizon) + "]");
  }
  return make_round(t);
}

Vector Stream::initial_x(std::uint64_t /*seed*/) const { return Vector::Zero(cfg_.d1); }

StreamPtr make_stream(StreamConfig cfg) {
  switch (cfg.family) {
    case Family::quadratic:
      return make_quadratic_stream(std::move(cfg));
    case Family::hyper_rep:
      return make_hr_stream(std::move(cfg));
    case Family::hyperopt:
      return make_ho_stream(std::move(cfg));
  }
  throw ConfigError("unknown stream family");
}

}  // namespace obo
