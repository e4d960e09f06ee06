#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "obo/config.hpp"
#include "obo/oracle.hpp"

namespace obo {

enum class Family { quadratic, hyper_rep, hyperopt };
enum class DriftKind { static_, staged, smooth };

const char* to_string(Family family);
Family family_from_string(const std::string& name);
const char* to_string(DriftKind kind);
DriftKind drift_from_string(const std::string& name);

// How the stream's underlying model moves over time.
//   static           : never
//   staged(period, m): redrawn every `period` rounds, offsets scaled by m
//   smooth(rate)     : offsets move along fixed directions by rate * sqrt(t - 1)
struct Drift {
  DriftKind kind = DriftKind::static_;
  long period = 1000;
  double magnitude = 1.0;
  double rate = 0.0;

  // Stage of round t (0-based); always 0 unless staged.
  long stage(long t) const;
};

struct CorruptionLevel {
  long start_round = 1;
  double label_noise = 0.0;  // fraction of training labels replaced, in [0, 1)
};

struct QuadraticParams {
  double mu = 1.0;            // smallest eigenvalue of the inner Hessian
  double L = 2.0;             // largest eigenvalue
  double coupling = 1.0;      // scale of the coupling matrix B
  double outer_weight = 1.0;  // weight r of the outer proximity term
  // Overrides for hand-built instances; left empty, they are drawn from the seed.
  Matrix A;
  Matrix B;
};

struct HyperRepParams {
  int p = 20;             // input features
  int d = 5;              // representation width
  int batch_f = 4;        // outer minibatch size
  int batch_g = 4;        // inner minibatch size
  double gamma = 10.0;    // ridge weight of the inner objective
};

struct HyperOptParams {
  int classes = 5;
  int features = 50;
  int batch_train = 16;
  int batch_val = 16;
  int informative = 10;     // features carrying class signal; the rest are noise
  double lambda_lo = -3.0;  // box on the log-scale regularization weights
  double lambda_hi = 2.0;
  double class_separation = 1.5;
  std::vector<CorruptionLevel> corruption;
};

struct StreamConfig {
  Family family = Family::quadratic;
  int d1 = 5;
  int d2 = 5;
  long horizon = 1000;
  std::uint64_t seed = 0;
  Drift drift{};
  double noise_std = 0.0;
  QuadraticParams quadratic{};
  HyperRepParams hyper_rep{};
  HyperOptParams hyperopt{};

  // Throws ConfigError. Also fixes d1/d2 for families where they are derived.
  void normalize();
};

// A time-varying sequence of bilevel rounds. Rounds are generated on demand and
// depend only on (config, t), so they can be requested in any order and
// regenerated bit-identically.
class Stream {
 public:
  virtual ~Stream() = default;

  const StreamConfig& config() const { return cfg_; }
  long horizon() const { return cfg_.horizon; }
  Eigen::Index dim_x() const { return cfg_.d1; }
  Eigen::Index dim_y() const { return cfg_.d2; }

  // Round t in [1, horizon]. Throws ArgumentError outside that range.
  OraclePtr round(long t) const;

  // Constants reported for run metadata and config validation.
  virtual RegularityConstants constants() const = 0;

  // Deterministic initial outer point: zero unless the family has a
  // stationary point at the origin, in which case a seeded random draw.
  virtual Vector initial_x(std::uint64_t seed) const;
  virtual Vector initial_y() const { return Vector::Zero(cfg_.d2); }

  // Outer domain required by the family's regularity assumptions, if any.
  virtual std::optional<Domain> default_domain() const { return std::nullopt; }

 protected:
  explicit Stream(StreamConfig cfg) : cfg_(std::move(cfg)) {}
  virtual OraclePtr make_round(long t) const = 0;

  StreamConfig cfg_;
};

using StreamPtr = std::shared_ptr<const Stream>;

StreamPtr make_quadratic_stream(StreamConfig cfg);
StreamPtr make_hr_stream(StreamConfig cfg);
StreamPtr make_ho_stream(StreamConfig cfg);
StreamPtr make_stream(StreamConfig cfg);

// Closed-form quantities of the quadratic family, exposed for verification.
//   g_t(x, y) = 1/2 y'Ay - y'(Bx + c_t),  f_t(x, y) = 1/2 |y - d_t|^2 + r/2 |x - e_t|^2
struct QuadraticRoundView {
  Matrix A;
  Matrix B;
  Vector c;
  Vector d;
  Vector e;
  double r = 1.0;

  Vector y_star(const Vector& x) const;
  // Gradient of x -> f_t(x, y*(x)): B'A^{-T}(A^{-1}(Bx + c) - d) + r (x - e).
  Vector composite_gradient(const Vector& x) const;
};

QuadraticRoundView quadratic_view(const Stream& stream, long t);

// Ground truth of a hyper-representation round, exposed for tests.
struct HyperRepRoundView {
  Matrix Xf, Xg;
  Vector Yf, Yg;
  Matrix lambda_true;   // p x d
  Vector w_true;        // d
  double gamma = 1.0;
};

HyperRepRoundView hyper_rep_view(const Stream& stream, long t);

// Labels of a hyperparameter-optimization round, exposed for tests.
struct HyperOptRoundView {
  Matrix train_features;  // n x F
  std::vector<int> train_labels;
  std::vector<int> clean_train_labels;
  Matrix val_features;
  std::vector<int> val_labels;
};

HyperOptRoundView hyper_opt_view(const Stream& stream, long t);

}  // namespace obo
