#pragma once

#include <deque>
#include <optional>

#include "obo/config.hpp"
#include "obo/hypergrad.hpp"
#include "obo/linear_solver.hpp"
#include "obo/oracle.hpp"

namespace obo {

// The K most recent hypergradient records, newest first, with geometric
// weights eta^age. The normalizer W = sum_{i<K} eta^i is fixed by capacity so
// that rounds before the first one count as zero.
class WindowBuffer {
 public:
  WindowBuffer(int capacity, double eta);

  int capacity() const { return capacity_; }
  double eta() const { return eta_; }
  double normalizer() const { return normalizer_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  // Evicts the oldest record when full. Rounds must strictly increase.
  void push(HypergradRecord record);

  const HypergradRecord& at_age(std::size_t age) const { return records_.at(age); }
  const std::deque<HypergradRecord>& records() const { return records_; }

  // Sum of the weights currently applied, (sum_{i < size} eta^i) / W.
  double applied_weight() const;

 private:
  int capacity_;
  double eta_;
  double normalizer_;
  std::deque<HypergradRecord> records_;
};

// (1/W) sum_i eta^i grad_i over stored records, i the age (0 = newest).
Vector window_average(const WindowBuffer& buffer);

// Euclidean projection onto the domain. Throws DomainError on a malformed domain.
Vector project(const Vector& x, const Domain& domain);

bool in_domain(const Vector& x, const Domain& domain, double slack = 1e-12);

struct IterateState {
  long t = 1;
  Vector x;
  Vector y;
  WindowBuffer buffer;
  QSchedule schedule;
  // Last linear-solve solution; only read when warm starting is enabled.
  std::optional<Vector> last_v;

  static IterateState initial(Vector x1, Vector y1, const OptimizerConfig& cfg);
};

struct StepLog {
  long t = 1;
  Vector x_t;
  Vector y_next;
  HypergradRecord record;     // the current round's estimate
  Vector direction;           // what the outer step descended along
};

struct StepResult {
  IterateState state;
  StepLog log;
};

// One round of the single-loop window-averaged method: a single inner gradient
// step, one linear solve, a push into the window and a projected outer step
// along the window average.
StepResult sobow_step(IterateState state, const RoundOracle& oracle, const OptimizerConfig& cfg);

// sobow_step with a window of one.
StepResult ogd_step(IterateState state, const RoundOracle& oracle, const OptimizerConfig& cfg);

// The previous K-1 rounds' oracles, newest first, retained by the
// re-evaluating baseline.
class OracleWindow {
 public:
  explicit OracleWindow(int capacity) : capacity_(capacity) {}

  int capacity() const { return capacity_; }
  std::size_t size() const { return oracles_.size(); }
  const OraclePtr& at_age(std::size_t age) const { return oracles_.at(age); }
  void push(OraclePtr oracle);

 private:
  int capacity_;
  std::deque<OraclePtr> oracles_;
};

// One round of the re-evaluating baseline: n_inner inner steps, then every
// oracle in the window (current included) is differentiated at the current
// pair (x_t, y_{t+1}), each with its own linear solve. `past` holds the
// previous rounds and is advanced to include `oracle` on return.
StepResult oagd_step(IterateState state, const OraclePtr& oracle, OracleWindow& past,
                     const OptimizerConfig& cfg);

}  // namespace obo
