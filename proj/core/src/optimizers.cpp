#include "obo/optimizers.hpp"

#include <cmath>
#include <vector>

namespace obo {

namespace {

double window_normalizer(int capacity, double eta) {
  double total = 0.0;
  double weight = 1.0;
  for (int i = 0; i < capacity; ++i) {
    total += weight;
    weight *= eta;
  }
  return total;
}

// (1/W) sum_i eta^i g_i with g_0 the newest. Shared by the window buffer and
// the re-evaluating baseline so both produce identical arithmetic.
Vector weighted_window(const std::vector<const Vector*>& grads, double eta, double normalizer) {
  Vector sum = Vector::Zero(grads.front()->size());
  double weight = 1.0;
  for (const Vector* g : grads) {
    sum += weight * (*g);
    weight *= eta;
  }
  return sum / normalizer;
}

Vector inner_step(const RoundOracle& oracle, const Vector& x, const Vector& y, double alpha) {
  return y - alpha * oracle.grad_g_y(x, y);
}

void check_round(const IterateState& state, const RoundOracle& oracle) {
  if (oracle.round_index() != state.t) {
    throw ArgumentError("oracle round " + std::to_string(oracle.round_index()) +
                        " does not match iterate round " + std::to_string(state.t));
  }
  require_dim(state.x, oracle.dim_x(), "iterate x");
  require_dim(state.y, oracle.dim_y(), "iterate y");
}

}  // namespace

WindowBuffer::WindowBuffer(int capacity, double eta)
    : capacity_(capacity), eta_(eta), normalizer_(0.0) {
  if (capacity < 1) throw ArgumentError("WindowBuffer: capacity must be >= 1");
  if (!(eta > 0.0 && eta <= 1.0)) throw ArgumentError("WindowBuffer: eta must lie in (0, 1]");
  normalizer_ = window_normalizer(capacity, eta);
}

void WindowBuffer::push(HypergradRecord record) {
  if (!records_.empty() && record.round <= records_.front().round) {
    throw ArgumentError("WindowBuffer: rounds must strictly increase");
  }
  records_.push_front(std::move(record));
  if (records_.size() > static_cast<std::size_t>(capacity_)) records_.pop_back();
}

double WindowBuffer::applied_weight() const {
  return window_normalizer(static_cast<int>(records_.size()), eta_) / normalizer_;
}

Vector window_average(const WindowBuffer& buffer) {
  if (buffer.empty()) throw EmptyWindowError("window_average: buffer is empty");
  std::vector<const Vector*> grads;
  grads.reserve(buffer.size());
  for (const auto& record : buffer.records()) grads.push_back(&record.grad);
  return weighted_window(grads, buffer.eta(), buffer.normalizer());
}

Vector project(const Vector& x, const Domain& domain) {
  if (std::holds_alternative<NoDomain>(domain)) return x;
  if (const auto* ball = std::get_if<BallDomain>(&domain)) {
    if (!(ball->radius > 0.0)) throw DomainError("ball radius must be > 0");
    require_dim(ball->center, x.size(), "ball center");
    const Vector offset = x - ball->center;
    const double dist = offset.norm();
    if (dist <= ball->radius) return x;
    return ball->center + (ball->radius / dist) * offset;
  }
  const auto& box = std::get<BoxDomain>(domain);
  require_dim(box.lo, x.size(), "box lo");
  require_dim(box.hi, x.size(), "box hi");
  if ((box.lo.array() > box.hi.array()).any()) throw DomainError("box has lo > hi");
  return x.cwiseMax(box.lo).cwiseMin(box.hi);
}

bool in_domain(const Vector& x, const Domain& domain, double slack) {
  if (std::holds_alternative<NoDomain>(domain)) return true;
  if (const auto* ball = std::get_if<BallDomain>(&domain)) {
    return (x - ball->center).norm() <= ball->radius + slack;
  }
  const auto& box = std::get<BoxDomain>(domain);
  return (x.array() >= box.lo.array()).all() && (x.array() <= box.hi.array()).all();
}

IterateState IterateState::initial(Vector x1, Vector y1, const OptimizerConfig& cfg) {
  require_finite(x1, "initial x");
  require_finite(y1, "initial y");
  IterateState state{1, project(x1, cfg.domain), std::move(y1), WindowBuffer(cfg.k_window, cfg.eta),
                     QSchedule{cfg.q0, cfg.q_increment, cfg.q_max}, std::nullopt};
  return state;
}

StepResult sobow_step(IterateState state, const RoundOracle& oracle, const OptimizerConfig& cfg) {
  check_round(state, oracle);

  Vector y_next = inner_step(oracle, state.x, state.y, cfg.alpha);

  const int q = q_at(state.schedule, state.t);
  const Vector v0 = (cfg.warm_start && state.last_v) ? *state.last_v : Vector::Zero(oracle.dim_y());
  HypergradRecord record = estimate_hypergrad(oracle, state.x, y_next, cfg, q, v0);

  state.buffer.push(record);
  Vector direction = window_average(state.buffer);
  Vector x_next = project(state.x - cfg.beta * direction, cfg.domain);

  StepResult out{std::move(state), {}};
  out.log.t = out.state.t;
  out.log.x_t = std::move(out.state.x);
  out.log.y_next = y_next;
  out.log.direction = std::move(direction);
  if (cfg.warm_start) out.state.last_v = record.v_q;
  out.log.record = std::move(record);

  out.state.t += 1;
  out.state.x = std::move(x_next);
  out.state.y = std::move(y_next);
  return out;
}

StepResult ogd_step(IterateState state, const RoundOracle& oracle, const OptimizerConfig& cfg) {
  if (state.buffer.capacity() != 1) state.buffer = WindowBuffer(1, cfg.eta);
  OptimizerConfig single = cfg;
  single.k_window = 1;
  return sobow_step(std::move(state), oracle, single);
}

void OracleWindow::push(OraclePtr oracle) {
  if (capacity_ <= 0) return;
  oracles_.push_front(std::move(oracle));
  if (oracles_.size() > static_cast<std::size_t>(capacity_)) oracles_.pop_back();
}

StepResult oagd_step(IterateState state, const OraclePtr& oracle, OracleWindow& past,
                     const OptimizerConfig& cfg) {
  check_round(state, *oracle);

  Vector y_next = state.y;
  for (int n = 0; n < cfg.n_inner; ++n) y_next = inner_step(*oracle, state.x, y_next, cfg.alpha);

  const int q = q_at(state.schedule, state.t);
  const Vector v0 = Vector::Zero(oracle->dim_y());
  const std::size_t window = std::min<std::size_t>(static_cast<std::size_t>(cfg.k_window), past.size() + 1);

  std::vector<HypergradRecord> records;
  records.reserve(window);
  records.push_back(estimate_hypergrad(*oracle, state.x, y_next, cfg, q, v0));
  for (std::size_t age = 1; age < window; ++age) {
    records.push_back(estimate_hypergrad(*past.at_age(age - 1), state.x, y_next, cfg, q, v0));
  }
  std::vector<const Vector*> grads;
  grads.reserve(records.size());
  for (const auto& r : records) grads.push_back(&r.grad);

  const double normalizer = state.buffer.normalizer();
  Vector direction = weighted_window(grads, cfg.eta, normalizer);
  Vector x_next = project(state.x - cfg.beta * direction, cfg.domain);

  state.buffer.push(records.front());
  past.push(oracle);

  StepResult out{std::move(state), {}};
  out.log.t = out.state.t;
  out.log.x_t = std::move(out.state.x);
  out.log.y_next = y_next;
  out.log.direction = std::move(direction);
  out.log.record = std::move(records.front());

  out.state.t += 1;
  out.state.x = std::move(x_next);
  out.state.y = std::move(y_next);
  return out;
}

}  // namespace obo
