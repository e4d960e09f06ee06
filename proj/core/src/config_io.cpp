// TOML experiment configs and their JSON echo.
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>
#include <toml.hpp>

#include "config_io.hpp"
#include "obo/runner.hpp"

namespace obo {

namespace {

using Keys = std::set<std::string, std::less<>>;

void check_keys(const toml::table& table, const Keys& allowed, const std::string& where) {
  for (const auto& [key, node] : table) {
    if (!allowed.count(key.str())) {
      throw ConfigError("unknown key '" + std::string(key.str()) + "' in " + where);
    }
  }
}

const toml::table* subtable(const toml::table& table, std::string_view key, const std::string& where) {
  const toml::node* node = table.get(key);
  if (!node) return nullptr;
  if (!node->is_table()) throw ConfigError(where + "." + std::string(key) + " must be a table");
  return node->as_table();
}

template <typename T>
void read(const toml::table& table, std::string_view key, T& out, const std::string& where) {
  const toml::node* node = table.get(key);
  if (!node) return;
  auto fail = [&](const char* expected) {
    throw ConfigError(where + "." + std::string(key) + " must be " + expected);
  };
  if constexpr (std::is_same_v<T, bool>) {
    if (!node->is_boolean()) fail("a boolean");
    out = node->as_boolean()->get();
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!node->is_string()) fail("a string");
    out = node->as_string()->get();
  } else if constexpr (std::is_floating_point_v<T>) {
    if (node->is_floating_point()) {
      out = node->as_floating_point()->get();
    } else if (node->is_integer()) {
      out = static_cast<T>(node->as_integer()->get());
    } else {
      fail("a number");
    }
  } else if constexpr (std::is_same_v<T, std::uint64_t>) {
    if (!node->is_integer() || node->as_integer()->get() < 0) fail("a non-negative integer");
    out = static_cast<std::uint64_t>(node->as_integer()->get());
  } else {
    if (!node->is_integer()) fail("an integer");
    out = static_cast<T>(node->as_integer()->get());
  }
}

// Either a scalar broadcast to `dim` or an array of exactly `dim` numbers.
Vector read_vector(const toml::table& table, std::string_view key, Eigen::Index dim, double fallback,
                   const std::string& where) {
  const toml::node* node = table.get(key);
  if (!node) return Vector::Constant(dim, fallback);
  if (node->is_number()) {
    double v = 0.0;
    read(table, key, v, where);
    return Vector::Constant(dim, v);
  }
  const toml::array* arr = node->as_array();
  if (!arr) throw ConfigError(where + "." + std::string(key) + " must be a number or an array");
  if (static_cast<Eigen::Index>(arr->size()) != dim) {
    throw ConfigError(where + "." + std::string(key) + " must have " + std::to_string(dim) + " entries");
  }
  Vector out(dim);
  for (std::size_t i = 0; i < arr->size(); ++i) {
    const auto v = (*arr)[i].value<double>();
    if (!v) throw ConfigError(where + "." + std::string(key) + " must contain numbers");
    out[static_cast<Eigen::Index>(i)] = *v;
  }
  return out;
}

void parse_stream(const toml::table& t, StreamConfig& s) {
  const std::string w = "stream";
  check_keys(t, {"family", "d1", "d2", "horizon", "noise_std", "drift", "quadratic", "hyper_rep", "hyperopt"}, w);
  std::string family = to_string(s.family);
  read(t, "family", family, w);
  s.family = family_from_string(family);
  read(t, "d1", s.d1, w);
  read(t, "d2", s.d2, w);
  read(t, "horizon", s.horizon, w);
  read(t, "noise_std", s.noise_std, w);

  if (const auto* d = subtable(t, "drift", w)) {
    const std::string wd = w + ".drift";
    check_keys(*d, {"kind", "period", "magnitude", "rate"}, wd);
    std::string kind = to_string(s.drift.kind);
    read(*d, "kind", kind, wd);
    s.drift.kind = drift_from_string(kind);
    read(*d, "period", s.drift.period, wd);
    read(*d, "magnitude", s.drift.magnitude, wd);
    read(*d, "rate", s.drift.rate, wd);
  }
  if (const auto* q = subtable(t, "quadratic", w)) {
    const std::string wq = w + ".quadratic";
    check_keys(*q, {"mu", "L", "coupling", "outer_weight"}, wq);
    read(*q, "mu", s.quadratic.mu, wq);
    read(*q, "L", s.quadratic.L, wq);
    read(*q, "coupling", s.quadratic.coupling, wq);
    read(*q, "outer_weight", s.quadratic.outer_weight, wq);
  }
  if (const auto* h = subtable(t, "hyper_rep", w)) {
    const std::string wh = w + ".hyper_rep";
    check_keys(*h, {"p", "d", "batch_f", "batch_g", "gamma"}, wh);
    read(*h, "p", s.hyper_rep.p, wh);
    read(*h, "d", s.hyper_rep.d, wh);
    read(*h, "batch_f", s.hyper_rep.batch_f, wh);
    read(*h, "batch_g", s.hyper_rep.batch_g, wh);
    read(*h, "gamma", s.hyper_rep.gamma, wh);
  }
  if (const auto* h = subtable(t, "hyperopt", w)) {
    const std::string wh = w + ".hyperopt";
    check_keys(*h, {"classes", "features", "informative", "batch_train", "batch_val", "lambda_lo", "lambda_hi",
                    "class_separation", "corruption"},
               wh);
    auto& o = s.hyperopt;
    read(*h, "classes", o.classes, wh);
    read(*h, "features", o.features, wh);
    read(*h, "informative", o.informative, wh);
    read(*h, "batch_train", o.batch_train, wh);
    read(*h, "batch_val", o.batch_val, wh);
    read(*h, "lambda_lo", o.lambda_lo, wh);
    read(*h, "lambda_hi", o.lambda_hi, wh);
    read(*h, "class_separation", o.class_separation, wh);
    if (const toml::node* c = h->get("corruption")) {
      const toml::array* levels = c->as_array();
      if (!levels) throw ConfigError(wh + ".corruption must be an array of [start_round, fraction] pairs");
      o.corruption.clear();
      for (const auto& level : *levels) {
        const toml::array* pair = level.as_array();
        if (!pair || pair->size() != 2) throw ConfigError(wh + ".corruption entries must be [start_round, fraction]");
        const auto start = (*pair)[0].value<std::int64_t>();
        const auto frac = (*pair)[1].value<double>();
        if (!start || !frac) throw ConfigError(wh + ".corruption entries must be [integer, number]");
        o.corruption.push_back({static_cast<long>(*start), *frac});
      }
    }
  }
}

void parse_optimizer(const toml::table& t, ExperimentConfig& cfg) {
  const std::string w = "optimizer";
  check_keys(t, {"kind", "alpha", "beta", "eta", "k_window", "lambda_solver", "q0", "q_increment", "q_max",
                 "n_inner", "solver", "warm_start", "domain"},
             w);
  std::string kind = to_string(cfg.optimizer);
  read(t, "kind", kind, w);
  cfg.optimizer = optimizer_from_string(kind);
  auto& o = cfg.optimizer_cfg;
  read(t, "alpha", o.alpha, w);
  read(t, "beta", o.beta, w);
  read(t, "eta", o.eta, w);
  read(t, "k_window", o.k_window, w);
  read(t, "lambda_solver", o.lambda_solver, w);
  read(t, "q0", o.q0, w);
  read(t, "q_increment", o.q_increment, w);
  read(t, "q_max", o.q_max, w);
  read(t, "n_inner", o.n_inner, w);
  std::string solver = to_string(o.solver_kind);
  read(t, "solver", solver, w);
  o.solver_kind = solver_kind_from_string(solver);
  read(t, "warm_start", o.warm_start, w);

  if (const auto* d = subtable(t, "domain", w)) {
    const std::string wd = w + ".domain";
    check_keys(*d, {"kind", "center", "radius", "lo", "hi"}, wd);
    std::string dk = "none";
    read(*d, "kind", dk, wd);
    const Eigen::Index dim = cfg.stream.d1;
    if (dk == "none") {
      o.domain = NoDomain{};
    } else if (dk == "ball") {
      BallDomain ball{read_vector(*d, "center", dim, 0.0, wd), 1.0};
      read(*d, "radius", ball.radius, wd);
      o.domain = std::move(ball);
    } else if (dk == "box") {
      if (!d->get("lo") || !d->get("hi")) throw ConfigError(wd + ": box needs lo and hi");
      o.domain = BoxDomain{read_vector(*d, "lo", dim, 0.0, wd), read_vector(*d, "hi", dim, 0.0, wd)};
    } else {
      throw ConfigError("unknown domain kind '" + dk + "'");
    }
  }
}

void parse_metrics(const toml::table& t, ExperimentConfig& cfg) {
  const std::string w = "metrics";
  check_keys(t, {"blr", "blr_static", "hg_error", "variations", "timing", "solve_tol", "inner_tol"}, w);
  read(t, "blr", cfg.metrics.blr, w);
  read(t, "blr_static", cfg.metrics.blr_static, w);
  read(t, "hg_error", cfg.metrics.hg_error, w);
  read(t, "variations", cfg.metrics.variations, w);
  read(t, "timing", cfg.metrics.timing, w);
  read(t, "solve_tol", cfg.metric_solve_tol, w);
  read(t, "inner_tol", cfg.metric_inner_tol, w);
}

InitKind init_from_string(const std::string& name) {
  if (name == "stream_default") return InitKind::stream_default;
  if (name == "zero") return InitKind::zero;
  if (name == "random") return InitKind::random;
  throw ConfigError("unknown init '" + name + "'");
}

const char* to_string(InitKind kind) {
  switch (kind) {
    case InitKind::stream_default:
      return "stream_default";
    case InitKind::zero:
      return "zero";
    case InitKind::random:
      return "random";
  }
  return "?";
}

nlohmann::json vector_json(const Vector& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& toml_text, const std::filesystem::path& base_dir) {
  toml::table root;
  try {
    root = toml::parse(toml_text);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << "TOML parse error: " << e.description() << " at line " << e.source().begin.line;
    throw ConfigError(os.str());
  }

  ExperimentConfig cfg;
  check_keys(root, {"run_id", "output_dir", "seed", "init", "init_scale", "stream", "optimizer", "metrics"}, "config");
  read(root, "run_id", cfg.run_id, "config");
  std::string out_dir;
  read(root, "output_dir", out_dir, "config");
  if (!out_dir.empty()) {
    const std::filesystem::path p(out_dir);
    cfg.output_dir = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  }
  read(root, "seed", cfg.seed, "config");
  std::string init = to_string(cfg.init);
  read(root, "init", init, "config");
  cfg.init = init_from_string(init);
  read(root, "init_scale", cfg.init_scale, "config");

  if (const auto* s = subtable(root, "stream", "config")) parse_stream(*s, cfg.stream);
  cfg.stream.normalize();
  if (const auto* o = subtable(root, "optimizer", "config")) parse_optimizer(*o, cfg);
  if (const auto* m = subtable(root, "metrics", "config")) parse_metrics(*m, cfg);
  cfg.check();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  // Relative output directories resolve against the working directory.
  return parse_experiment_config(buffer.str());
}

nlohmann::json config_json(const ExperimentConfig& cfg) {
  const auto& s = cfg.stream;
  nlohmann::json stream = {
      {"family", to_string(s.family)},
      {"d1", s.d1},
      {"d2", s.d2},
      {"horizon", s.horizon},
      {"seed", s.seed},
      {"noise_std", s.noise_std},
      {"drift",
       {{"kind", to_string(s.drift.kind)},
        {"period", s.drift.period},
        {"magnitude", s.drift.magnitude},
        {"rate", s.drift.rate}}},
  };
  switch (s.family) {
    case Family::quadratic:
      stream["quadratic"] = {{"mu", s.quadratic.mu},
                             {"L", s.quadratic.L},
                             {"coupling", s.quadratic.coupling},
                             {"outer_weight", s.quadratic.outer_weight}};
      break;
    case Family::hyper_rep:
      stream["hyper_rep"] = {{"p", s.hyper_rep.p},
                             {"d", s.hyper_rep.d},
                             {"batch_f", s.hyper_rep.batch_f},
                             {"batch_g", s.hyper_rep.batch_g},
                             {"gamma", s.hyper_rep.gamma}};
      break;
    case Family::hyperopt: {
      nlohmann::json levels = nlohmann::json::array();
      for (const auto& c : s.hyperopt.corruption) levels.push_back({c.start_round, c.label_noise});
      stream["hyperopt"] = {{"classes", s.hyperopt.classes},
                            {"features", s.hyperopt.features},
                            {"informative", s.hyperopt.informative},
                            {"batch_train", s.hyperopt.batch_train},
                            {"batch_val", s.hyperopt.batch_val},
                            {"lambda_lo", s.hyperopt.lambda_lo},
                            {"lambda_hi", s.hyperopt.lambda_hi},
                            {"class_separation", s.hyperopt.class_separation},
                            {"corruption", levels}};
      break;
    }
  }

  const auto& o = cfg.optimizer_cfg;
  nlohmann::json domain;
  if (std::holds_alternative<NoDomain>(o.domain)) {
    domain = {{"kind", "none"}};
  } else if (const auto* ball = std::get_if<BallDomain>(&o.domain)) {
    domain = {{"kind", "ball"}, {"center", vector_json(ball->center)}, {"radius", ball->radius}};
  } else {
    const auto& box = std::get<BoxDomain>(o.domain);
    domain = {{"kind", "box"}, {"lo", vector_json(box.lo)}, {"hi", vector_json(box.hi)}};
  }
  nlohmann::json optimizer = {
      {"kind", to_string(cfg.optimizer)},
      {"alpha", o.alpha},
      {"beta", o.beta},
      {"eta", o.eta},
      {"k_window", o.k_window},
      {"lambda_solver", o.lambda_solver},
      {"q0", o.q0},
      {"q_increment", o.q_increment},
      {"q_max", o.q_max},
      {"n_inner", o.n_inner},
      {"solver", to_string(o.solver_kind)},
      {"warm_start", o.warm_start},
      {"domain", domain},
  };
  nlohmann::json metrics = {
      {"blr", cfg.metrics.blr},
      {"blr_static", cfg.metrics.blr_static},
      {"hg_error", cfg.metrics.hg_error},
      {"variations", cfg.metrics.variations},
      {"timing", cfg.metrics.timing},
      {"solve_tol", cfg.metric_solve_tol},
      {"inner_tol", cfg.metric_inner_tol},
  };
  return {
      {"run_id", cfg.run_id},
      {"seed", cfg.seed},
      {"init", to_string(cfg.init)},
      {"init_scale", cfg.init_scale},
      {"stream", stream},
      {"optimizer", optimizer},
      {"metrics", metrics},
  };
}

}  // namespace obo
