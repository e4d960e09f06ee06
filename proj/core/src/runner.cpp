#include "obo/runner.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "config_io.hpp"
#include "obo/errors.hpp"
#include "obo/hypergrad.hpp"
#include "obo/optimizers.hpp"
#include "obo/oracle_check.hpp"
#include "obo/rng.hpp"

namespace obo {

const char* to_string(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::sobow:
      return "sobow";
    case OptimizerKind::oagd:
      return "oagd";
    case OptimizerKind::ogd:
      return "ogd";
  }
  return "?";
}

OptimizerKind optimizer_from_string(const std::string& name) {
  if (name == "sobow") return OptimizerKind::sobow;
  if (name == "oagd") return OptimizerKind::oagd;
  if (name == "ogd") return OptimizerKind::ogd;
  throw ConfigError("unknown optimizer '" + name + "' (expected sobow, oagd or ogd)");
}

SweepAxis sweep_axis_from_string(const std::string& name) {
  if (name == "eta") return SweepAxis::eta;
  if (name == "k_window") return SweepAxis::k_window;
  if (name == "n_inner") return SweepAxis::n_inner;
  if (name == "alpha") return SweepAxis::alpha;
  if (name == "beta") return SweepAxis::beta;
  throw ConfigError("unknown sweep axis '" + name + "' (expected eta, k_window, n_inner, alpha or beta)");
}

const char* to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::eta:
      return "eta";
    case SweepAxis::k_window:
      return "k_window";
    case SweepAxis::n_inner:
      return "n_inner";
    case SweepAxis::alpha:
      return "alpha";
    case SweepAxis::beta:
      return "beta";
  }
  return "?";
}

void ExperimentConfig::check() const {
  StreamConfig s = stream;
  s.normalize();
  optimizer_cfg.check();
  if (run_id.empty() || run_id == "." || run_id == "..") throw ConfigError("run_id must be a non-empty file name");
  for (const char c : run_id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
                    c == '-' || c == '.';
    if (!ok) throw ConfigError("run_id '" + run_id + "' may only contain letters, digits, '_', '-' and '.'");
  }
  if (!(init_scale > 0.0) || !std::isfinite(init_scale)) throw ConfigError("init_scale must be > 0");
  if (!(metric_solve_tol > 0.0)) throw ConfigError("metrics.solve_tol must be > 0");
  if (!(metric_inner_tol > 0.0)) throw ConfigError("metrics.inner_tol must be > 0");
}

std::uint64_t stream_seed(std::uint64_t master) { return split_seed(master, 0); }
std::uint64_t init_seed(std::uint64_t master) { return split_seed(master, 1); }

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> columns = {
      "t",         "blr_instant",  "blr_cumulative", "blr_static_cumulative", "hg_error",    "inner_err",
      "h2_increment", "v1_increment", "x_norm",      "y_norm",                "wallclock_ns"};
  return columns;
}

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

namespace {

std::string opt(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

double domain_diameter(const Domain& domain) {
  if (const auto* ball = std::get_if<BallDomain>(&domain)) return 2.0 * ball->radius;
  if (const auto* box = std::get_if<BoxDomain>(&domain)) return (box->hi - box->lo).norm();
  return 0.0;
}

nlohmann::json summary_fields(const RunSummary& s) {
  nlohmann::json validation = nlohmann::json::array();
  for (const auto& c : s.validation.checks) {
    validation.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  nlohmann::json j = {
      {"schema", kCsvSchemaVersion},
      {"run_id", s.run_id},
      {"optimizer", s.optimizer},
      {"ok", s.ok},
      {"error", s.ok ? nlohmann::json(nullptr) : nlohmann::json(s.error)},
      {"failed_round", s.failed_round ? nlohmann::json(*s.failed_round) : nlohmann::json(nullptr)},
      {"rounds_completed", s.rounds_completed},
      {"final_blr_cumulative", s.final_blr_cumulative},
      {"final_blr_average", s.final_blr_average},
      {"final_blr_static_cumulative",
       s.final_blr_static_cumulative ? nlohmann::json(*s.final_blr_static_cumulative) : nlohmann::json(nullptr)},
      {"mean_hg_error_last_10pct", s.mean_hg_error_last10},
      {"variation_proxies",
       {{"v1", s.v1_proxy},
        {"h2", s.h2_proxy},
        {"note", "evaluated at the iterates only; lower bounds of the sup over x"}}},
      {"total_wallclock_ns", s.total_wallclock_ns},
      {"constants", {{"mu_g", s.constants.mu_g}, {"l1", s.constants.l1}, {"d_bound", s.constants.d_bound}}},
      {"validation", validation},
  };
  return j;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << content;
  out.close();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
}

Vector initial_point(const ExperimentConfig& cfg, const Stream& stream) {
  const std::uint64_t seed = init_seed(cfg.seed);
  switch (cfg.init) {
    case InitKind::stream_default:
      return stream.initial_x(seed);
    case InitKind::zero:
      return Vector::Zero(stream.dim_x());
    case InitKind::random: {
      Rng rng(seed);
      return cfg.init_scale * rng.normal_vector(stream.dim_x());
    }
  }
  return Vector::Zero(stream.dim_x());
}

// Drives one optimizer; each call handles round state.t.
class Driver {
 public:
  Driver(OptimizerKind kind, IterateState state, const OptimizerConfig& cfg)
      : kind_(kind), state_(std::move(state)), cfg_(cfg), past_(std::max(cfg.k_window - 1, 0)) {}

  StepLog step(const OraclePtr& oracle) {
    StepResult r = [&] {
      switch (kind_) {
        case OptimizerKind::sobow:
          return sobow_step(std::move(state_), *oracle, cfg_);
        case OptimizerKind::ogd:
          return ogd_step(std::move(state_), *oracle, cfg_);
        case OptimizerKind::oagd:
          return oagd_step(std::move(state_), oracle, past_, cfg_);
      }
      throw ArgumentError("unknown optimizer");
    }();
    state_ = std::move(r.state);
    return std::move(r.log);
  }

 private:
  OptimizerKind kind_;
  IterateState state_;
  OptimizerConfig cfg_;
  OracleWindow past_;
};

}  // namespace

std::string format_csv(const std::vector<CsvRow>& rows) {
  std::ostringstream os;
  os << "# " << kCsvSchemaVersion << "\n";
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << "\n";
  for (const auto& r : rows) {
    os << r.t << ',' << opt(r.blr_instant) << ',' << opt(r.blr_cumulative) << ',' << opt(r.blr_static_cumulative)
       << ',' << opt(r.hg_error) << ',' << format_number(r.inner_err) << ',' << opt(r.h2_increment) << ','
       << opt(r.v1_increment) << ',' << format_number(r.x_norm) << ',' << format_number(r.y_norm) << ','
       << (r.wallclock_ns ? std::to_string(*r.wallclock_ns) : std::string()) << "\n";
  }
  return os.str();
}

std::string summary_json(const RunSummary& summary, const ExperimentConfig& cfg) {
  nlohmann::json j = summary_fields(summary);
  j["config"] = config_json(cfg);
  return j.dump(2) + "\n";
}

ArtifactSet run_experiment(const ExperimentConfig& cfg_in) {
  cfg_in.check();
  ExperimentConfig cfg = cfg_in;
  cfg.stream.seed = stream_seed(cfg.seed);
  cfg.stream.normalize();
  const StreamPtr stream = make_stream(cfg.stream);

  OptimizerConfig ocfg = cfg.optimizer_cfg;
  if (std::holds_alternative<NoDomain>(ocfg.domain)) {
    if (auto d = stream->default_domain()) ocfg.domain = *d;
  }
  cfg.optimizer_cfg = ocfg;

  ArtifactSet out;
  RunSummary& summary = out.summary;
  summary.run_id = cfg.run_id;
  summary.optimizer = to_string(cfg.optimizer);
  summary.constants = stream->constants();
  summary.constants.d_bound = domain_diameter(ocfg.domain);
  summary.validation = validate_config(ocfg, summary.constants);
  for (const auto& c : summary.validation.checks) {
    if (!c.passed) spdlog::warn("[{}] condition {} not met: {}", cfg.run_id, c.name, c.detail);
  }

  const long horizon = stream->horizon();
  spdlog::info("[{}] {} on {} stream, T = {}, d1 = {}, d2 = {}", cfg.run_id, summary.optimizer,
               to_string(cfg.stream.family), horizon, stream->dim_x(), stream->dim_y());

  Driver driver(cfg.optimizer, IterateState::initial(initial_point(cfg, *stream), stream->initial_y(), ocfg), ocfg);

  ExactHypergradOptions exact_opts;
  exact_opts.solve_tol = cfg.metric_solve_tol;
  exact_opts.inner.tol = cfg.metric_inner_tol;

  OraclePtr oracle;
  for (long t = 1; t <= horizon; ++t) {
    try {
      if (!oracle) oracle = stream->round(t);
      const auto start = std::chrono::steady_clock::now();
      StepLog step = driver.step(oracle);
      const auto stop = std::chrono::steady_clock::now();

      RoundRecord rec;
      rec.t = t;
      rec.wallclock_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count();
      const ExactHypergrad exact = exact_hypergrad_detailed(*oracle, step.x_t, exact_opts);
      rec.exact_grad = exact.grad;
      rec.y_star = exact.y_star;
      rec.f_at_optimum = oracle->f_value(step.x_t, exact.y_star);
      rec.est_grad = std::move(step.record.grad);
      rec.y_next = std::move(step.y_next);
      rec.x = std::move(step.x_t);

      OraclePtr next;
      if (t < horizon) next = stream->round(t + 1);
      if (next && cfg.metrics.variations) {
        Vector next_star = inner_solution(*next, rec.x, exact_opts.inner);
        rec.next_f_at_optimum = next->f_value(rec.x, next_star);
        rec.next_y_star = std::move(next_star);
      }
      out.log.append(std::move(rec));
      oracle = std::move(next);
      if (t % 1000 == 0) spdlog::debug("[{}] round {}", cfg.run_id, t);
    } catch (const Error& e) {
      summary.ok = false;
      summary.failed_round = t;
      summary.error = e.what();
      spdlog::error("[{}] aborted in round {}: {}", cfg.run_id, t, e.what());
      break;
    }
  }

  const RunLog& log = out.log;
  const std::size_t n = log.size();
  summary.rounds_completed = static_cast<long>(n);
  if (n > 0) {
    const int k = ocfg.k_window;
    const std::vector<double> blr = blr_series(log, ocfg.eta, k);
    const std::vector<double> blr_cum = cumulative(blr);
    std::vector<double> static_cum;
    if (cfg.metrics.blr_static) static_cum = cumulative(blr_static_series(log, *stream, ocfg.eta, k));
    const std::vector<double> hg = hypergrad_error_series(log);
    const VariationStats var = variation_stats(log);

    out.rows.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      CsvRow row;
      row.t = log[i].t;
      if (cfg.metrics.blr) {
        row.blr_instant = blr[i];
        row.blr_cumulative = blr_cum[i];
      }
      if (cfg.metrics.blr_static) row.blr_static_cumulative = static_cum[i];
      if (cfg.metrics.hg_error) row.hg_error = hg[i];
      row.inner_err = var.inner_err_series[i];
      if (cfg.metrics.variations) {
        row.h2_increment = var.h2_increments[i];
        row.v1_increment = var.v1_increments[i];
      }
      row.x_norm = log[i].x.norm();
      row.y_norm = log[i].y_next.norm();
      if (cfg.metrics.timing) row.wallclock_ns = log[i].wallclock_ns;
      summary.total_wallclock_ns += log[i].wallclock_ns;
      out.rows.push_back(std::move(row));
    }

    summary.final_blr_cumulative = blr_cum.back();
    summary.final_blr_average = blr_cum.back() / static_cast<double>(n);
    if (cfg.metrics.blr_static) summary.final_blr_static_cumulative = static_cum.back();
    const std::size_t tail = std::max<std::size_t>(1, (n + 9) / 10);
    CompensatedSum tail_sum;
    for (std::size_t i = n - tail; i < n; ++i) tail_sum.add(hg[i]);
    summary.mean_hg_error_last10 = tail_sum.value() / static_cast<double>(tail);
    if (cfg.metrics.variations) {
      summary.v1_proxy = var.v1_proxy;
      summary.h2_proxy = var.h2_proxy;
    }
  }

  if (cfg.write_files) {
    ensure_dir(cfg.output_dir);
    out.csv_path = cfg.output_dir / (cfg.run_id + ".csv");
    out.json_path = cfg.output_dir / (cfg.run_id + ".json");
    write_file(*out.csv_path, format_csv(out.rows));
    write_file(*out.json_path, summary_json(summary, cfg));
  }
  spdlog::info("[{}] done: {} rounds, cumulative BLR {}", cfg.run_id, n, format_number(summary.final_blr_cumulative));
  return out;
}

SweepResult run_sweep(const ExperimentConfig& base, SweepAxis axis, const std::vector<double>& values) {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  base.check();
  SweepResult result;
  result.axis = axis;
  result.values = values;
  nlohmann::json runs = nlohmann::json::object();
  for (const double value : values) {
    ExperimentConfig cfg = base;
    cfg.run_id = base.run_id + "_" + to_string(axis) + "_" + format_number(value);
    RunSummary summary;
    summary.run_id = cfg.run_id;
    summary.optimizer = to_string(cfg.optimizer);
    try {
      auto as_int = [&] {
        if (value != std::floor(value)) throw ConfigError(std::string(to_string(axis)) + " values must be integers");
        return static_cast<int>(value);
      };
      switch (axis) {
        case SweepAxis::eta:
          cfg.optimizer_cfg.eta = value;
          break;
        case SweepAxis::k_window:
          cfg.optimizer_cfg.k_window = as_int();
          break;
        case SweepAxis::n_inner:
          cfg.optimizer_cfg.n_inner = as_int();
          break;
        case SweepAxis::alpha:
          cfg.optimizer_cfg.alpha = value;
          break;
        case SweepAxis::beta:
          cfg.optimizer_cfg.beta = value;
          break;
      }
      summary = run_experiment(cfg).summary;
    } catch (const Error& e) {
      summary.ok = false;
      summary.error = e.what();
      spdlog::error("[{}] failed: {}", cfg.run_id, e.what());
    }
    runs[format_number(value)] = summary_fields(summary);
    result.runs.push_back(std::move(summary));
  }
  if (base.write_files) {
    ensure_dir(base.output_dir);
    nlohmann::json j = {{"axis", to_string(axis)}, {"base", config_json(base)}, {"runs", runs}};
    result.summary_path = base.output_dir / (base.run_id + "_sweep_" + to_string(axis) + ".json");
    write_file(*result.summary_path, j.dump(2) + "\n");
  }
  return result;
}

CompareResult run_compare(const std::vector<ExperimentConfig>& configs, const std::filesystem::path& out_dir) {
  if (configs.empty()) throw ConfigError("compare needs at least one config");
  for (std::size_t i = 0; i < configs.size(); ++i) {
    configs[i].check();
    for (std::size_t j = 0; j < i; ++j) {
      if (configs[i].run_id == configs[j].run_id) {
        throw ConfigError("compare: duplicate run_id '" + configs[i].run_id + "'");
      }
    }
  }
  CompareResult result;
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& base : configs) {
    ExperimentConfig cfg = base;
    cfg.output_dir = out_dir;
    RunSummary summary;
    summary.run_id = cfg.run_id;
    summary.optimizer = to_string(cfg.optimizer);
    try {
      summary = run_experiment(cfg).summary;
    } catch (const Error& e) {
      summary.ok = false;
      summary.error = e.what();
      spdlog::error("[{}] failed: {}", cfg.run_id, e.what());
    }
    runs.push_back(summary_fields(summary));
    result.runs.push_back(std::move(summary));
  }

  std::ostringstream table;
  table << std::left << std::setw(24) << "run_id" << std::setw(8) << "opt" << std::setw(6) << "ok" << std::setw(8)
        << "rounds" << std::setw(16) << "blr_cum" << std::setw(16) << "blr_avg" << std::setw(16) << "hg_err_tail"
        << "wall_ms\n";
  for (const auto& s : result.runs) {
    std::ostringstream blr_cum, blr_avg, hg;
    blr_cum << std::setprecision(6) << s.final_blr_cumulative;
    blr_avg << std::setprecision(6) << s.final_blr_average;
    hg << std::setprecision(6) << s.mean_hg_error_last10;
    table << std::left << std::setw(24) << s.run_id << std::setw(8) << s.optimizer << std::setw(6)
          << (s.ok ? "yes" : "no") << std::setw(8) << s.rounds_completed << std::setw(16) << blr_cum.str()
          << std::setw(16) << blr_avg.str() << std::setw(16) << hg.str() << std::fixed << std::setprecision(1)
          << static_cast<double>(s.total_wallclock_ns) / 1e6 << std::defaultfloat << "\n";
  }
  result.table = table.str();

  ensure_dir(out_dir);
  result.summary_path = out_dir / "compare_summary.json";
  write_file(*result.summary_path, nlohmann::json{{"runs", runs}}.dump(2) + "\n");
  write_file(out_dir / "compare_table.txt", result.table);
  return result;
}

CheckResult run_check(const ExperimentConfig& cfg_in, int probes_per_round, long rounds) {
  cfg_in.check();
  if (probes_per_round < 1) throw ArgumentError("run_check: probes_per_round must be >= 1");
  StreamConfig sc = cfg_in.stream;
  sc.seed = stream_seed(cfg_in.seed);
  sc.normalize();
  const StreamPtr stream = make_stream(sc);

  OptimizerConfig ocfg = cfg_in.optimizer_cfg;
  if (std::holds_alternative<NoDomain>(ocfg.domain)) {
    if (auto d = stream->default_domain()) ocfg.domain = *d;
  }

  CheckResult result;
  Rng rng(split_seed(cfg_in.seed, 2));
  const long last = std::min(rounds, stream->horizon());
  for (long t = 1; t <= last; ++t) {
    const OraclePtr oracle = stream->round(t);
    for (int p = 0; p < probes_per_round; ++p) {
      const Vector x = project(rng.normal_vector(stream->dim_x()), ocfg.domain);
      const Vector y = rng.normal_vector(stream->dim_y());
      OracleCheckOptions options;
      options.seed = rng.next_u64();
      const ConsistencyReport report = check_oracle(*oracle, x, y, options);
      for (const auto& item : report.items) {
        std::ostringstream line;
        line << "round " << t << " probe " << p << ": " << item.name << " rel_err " << std::setprecision(3)
             << item.relative_error << (item.passed ? " ok" : " FAIL");
        result.lines.push_back(line.str());
      }
      result.oracles_ok = result.oracles_ok && report.passed;

      double err = 0.0;
      try {
        err = relative_error(exact_hypergrad(*oracle, x), fd_hypergrad(*oracle, x));
      } catch (const Error& e) {
        err = std::numeric_limits<double>::infinity();
        result.lines.push_back(std::string("hypergradient check raised: ") + e.what());
      }
      const bool ok = err < 1e-4;
      std::ostringstream line;
      line << "round " << t << " probe " << p << ": hypergrad_vs_fd rel_err " << std::setprecision(3) << err
           << (ok ? " ok" : " FAIL");
      result.lines.push_back(line.str());
      result.oracles_ok = result.oracles_ok && ok;
    }
  }

  RegularityConstants constants = stream->constants();
  constants.d_bound = domain_diameter(ocfg.domain);
  result.validation = validate_config(ocfg, constants);
  for (const auto& c : result.validation.checks) {
    result.lines.push_back("condition " + c.name + (c.passed ? " ok: " : " NOT MET: ") + c.detail);
  }
  return result;
}

}  // namespace obo
