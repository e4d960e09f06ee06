#include <benchmark/benchmark.h>

#include "obo/optimizers.hpp"
#include "obo/problems.hpp"

namespace {

using namespace obo;

StreamPtr hr_stream(long horizon) {
  StreamConfig sc;
  sc.family = Family::hyper_rep;
  sc.horizon = horizon;
  sc.seed = 7;
  sc.drift.kind = DriftKind::staged;
  sc.drift.period = 1000;
  return make_stream(sc);
}

OptimizerConfig hr_optimizer(int k) {
  OptimizerConfig cfg;
  cfg.alpha = cfg.beta = cfg.lambda_solver = 1e-4;
  cfg.k_window = k;
  return cfg;
}

constexpr long kHorizon = 1 << 20;

// Rounds are pre-generated so the timing covers the step only.
std::vector<OraclePtr> rounds(const Stream& stream, long n) {
  std::vector<OraclePtr> out;
  for (long t = 1; t <= n; ++t) out.push_back(stream.round(t));
  return out;
}

void BM_SobowStep(benchmark::State& state) {
  const StreamPtr stream = hr_stream(kHorizon);
  const OptimizerConfig cfg = hr_optimizer(static_cast<int>(state.range(0)));
  const auto pool = rounds(*stream, 2000);
  IterateState s = IterateState::initial(stream->initial_x(1), stream->initial_y(), cfg);
  long t = 1;
  for (auto _ : state) {
    if (t > static_cast<long>(pool.size())) {
      state.PauseTiming();
      s = IterateState::initial(stream->initial_x(1), stream->initial_y(), cfg);
      t = 1;
      state.ResumeTiming();
    }
    s = sobow_step(std::move(s), *pool[static_cast<std::size_t>(t - 1)], cfg).state;
    ++t;
  }
}
BENCHMARK(BM_SobowStep)->Arg(1)->Arg(10)->Arg(50);

void BM_OgdStep(benchmark::State& state) {
  const StreamPtr stream = hr_stream(kHorizon);
  const OptimizerConfig cfg = hr_optimizer(1);
  const auto pool = rounds(*stream, 2000);
  IterateState s = IterateState::initial(stream->initial_x(1), stream->initial_y(), cfg);
  long t = 1;
  for (auto _ : state) {
    if (t > static_cast<long>(pool.size())) {
      state.PauseTiming();
      s = IterateState::initial(stream->initial_x(1), stream->initial_y(), cfg);
      t = 1;
      state.ResumeTiming();
    }
    s = ogd_step(std::move(s), *pool[static_cast<std::size_t>(t - 1)], cfg).state;
    ++t;
  }
}
BENCHMARK(BM_OgdStep);

void BM_OagdStep(benchmark::State& state) {
  const StreamPtr stream = hr_stream(kHorizon);
  OptimizerConfig cfg = hr_optimizer(static_cast<int>(state.range(0)));
  const auto pool = rounds(*stream, 2000);
  IterateState s = IterateState::initial(stream->initial_x(1), stream->initial_y(), cfg);
  OracleWindow past(cfg.k_window - 1);
  long t = 1;
  for (auto _ : state) {
    if (t > static_cast<long>(pool.size())) {
      state.PauseTiming();
      s = IterateState::initial(stream->initial_x(1), stream->initial_y(), cfg);
      past = OracleWindow(cfg.k_window - 1);
      t = 1;
      state.ResumeTiming();
    }
    s = oagd_step(std::move(s), pool[static_cast<std::size_t>(t - 1)], past, cfg).state;
    ++t;
  }
}
BENCHMARK(BM_OagdStep)->Arg(1)->Arg(10)->Arg(50);

}  // namespace

BENCHMARK_MAIN();
