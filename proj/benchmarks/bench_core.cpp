#include <benchmark/benchmark.h>

#include "memlb/encoding.hpp"
#include "memlb/game.hpp"
#include "memlb/instance.hpp"
#include "memlb/optimizer.hpp"
#include "memlb/oracle.hpp"
#include "memlb/rng.hpp"

namespace {

using namespace memlb;

HardInstance bench_instance(int d) {
  return sample_instance(derive_params(d, 0.5, Profile::DeskScale), 7);
}

void BM_Oracle(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const HardInstance inst = bench_instance(d);
  Rng rng(11);
  const Vector x = sample_unit_ball(d, rng);
  for (auto _ : state) benchmark::DoNotOptimize(first_order(inst, x));
  state.SetComplexityN(d);
}
BENCHMARK(BM_Oracle)->RangeMultiplier(2)->Range(16, 512)->Complexity();

// One full round: query, oracle call, state update and size check.
void BM_RunRound(benchmark::State& state, bool ellipsoid) {
  const int d = static_cast<int>(state.range(0));
  const HardInstance inst = bench_instance(d);
  const AlgorithmPtr alg = ellipsoid ? ellipsoid_method(d)
                                     : subgradient_descent(d, StepRule::fixed(0.01));
  constexpr std::size_t kRounds = 64;
  for (auto _ : state) benchmark::DoNotOptimize(run(*alg, inst, kRounds, 1));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * kRounds));
}
BENCHMARK_CAPTURE(BM_RunRound, ellipsoid, true)->RangeMultiplier(2)->Range(16, 128);
BENCHMARK_CAPTURE(BM_RunRound, subgradient, false)->RangeMultiplier(2)->Range(16, 128);

void BM_EvalF(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const HardInstance inst = bench_instance(d);
  Rng rng(3);
  const Vector x = sample_unit_ball(d, rng);
  for (auto _ : state) benchmark::DoNotOptimize(eval_f(inst, x));
}
BENCHMARK(BM_EvalF)->RangeMultiplier(4)->Range(16, 1024);

void BM_EncodeMicro(benchmark::State& state) {
  MicroConfig cfg;
  cfg.s_rows = 3;
  cfg.seed = 8;
  const GameParams gp{cfg.d, cfg.k, cfg.n, 1.0, 0.0};
  Rng rng(derive_seed(cfg.seed, stream::kPublic, 0));
  Vector shift(cfg.d);
  for (int i = 0; i < cfg.d; ++i) shift[i] = rng.gaussian();
  const ProtocolPtr proto = normalize_output(protocols::row_sketch(gp, shift), gp);
  for (auto _ : state) benchmark::DoNotOptimize(encode_micro(*proto, cfg));
}
BENCHMARK(BM_EncodeMicro)->Unit(benchmark::kMillisecond);

}  // namespace

// The packaged benchmark_main archive is LTO bytecode from another compiler.
BENCHMARK_MAIN();
