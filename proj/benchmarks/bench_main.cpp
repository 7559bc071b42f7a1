#include <benchmark/benchmark.h>

#include "efq/ef_game.hpp"
#include "efq/oracle.hpp"
#include "efq/size_games.hpp"
#include "efq/types_engine.hpp"
#include "support/fixtures.hpp"

using namespace efq;
using namespace efq::testing;

namespace {

// A pair of random structures over two unary and one binary relation with domain n.
std::pair<StructurePtr, StructurePtr> random_pair(int n, std::uint64_t seed) {
  Gen g(seed);
  auto voc = g.vocabulary(2, 1);
  auto a = g.structure("A", voc, n);
  return {a, g.variant(*a, "B", 1.0)};
}

}  // namespace

static void BM_EvalFig1(benchmark::State& state) {
  Fig1 f;
  const auto phi = parse_formula("exactly=3 x. (B(x) | R(x))", *f.voc, f.q);
  for (auto _ : state) benchmark::DoNotOptimize(eval(Context(f.A), *phi, f.q));
}
BENCHMARK(BM_EvalFig1);

static void BM_HamiltonianPath(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Gen g(5);
  TupleSet edges;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (g.coin(0.3)) edges.push_back({a, b});
  for (auto _ : state) benchmark::DoNotOptimize(has_hamiltonian_path(n, edges));
}
BENCHMARK(BM_HamiltonianPath)->DenseRange(4, 12, 4);

static void BM_EFSolve(benchmark::State& state) {
  const auto [a, b] = random_pair(static_cast<int>(state.range(0)), 11);
  const QuantifierSet q = quantifiers({"exists", "most"});
  for (auto _ : state) benchmark::DoNotOptimize(solve_ef(Context(a), Context(b), 2, q).winner);
}
BENCHMARK(BM_EFSolve)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

static void BM_TypesPartition(benchmark::State& state) {
  const auto [a, b] = random_pair(static_cast<int>(state.range(0)), 13);
  const QuantifierSet q = quantifiers({"exists", "exactly=2"});
  for (auto _ : state)
    benchmark::DoNotOptimize(joint_partition({Context(a), Context(b)}, VarTuple{"x"}, 2, q).cell_count());
}
BENCHMARK(BM_TypesPartition)->DenseRange(2, 5)->Unit(benchmark::kMillisecond);

static void BM_OracleMinSize(benchmark::State& state) {
  Fig1 f;
  const int s = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(min_separating_size(Context(f.A), Context(f.B1), s, f.q).size);
}
BENCHMARK(BM_OracleMinSize)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

static void BM_ClassGame(benchmark::State& state) {
  Fig1 f;
  const int s = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_class_game({Context(f.A)}, {Context(f.B1), Context(f.B2)}, s, f.q).winner);
}
BENCHMARK(BM_ClassGame)->DenseRange(2, 5)->Unit(benchmark::kMillisecond);

static void BM_PairGame(benchmark::State& state) {
  Example2 e;
  const int s = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_pair_game(Context(e.M), Context(e.N), s, e.q).winner);
}
BENCHMARK(BM_PairGame)->DenseRange(1, 4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
