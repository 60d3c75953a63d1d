#include "ionls/ga_search.hpp"
#include "ionls/purification.hpp"
#include "ionls/resource_model.hpp"

#include <benchmark/benchmark.h>

#include <string>

using namespace ionls;

namespace {

const std::string kRoot = IONLS_SOURCE_DIR;

void BM_SimulateFixture(benchmark::State& state) {
  const auto circuit = load_circuit(kRoot + "/circuits/ga_3to1.json");
  const auto input = stephenson_pair(true);
  const auto noise = NoiseModel::paper();
  for (auto _ : state) benchmark::DoNotOptimize(simulate(circuit, input, noise));
}
BENCHMARK(BM_SimulateFixture)->Unit(benchmark::kMicrosecond);

// Shipped candidates on Stephenson pairs; the dense engine scales as 4^(2n).
void BM_SimulateCandidate(benchmark::State& state) {
  const auto circuit = load_circuit(kRoot + "/circuits/candidates/n" + std::to_string(state.range(0)) + ".json");
  const auto input = stephenson_pair(true);
  const auto noise = NoiseModel::paper();
  for (auto _ : state) benchmark::DoNotOptimize(simulate(circuit, input, noise));
}
BENCHMARK(BM_SimulateCandidate)->DenseRange(3, 5)->Unit(benchmark::kMillisecond);

void BM_SimulateBellFrame(benchmark::State& state) {
  const auto circuit = load_circuit(kRoot + "/circuits/candidates/n5.json");
  const auto input = to_density_matrix(BellDiagonalState::werner(0.94));
  const auto noise = NoiseModel::paper();
  for (auto _ : state) benchmark::DoNotOptimize(simulate(circuit, input, noise, Engine::bell_diagonal));
}
BENCHMARK(BM_SimulateBellFrame)->Unit(benchmark::kMicrosecond);

void BM_MinIonsGrid(benchmark::State& state) {
  const auto dev = DeviceParams::paper();
  for (auto _ : state) {
    for (int d = 3; d <= 9; ++d) {
      for (double t : {1e-3, 1e-4, 1e-5}) benchmark::DoNotOptimize(min_ions({d, t, false}, dev));
    }
  }
}
BENCHMARK(BM_MinIonsGrid)->Unit(benchmark::kMillisecond);

void BM_BinomialTail(benchmark::State& state) {
  const auto n = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(binomial_tail_geq(n, 0.196, static_cast<std::int64_t>(0.15 * n)));
}
BENCHMARK(BM_BinomialTail)->RangeMultiplier(100)->Range(10, 1000000);

}  // namespace

BENCHMARK_MAIN();
