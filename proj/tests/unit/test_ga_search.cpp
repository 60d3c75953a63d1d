#include "ionls/ga_search.hpp"

#include <doctest.h>

#include <filesystem>
#include <random>
#include <sstream>

using namespace ionls;

namespace {

const std::string kRoot = IONLS_SOURCE_DIR;

GaConfig small_config(int n, std::uint64_t seed) {
  GaConfig c;
  c.n_pairs = n;
  c.population_size = 20;
  c.generations = 15;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("fitness examples") {
  PurificationCircuit empty;
  empty.n_pairs = 3;
  const auto werner = to_density_matrix(BellDiagonalState::werner(0.94));
  CHECK(fitness(empty, werner, NoiseModel::paper()) == doctest::Approx(0.94));

  PurificationCircuit impossible;
  impossible.n_pairs = 2;
  impossible.ops = {MeasureOp{1, Side::A, PauliBasis::Z, "c1"}, MeasureOp{1, Side::B, PauliBasis::Z, "c3"}};
  impossible.accept = {{"c1", "c3", Relation::coincident}, {"c1", "c3", Relation::anticoincident}};
  CHECK(fitness(impossible, werner, NoiseModel::paper()) == 0.0);

  ProtocolOutcome rare;
  rare.success_probability = 0.005;
  rare.output_fidelity = 0.999;
  CHECK(fitness(rare, GaConfig{}) == 0.0);

  ProtocolOutcome good;
  good.success_probability = 0.8;
  good.output_fidelity = 0.995;
  GaConfig yield;
  yield.objective = Objective::yield;
  CHECK(fitness(good, yield) == doctest::Approx(1.8));
  good.output_fidelity = 0.98;
  CHECK(fitness(good, yield) == doctest::Approx(0.98));
}

TEST_CASE("fixture fitness on Stephenson pairs") {
  const auto c = load_circuit(kRoot + "/circuits/ga_3to1.json");
  const double f = fitness(c, stephenson_pair(true), NoiseModel::paper());
  CHECK(std::abs(f - 0.9904) <= 1e-3);
}

TEST_CASE("genetic operators always decode to valid circuits") {
  std::mt19937_64 rng(5);
  for (int n = 2; n <= 5; ++n) {
    Genome a = random_genome(rng, n, 12);
    Genome b = random_genome(rng, n, 12);
    for (int t = 0; t < 200; ++t) {
      Genome child = crossover(a, b, rng);
      child = mutate(child, rng, n, 0.3);
      CHECK(child.size() == 12);
      CHECK_NOTHROW(validate(decode(child, n)));
      a = std::move(b);
      b = std::move(child);
    }
  }
}

TEST_CASE("decode drops genes that would break invariants") {
  Genome g(4);
  g[0] = {Gene::Type::measure, TwoQubitKind::CNOT, 1, 0, 0, PauliBasis::X, Relation::coincident};
  g[1] = {Gene::Type::gate, TwoQubitKind::CNOT, 0, 1, 0, PauliBasis::Z, Relation::coincident};  // pair 1 is gone
  g[2] = {Gene::Type::measure, TwoQubitKind::CNOT, 0, 0, 0, PauliBasis::Z, Relation::coincident};  // output pair
  g[3] = {Gene::Type::clifford, TwoQubitKind::CNOT, 0, 0, 5, PauliBasis::Z, Relation::coincident};
  const auto c = decode(g, 2);
  CHECK(c.ops.size() == 4);
  REQUIRE(c.accept.size() == 1);
  CHECK(c.accept[0].first == "c1");
  CHECK(c.accept[0].second == "c3");
}

TEST_CASE("tiny search returns a sorted population") {
  GaConfig c = small_config(3, 42);
  c.population_size = 2;
  c.generations = 1;
  const auto r = search(c, SearchInput::werner(0.94), NoiseModel::paper());
  REQUIRE(r.ranked.size() == 2);
  CHECK(r.ranked[0].fitness >= r.ranked[1].fitness);
  CHECK(r.best_per_generation.size() == 2);
}

TEST_CASE("search is reproducible and elitist") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto cfg = small_config(3, seed);
    const auto a = search(cfg, SearchInput::werner(0.94), NoiseModel::paper());
    const auto b = search(cfg, SearchInput::werner(0.94), NoiseModel::paper());
    REQUIRE(a.ranked.size() == b.ranked.size());
    for (std::size_t i = 0; i < a.ranked.size(); ++i) {
      CHECK(a.ranked[i].circuit == b.ranked[i].circuit);
      CHECK(a.ranked[i].fitness == b.ranked[i].fitness);
    }
    CHECK(a.best_per_generation == b.best_per_generation);
    for (std::size_t g = 1; g < a.best_per_generation.size(); ++g) {
      CHECK(a.best_per_generation[g] >= a.best_per_generation[g - 1]);
    }
    for (std::size_t i = 0; i < a.ranked.size(); ++i) {
      if (i > 0) CHECK(a.ranked[i - 1].fitness >= a.ranked[i].fitness);
      const auto& rc = a.ranked[i];
      CHECK_NOTHROW(validate(rc.circuit));
      const auto again = simulate(rc.circuit, to_density_matrix(BellDiagonalState::werner(0.94)), NoiseModel::paper());
      CHECK(std::abs(again.output_fidelity - rc.outcome.output_fidelity) < 1e-12);
      CHECK(std::abs(again.success_probability - rc.outcome.success_probability) < 1e-12);
    }
  }
}

TEST_CASE("threaded evaluation does not change the result") {
  auto cfg = small_config(4, 9);
  const auto a = search(cfg, SearchInput::werner(0.94), NoiseModel::paper());
  cfg.threads = 3;
  const auto b = search(cfg, SearchInput::werner(0.94), NoiseModel::paper());
  CHECK(a.best_per_generation == b.best_per_generation);
  CHECK(a.ranked.front().circuit == b.ranked.front().circuit);
}

TEST_CASE("config validation") {
  GaConfig c;
  c.population_size = 1;
  CHECK_THROWS(c.validate());
  c = GaConfig{};
  c.mutation_rate = 1.5;
  CHECK_THROWS(c.validate());
  c = GaConfig{};
  c.n_pairs = 6;
  CHECK_THROWS(c.validate());
  CHECK_THROWS(parse_objective("speed"));
}

TEST_CASE("benchmark sweep") {
  PurificationCircuit empty;
  empty.n_pairs = 4;
  const auto rows = benchmark_sweep({{"empty", empty}}, NoiseModel::paper());
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].n_pairs == 4);
  CHECK(rows[0].success_probability == doctest::Approx(1.0));
  CHECK(std::abs(rows[0].output_fidelity - 0.9332) < 1e-4);

  const auto fixture = load_circuit(kRoot + "/circuits/ga_3to1.json");
  const auto f = benchmark_sweep({{"ga_3to1", fixture}}, NoiseModel::paper());
  CHECK(f[0].n_pairs == 3);
  CHECK(std::abs(f[0].success_probability - 0.819) <= 5e-3);
  CHECK(std::abs(f[0].output_fidelity - 0.9904) <= 1e-3);

  std::ostringstream csv;
  write_benchmark_csv(csv, f);
  CHECK(csv.str().rfind("n_pairs,success_probability,output_fidelity,circuit_path\n3,", 0) == 0);
}

TEST_CASE("shipped candidates lose yield as pairs are added") {
  const auto rows = benchmark_sweep(load_candidates(kRoot + "/circuits/candidates"), NoiseModel::paper());
  double mean[6] = {};
  int count[6] = {};
  for (const auto& r : rows) {
    mean[r.n_pairs] += r.success_probability;
    ++count[r.n_pairs];
  }
  for (int n = 3; n <= 5; ++n) {
    REQUIRE(count[n] > 0);
    mean[n] /= count[n];
  }
  CHECK(mean[3] >= mean[4]);
  CHECK(mean[4] >= mean[5]);
}
