#pragma once

// Genetic search over n -> 1 purification circuits. Genes are bilateral: a
// two-pair gate acts on both sides, a Clifford U on side A is paired with
// conj(U) on side B, and a measurement reads both halves of one pair in the
// same basis and adds an accept constraint on the two labels.

#include "ionls/purification.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

namespace ionls {

enum class Objective {
  fidelity,  // output fidelity, 0 below the success floor
  yield,     // 1 + p once F >= target_fidelity, F below it
};

std::string to_string(Objective objective);
Objective parse_objective(const std::string& text);

struct GaConfig {
  int population_size = 100;
  int generations = 150;
  int n_pairs = 3;
  std::uint64_t seed = 1;
  double mutation_rate = 0.1;
  double crossover_rate = 0.7;
  int max_ops = 16;  // genome capacity in bilateral genes
  double elite_fraction = 0.1;
  double success_floor = 0.01;
  Objective objective = Objective::fidelity;
  double target_fidelity = 0.99;
  unsigned threads = 1;

  void validate() const;
};

struct SearchInput {
  enum class Kind { bell_diagonal, stephenson };
  Kind kind = Kind::bell_diagonal;
  BellDiagonalState bell = BellDiagonalState::werner(0.94);

  static SearchInput werner(double f) { return {Kind::bell_diagonal, BellDiagonalState::werner(f)}; }
  static SearchInput stephenson() { return {Kind::stephenson, {}}; }
  DensityMatrix state() const;
};

struct Gene {
  enum class Type : std::uint8_t { noop, gate, clifford, measure };
  Type type = Type::noop;
  TwoQubitKind gate = TwoQubitKind::CNOT;
  int first = 0;   // control pair, Clifford pair, or measured pair
  int second = 0;  // target pair
  int clifford_index = 0;
  PauliBasis basis = PauliBasis::Z;
  Relation relation = Relation::coincident;
  friend bool operator==(const Gene&, const Gene&) = default;
};

using Genome = std::vector<Gene>;

/// Decodes a genome into a valid circuit. Genes that would break a circuit
/// invariant (acting on a measured pair, measuring pair 0, out-of-range
/// pairs) are dropped.
PurificationCircuit decode(const Genome& genome, int n_pairs);

Genome random_genome(std::mt19937_64& rng, int n_pairs, int max_ops);
Genome mutate(const Genome& genome, std::mt19937_64& rng, int n_pairs, double rate);
Genome crossover(const Genome& a, const Genome& b, std::mt19937_64& rng);

double fitness(const ProtocolOutcome& outcome, const GaConfig& config);
double fitness(const PurificationCircuit& circuit, const DensityMatrix& input, const NoiseModel& noise,
               const GaConfig& config = {});

struct RankedCircuit {
  PurificationCircuit circuit;
  double fitness = 0.0;
  ProtocolOutcome outcome;
};

struct SearchResult {
  std::vector<RankedCircuit> ranked;       // final population, best first
  std::vector<double> best_per_generation;  // entry 0 is the initial population
};

SearchResult search(const GaConfig& config, const SearchInput& input, const NoiseModel& noise);

struct BenchmarkRow {
  int n_pairs = 0;
  double success_probability = 0.0;
  double output_fidelity = 0.0;
  std::string circuit_path;
};

struct Candidate {
  std::string path;
  PurificationCircuit circuit;
};

/// Re-simulates every candidate on rotated Stephenson pairs.
std::vector<BenchmarkRow> benchmark_sweep(const std::vector<Candidate>& candidates, const NoiseModel& noise);

/// Every *.json circuit below `dir`, sorted by path.
std::vector<Candidate> load_candidates(const std::filesystem::path& dir);

/// n_pairs,success_probability,output_fidelity,circuit_path
void write_benchmark_csv(std::ostream& out, const std::vector<BenchmarkRow>& rows);

}  // namespace ionls
