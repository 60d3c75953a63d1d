#include "ionls/ga_search.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <ostream>
#include <thread>

namespace ionls {

namespace {

int draw(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

bool coin(std::mt19937_64& rng, double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p; }

std::string label_for(int n_pairs, int pair, Side side) { return "c" + std::to_string(qubit_index(n_pairs, pair, side)); }

Gene random_gene(std::mt19937_64& rng, int n_pairs) {
  Gene g;
  g.type = static_cast<Gene::Type>(draw(rng, 0, 3));
  switch (g.type) {
    case Gene::Type::noop:
      break;
    case Gene::Type::gate:
      g.gate = draw(rng, 0, 1) ? TwoQubitKind::CZ : TwoQubitKind::CNOT;
      g.first = draw(rng, 0, n_pairs - 1);
      g.second = (g.first + draw(rng, 1, n_pairs - 1)) % n_pairs;
      break;
    case Gene::Type::clifford:
      g.first = draw(rng, 0, n_pairs - 1);
      g.clifford_index = draw(rng, 1, 23);
      break;
    case Gene::Type::measure:
      g.first = draw(rng, 1, n_pairs - 1);
      g.basis = static_cast<PauliBasis>(draw(rng, 0, 2));
      g.relation = draw(rng, 0, 1) ? Relation::anticoincident : Relation::coincident;
      break;
  }
  return g;
}

std::vector<DensityMatrix> stephenson_inputs(int n_pairs) {
  return std::vector<DensityMatrix>(static_cast<std::size_t>(n_pairs), stephenson_pair(true));
}

}  // namespace

std::string to_string(Objective objective) { return objective == Objective::fidelity ? "fidelity" : "yield"; }

Objective parse_objective(const std::string& text) {
  if (text == "fidelity") return Objective::fidelity;
  if (text == "yield") return Objective::yield;
  throw std::invalid_argument("objective must be \"fidelity\" or \"yield\", got \"" + text + "\"");
}

void GaConfig::validate() const {
  if (population_size < 2) throw std::invalid_argument("population_size must be at least 2");
  if (generations < 0) throw std::invalid_argument("generations must be non-negative");
  if (n_pairs < PurificationCircuit::kMinPairs || n_pairs > PurificationCircuit::kMaxPairs) {
    throw std::invalid_argument("n_pairs must lie in [2, 5]");
  }
  for (double r : {mutation_rate, crossover_rate, elite_fraction, success_floor}) {
    if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("GA rates and fractions must lie in [0, 1]");
  }
  if (max_ops < 1) throw std::invalid_argument("max_ops must be at least 1");
}

DensityMatrix SearchInput::state() const {
  return kind == Kind::stephenson ? stephenson_pair(true) : to_density_matrix(bell);
}

PurificationCircuit decode(const Genome& genome, int n_pairs) {
  PurificationCircuit c;
  c.n_pairs = n_pairs;
  std::vector<bool> measured(static_cast<std::size_t>(n_pairs), false);
  auto live = [&](int pair) { return pair >= 0 && pair < n_pairs && !measured[pair]; };
  for (const auto& g : genome) {
    switch (g.type) {
      case Gene::Type::noop:
        break;
      case Gene::Type::gate:
        if (g.first == g.second || !live(g.first) || !live(g.second)) break;
        for (Side s : {Side::A, Side::B}) c.ops.emplace_back(TwoQubitGateOp{g.gate, s, g.first, g.second});
        break;
      case Gene::Type::clifford:
        if (!live(g.first) || g.clifford_index < 0 || g.clifford_index > 23) break;
        c.ops.emplace_back(CliffordOp{g.first, Side::A, g.clifford_index});
        c.ops.emplace_back(CliffordOp{g.first, Side::B, clifford_conjugate(g.clifford_index)});
        break;
      case Gene::Type::measure: {
        if (g.first == PurificationCircuit::kOutputPair || !live(g.first)) break;
        const auto la = label_for(n_pairs, g.first, Side::A);
        const auto lb = label_for(n_pairs, g.first, Side::B);
        c.ops.emplace_back(MeasureOp{g.first, Side::A, g.basis, la});
        c.ops.emplace_back(MeasureOp{g.first, Side::B, g.basis, lb});
        c.accept.push_back({la, lb, g.relation});
        measured[g.first] = true;
        break;
      }
    }
  }
  return c;
}

Genome random_genome(std::mt19937_64& rng, int n_pairs, int max_ops) {
  Genome g(static_cast<std::size_t>(max_ops));
  for (auto& gene : g) gene = random_gene(rng, n_pairs);
  return g;
}

Genome mutate(const Genome& genome, std::mt19937_64& rng, int n_pairs, double rate) {
  Genome g = genome;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!coin(rng, rate)) continue;
    switch (draw(rng, 0, 3)) {
      case 0:  // insert, dropping the last gene
        g.insert(g.begin() + static_cast<std::ptrdiff_t>(i), random_gene(rng, n_pairs));
        g.pop_back();
        break;
      case 1:  // delete, padding with a no-op
        g.erase(g.begin() + static_cast<std::ptrdiff_t>(i));
        g.push_back(Gene{});
        break;
      case 2:
        g[i] = random_gene(rng, n_pairs);
        break;
      default:
        if (g[i].type == Gene::Type::measure) {
          g[i].relation = g[i].relation == Relation::coincident ? Relation::anticoincident : Relation::coincident;
        } else {
          g[i] = random_gene(rng, n_pairs);
        }
    }
  }
  return g;
}

Genome crossover(const Genome& a, const Genome& b, std::mt19937_64& rng) {
  const auto cut = static_cast<std::size_t>(draw(rng, 0, static_cast<int>(a.size())));
  Genome child(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(cut));
  child.insert(child.end(), b.begin() + static_cast<std::ptrdiff_t>(cut), b.end());
  return child;
}

double fitness(const ProtocolOutcome& outcome, const GaConfig& config) {
  if (!(outcome.success_probability >= config.success_floor) || outcome.success_probability <= 0.0) return 0.0;
  if (config.objective == Objective::yield && outcome.output_fidelity >= config.target_fidelity) {
    return 1.0 + outcome.success_probability;
  }
  return outcome.output_fidelity;
}

double fitness(const PurificationCircuit& circuit, const DensityMatrix& input, const NoiseModel& noise,
               const GaConfig& config) {
  return fitness(simulate(circuit, input, noise), config);
}

SearchResult search(const GaConfig& config, const SearchInput& input, const NoiseModel& noise) {
  config.validate();
  noise.validate();
  const DensityMatrix state = input.state();
  const std::size_t pop = static_cast<std::size_t>(config.population_size);
  std::mt19937_64 rng(config.seed);

  // Fitness is a pure function of the decoded circuit, so results are cached
  // by canonical JSON. Evaluation order cannot change any value.
  std::map<std::string, RankedCircuit> cache;
  std::mutex cache_mutex;

  struct Individual {
    Genome genome;
    std::string key;
    double fitness = 0.0;
  };

  auto evaluate = [&](std::vector<Individual>& people) {
    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < people.size(); ++i) {
      people[i].key = circuit_to_json(decode(people[i].genome, config.n_pairs), -1);
      if (!cache.count(people[i].key)) {
        cache.emplace(people[i].key, RankedCircuit{decode(people[i].genome, config.n_pairs), 0.0, {}});
        todo.push_back(i);
      }
    }
    auto work = [&](std::size_t begin, std::size_t end) {
      for (std::size_t j = begin; j < end; ++j) {
        RankedCircuit* slot;
        {
          std::lock_guard lock(cache_mutex);
          slot = &cache.at(people[todo[j]].key);
        }
        slot->outcome = simulate(slot->circuit, state, noise);
        slot->fitness = fitness(slot->outcome, config);
      }
    };
    const unsigned threads = std::max(1u, std::min<unsigned>(config.threads, static_cast<unsigned>(todo.size())));
    if (threads <= 1) {
      work(0, todo.size());
    } else {
      std::vector<std::thread> pool;
      const std::size_t chunk = (todo.size() + threads - 1) / threads;
      for (unsigned w = 0; w < threads; ++w) {
        const std::size_t b = std::min(todo.size(), w * chunk);
        pool.emplace_back(work, b, std::min(todo.size(), b + chunk));
      }
      for (auto& t : pool) t.join();
    }
    for (auto& p : people) p.fitness = cache.at(p.key).fitness;
    std::stable_sort(people.begin(), people.end(),
                     [](const Individual& a, const Individual& b) { return a.fitness > b.fitness; });
  };

  std::vector<Individual> people(pop);
  for (auto& p : people) p.genome = random_genome(rng, config.n_pairs, config.max_ops);
  evaluate(people);

  SearchResult result;
  result.best_per_generation.push_back(people.front().fitness);

  const std::size_t elite =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(config.elite_fraction * static_cast<double>(pop))), 1, pop);
  auto tournament = [&]() -> const Individual& {
    std::size_t best = static_cast<std::size_t>(draw(rng, 0, static_cast<int>(pop) - 1));
    for (int r = 0; r < 2; ++r) best = std::min(best, static_cast<std::size_t>(draw(rng, 0, static_cast<int>(pop) - 1)));
    return people[best];  // people is sorted, so the lowest index wins
  };

  for (int gen = 0; gen < config.generations; ++gen) {
    std::vector<Individual> next(people.begin(), people.begin() + static_cast<std::ptrdiff_t>(elite));
    while (next.size() < pop) {
      const Individual& a = tournament();
      const Individual& b = tournament();
      Genome child = coin(rng, config.crossover_rate) ? crossover(a.genome, b.genome, rng) : a.genome;
      next.push_back({mutate(child, rng, config.n_pairs, config.mutation_rate), {}, 0.0});
    }
    people = std::move(next);
    evaluate(people);
    result.best_per_generation.push_back(people.front().fitness);
  }

  result.ranked.reserve(pop);
  for (const auto& p : people) result.ranked.push_back(cache.at(p.key));
  return result;
}

std::vector<BenchmarkRow> benchmark_sweep(const std::vector<Candidate>& candidates, const NoiseModel& noise) {
  std::vector<BenchmarkRow> rows;
  rows.reserve(candidates.size());
  for (const auto& c : candidates) {
    const auto inputs = stephenson_inputs(c.circuit.n_pairs);
    const auto outcome = simulate(c.circuit, inputs, noise);
    rows.push_back({c.circuit.n_pairs, outcome.success_probability, outcome.output_fidelity, c.path});
  }
  return rows;
}

std::vector<Candidate> load_candidates(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> paths;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") paths.push_back(entry.path());
  }
  std::sort(paths.begin(), paths.end());
  std::vector<Candidate> out;
  for (const auto& p : paths) out.push_back({p.string(), load_circuit(p)});
  return out;
}

void write_benchmark_csv(std::ostream& out, const std::vector<BenchmarkRow>& rows) {
  out << "n_pairs,success_probability,output_fidelity,circuit_path\n";
  char buf[96];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%d,%.6f,%.6f,", r.n_pairs, r.success_probability, r.output_fidelity);
    out << buf << r.circuit_path << '\n';
  }
}

}  // namespace ionls
