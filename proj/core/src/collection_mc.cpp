#include "ionls/collection_mc.hpp"

#include "ionls/resource_model.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>
#include <thread>

namespace ionls {

namespace {

constexpr std::int64_t kNever = std::numeric_limits<std::int64_t>::max();

std::mt19937_64 trial_engine(std::uint64_t seed, std::int64_t trial) {
  const auto t = static_cast<std::uint64_t>(trial);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(t >> 32)};
  return std::mt19937_64(seq);
}

// Round (1-based) of an ion's first success when pulsed every round.
class FirstSuccess {
 public:
  explicit FirstSuccess(double p) : p_(p), dist_(p > 0.0 && p < 1.0 ? p : 0.5) {}

  std::int64_t operator()(std::mt19937_64& rng) {
    if (p_ <= 0.0) return kNever;
    if (p_ >= 1.0) return 1;
    const auto failures = dist_(rng);
    return failures == std::numeric_limits<std::int64_t>::max() ? kNever : failures + 1;
  }

 private:
  double p_;
  std::geometric_distribution<std::int64_t> dist_;
};

template <class Body>
void parallel_trials(std::int64_t trials, unsigned threads, Body body) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::min<std::int64_t>(trials, 256))));
  if (threads == 1) {
    for (std::int64_t t = 0; t < trials; ++t) body(t);
    return;
  }
  std::vector<std::thread> pool;
  const std::int64_t chunk = (trials + threads - 1) / threads;
  for (unsigned w = 0; w < threads; ++w) {
    const std::int64_t begin = w * chunk;
    const std::int64_t end = std::min(trials, begin + chunk);
    pool.emplace_back([=, &body] {
      for (std::int64_t t = begin; t < end; ++t) body(t);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

void TrialConfig::validate() const {
  if (n_ions < 0) throw std::invalid_argument("n_ions must be non-negative");
  if (!(p_entangle >= 0.0 && p_entangle <= 1.0)) throw std::invalid_argument("p_entangle must lie in [0, 1]");
  if (attempts < 0) throw std::invalid_argument("attempts must be non-negative");
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
}

double CollectionResult::mean() const {
  double sum = 0.0;
  for (auto c : counts) sum += static_cast<double>(c);
  return sum / static_cast<double>(counts.size());
}

double CollectionResult::tail(std::int64_t k) const {
  if (k <= 0) return 1.0;
  if (k >= static_cast<std::int64_t>(histogram.size())) return 0.0;
  std::int64_t hits = 0;
  for (std::size_t i = static_cast<std::size_t>(k); i < histogram.size(); ++i) hits += histogram[i];
  return static_cast<double>(hits) / static_cast<double>(counts.size());
}

CollectionResult simulate_collection(const TrialConfig& config, unsigned threads) {
  config.validate();
  CollectionResult result;
  result.config = config;
  result.counts.assign(static_cast<std::size_t>(config.trials), 0);
  parallel_trials(config.trials, threads, [&](std::int64_t t) {
    auto rng = trial_engine(config.seed, t);
    FirstSuccess first(config.p_entangle);
    std::int64_t entangled = 0;
    for (std::int64_t ion = 0; ion < config.n_ions; ++ion) {
      if (first(rng) <= config.attempts) ++entangled;
    }
    result.counts[static_cast<std::size_t>(t)] = entangled;
  });
  result.histogram.assign(static_cast<std::size_t>(config.n_ions) + 1, 0);
  for (auto c : result.counts) ++result.histogram[static_cast<std::size_t>(c)];
  return result;
}

std::string collection_summary_json(const CollectionResult& result, const std::vector<std::int64_t>& ks,
                                    int indent) {
  nlohmann::ordered_json doc;
  const auto& c = result.config;
  doc["config"] = {{"n_ions", c.n_ions},
                   {"p_entangle", c.p_entangle},
                   {"attempts", c.attempts},
                   {"trials", c.trials},
                   {"seed", c.seed}};
  doc["mean"] = result.mean();
  nlohmann::ordered_json tails = nlohmann::ordered_json::object();
  for (auto k : ks) tails[std::to_string(k)] = result.tail(k);
  doc["tails"] = tails;
  return doc.dump(indent);
}

void write_trials_csv(std::ostream& out, const CollectionResult& result) {
  out << "trial,entangled\n";
  for (std::size_t t = 0; t < result.counts.size(); ++t) out << t << ',' << result.counts[t] << '\n';
}

WilsonInterval wilson_interval(std::int64_t successes, std::int64_t trials, double z) {
  if (trials <= 0) return {};
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (phat + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

EmpiricalAttempts empirical_min_attempts(std::int64_t n_ions, double p_entangle, std::int64_t k_star,
                                         double p_ls, std::int64_t trials, std::uint64_t seed,
                                         unsigned threads) {
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  if (k_star < 1) throw std::invalid_argument("k_star must be at least 1");
  if (!(p_ls > 0.0 && p_ls <= 1.0)) throw std::invalid_argument("p_ls must lie in (0, 1]");
  EmpiricalAttempts out;
  if (k_star > n_ions || p_entangle <= 0.0) return out;

  std::vector<std::int64_t> finish(static_cast<std::size_t>(trials));
  parallel_trials(trials, threads, [&](std::int64_t t) {
    auto rng = trial_engine(seed, t);
    FirstSuccess first(p_entangle);
    std::vector<std::int64_t> rounds(static_cast<std::size_t>(n_ions));
    for (auto& r : rounds) r = first(rng);
    std::nth_element(rounds.begin(), rounds.begin() + (k_star - 1), rounds.end());
    finish[static_cast<std::size_t>(t)] = rounds[static_cast<std::size_t>(k_star - 1)];
  });
  std::sort(finish.begin(), finish.end());

  // Walk distinct finishing rounds; at round finish[i] the trials finished
  // are those up to the last index holding that value.
  bool have_lower = false, have_point = false;
  for (std::size_t i = 0; i < finish.size(); ++i) {
    if (i + 1 < finish.size() && finish[i + 1] == finish[i]) continue;
    const auto a = finish[i];
    const auto done = static_cast<std::int64_t>(i + 1);
    const double freq = static_cast<double>(done) / static_cast<double>(trials);
    const auto ci = wilson_interval(done, trials);
    if (!have_lower && ci.upper >= p_ls) {
      out.lower = a;
      have_lower = true;
    }
    if (!have_point && freq >= p_ls) {
      out.point = a;
      have_point = true;
    }
    if (ci.lower >= p_ls) {
      out.upper = a;
      break;
    }
  }
  out.feasible = have_point;
  return out;
}

std::vector<GridPoint> default_smoke_grid() {
  return {
      {100, 2.18e-4, 1000}, {100, 2.18e-4, 100},  {1000, 2.18e-4, 1000},
      {45, 2.18e-4, 50000}, {200, 1.0e-3, 1000},  {500, 1.0e-2, 100},
      {1000, 1.5e-3, 1000}, {50, 0.5, 2},         {10, 0.1, 10},
  };
}

std::vector<std::int64_t> probe_ks(const GridPoint& point) {
  const double p = p_onepair(point.p_entangle, point.attempts);
  const double n = static_cast<double>(point.n_ions);
  const double mu = n * p;
  const double sigma = std::sqrt(n * p * (1.0 - p));
  std::vector<std::int64_t> ks;
  for (double x : {mu - sigma, mu, mu + sigma}) {
    const auto k = std::clamp<std::int64_t>(std::llround(x), 0, point.n_ions);
    if (ks.empty() || ks.back() != k) ks.push_back(k);
  }
  return ks;
}

std::vector<TailCheck> cross_check(const std::vector<GridPoint>& grid, std::int64_t trials,
                                   std::uint64_t seed, double sigmas, unsigned threads) {
  std::vector<TailCheck> checks;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& pt = grid[i];
    const auto mc = simulate_collection({pt.n_ions, pt.p_entangle, pt.attempts, trials, seed + i}, threads);
    const double p1 = p_onepair(pt.p_entangle, pt.attempts);
    for (auto k : probe_ks(pt)) {
      TailCheck c;
      c.point = pt;
      c.k = k;
      c.analytic = binomial_tail_geq(pt.n_ions, p1, k);
      c.empirical = mc.tail(k);
      c.standard_error = std::sqrt(c.analytic * (1.0 - c.analytic) / static_cast<double>(trials));
      c.pass = std::abs(c.empirical - c.analytic) <= sigmas * c.standard_error + 1e-12;
      checks.push_back(c);
    }
  }
  return checks;
}

}  // namespace ionls
