#pragma once

// Monte Carlo model of entanglement collection: every vacant ion is pulsed
// once per round, succeeds with probability p_entangle, and stops being
// pulsed after its first success.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ionls {

struct TrialConfig {
  std::int64_t n_ions = 100;
  double p_entangle = 2.18e-4;
  std::int64_t attempts = 1000;
  std::int64_t trials = 100000;
  std::uint64_t seed = 1;

  void validate() const;
};

struct CollectionResult {
  TrialConfig config;
  std::vector<std::int64_t> counts;     // entangled ions per trial
  std::vector<std::int64_t> histogram;  // size n_ions + 1

  double mean() const;
  /// Empirical P(X >= k).
  double tail(std::int64_t k) const;
};

/// Per-trial RNG streams are derived from (seed, trial index), so the result
/// does not depend on `threads`.
CollectionResult simulate_collection(const TrialConfig& config, unsigned threads = 1);

/// {"config": {...}, "mean": m, "tails": {"k": P(X >= k), ...}}
std::string collection_summary_json(const CollectionResult& result, const std::vector<std::int64_t>& ks,
                                    int indent = 2);
/// trial,entangled
void write_trials_csv(std::ostream& out, const CollectionResult& result);

struct WilsonInterval {
  double lower = 0.0;
  double upper = 1.0;
};

/// Score interval for a binomial proportion; z = 2.576 gives 99% coverage.
WilsonInterval wilson_interval(std::int64_t successes, std::int64_t trials, double z = 2.576);

struct EmpiricalAttempts {
  bool feasible = false;
  std::int64_t point = 0;  // smallest A whose success frequency reaches p_ls
  std::int64_t lower = 0;  // smallest A whose Wilson upper bound reaches p_ls
  std::int64_t upper = 0;  // smallest A whose Wilson lower bound reaches p_ls; 0 if never
};

/// Each trial records the round at which its k_star-th ion entangles; the
/// success frequency at A is the fraction of trials finished by round A.
EmpiricalAttempts empirical_min_attempts(std::int64_t n_ions, double p_entangle, std::int64_t k_star,
                                         double p_ls, std::int64_t trials, std::uint64_t seed,
                                         unsigned threads = 1);

struct GridPoint {
  std::int64_t n_ions = 0;
  double p_entangle = 0.0;
  std::int64_t attempts = 0;
};

struct TailCheck {
  GridPoint point;
  std::int64_t k = 0;
  double analytic = 0.0;
  double empirical = 0.0;
  double standard_error = 0.0;
  bool pass = false;
};

/// The nine-point grid used by `ionls validate` when no point is given.
std::vector<GridPoint> default_smoke_grid();

/// Ks compared per point: the analytic mean and one binomial standard
/// deviation either side, clamped to [0, n_ions].
std::vector<std::int64_t> probe_ks(const GridPoint& point);

/// Compares empirical tails against binomial_tail_geq within `sigmas`
/// standard errors of the analytic proportion. Each point uses seed + index.
std::vector<TailCheck> cross_check(const std::vector<GridPoint>& grid, std::int64_t trials,
                                   std::uint64_t seed, double sigmas = 3.0, unsigned threads = 1);

}  // namespace ionls
