#pragma once

// Communication-ion budget for pipelined lattice surgery between two trapped-ion
// modules: K parallel n -> 1 purification circuits per stitch, d stitches per
// surgery, and a binomial model for how many ion pairs entangle within one
// syndrome cycle.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ionls {

struct DeviceParams {
  double pulse_rate_hz = 1.0e6;      // R
  double p_entangle = 2.18e-4;       // p_c, per pulse attempt
  double p_purify = 0.819;           // p, purification success probability
  int pairs_per_circuit = 3;         // N_p
  double p_pair_confidence = 0.999;  // P_pair
  double p_ls_confidence = 0.999;    // P_LS
  double f_ideal = 0.99;

  static DeviceParams paper() { return {}; }
  void validate() const;
  friend bool operator==(const DeviceParams&, const DeviceParams&) = default;
};

/// JSON keys: R, p_c, p, N_p, P_pair, P_LS, F_ideal. Missing keys keep the
/// defaults of DeviceParams::paper().
DeviceParams device_from_json(const std::string& text);
std::string device_to_json(const DeviceParams& device, int indent = 2);
DeviceParams load_device(const std::filesystem::path& path);

class InfeasibleError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Smallest K with 1 - (1 - p)^K >= P_pair.
std::int64_t multiplexing_k(double p_purify, double p_pair_confidence);

/// N_LS = d * N_p * K.
std::int64_t pairs_required(std::int64_t distance, std::int64_t pairs_per_circuit, std::int64_t k_multiplex);

/// 1 - (1 - p_e)^attempts.
double p_onepair(double p_entangle, std::int64_t attempts);

/// P(X >= k) for X ~ Binomial(n, p).
double binomial_tail_geq(std::int64_t n, double p, std::int64_t k);

/// floor(T * R) with a relative guard so exact products like 1e-3 * 1e6 are
/// not lost to rounding.
std::int64_t attempts_budget(double cycle_time_s, double pulse_rate_hz);

struct EstimateResult {
  std::int64_t k_multiplex = 0;
  std::int64_t n_ls = 0;
  std::int64_t threshold = 0;        // k*, N_LS or N_LS + 1 in paper-compatible mode
  std::int64_t attempts_budget = 0;  // A
  std::int64_t answer = 0;           // min ions, or min attempts; 0 when infeasible
  double rate_hz = 0.0;
  bool feasible = false;
};

struct MinIonsQuery {
  std::int64_t distance = 3;
  double cycle_time_s = 1e-3;
  bool paper_compat = false;
};

struct RateQuery {
  std::int64_t distance = 3;
  std::int64_t n_ions = 100;
  bool paper_compat = false;
};

/// k* used by both solvers.
std::int64_t collection_threshold(std::int64_t n_ls, bool paper_compat);

EstimateResult min_ions(const MinIonsQuery& query, const DeviceParams& device);
EstimateResult min_attempts(const RateQuery& query, const DeviceParams& device);
EstimateResult max_rate(const RateQuery& query, const DeviceParams& device);

struct SweepRow {
  std::int64_t distance = 0;
  double cycle_time_s = 0.0;
  double p_entangle = 0.0;
  std::int64_t min_ions = 0;
  bool feasible = false;
};

std::vector<double> log_spaced(double from, double to, int points);

std::vector<SweepRow> sweep_coupling(const std::vector<std::int64_t>& distances,
                                     const std::vector<double>& cycle_times_s,
                                     const std::vector<double>& p_entangle_grid,
                                     const DeviceParams& device, bool paper_compat);

/// Smallest coupling probability for which min_ions <= ion_budget, found by
/// bisection in log space (min_ions is non-increasing in p_c). nullopt when
/// even p_c = 1 needs more ions.
std::optional<double> required_coupling(std::int64_t distance, double cycle_time_s,
                                        std::int64_t ion_budget, const DeviceParams& device,
                                        bool paper_compat, double relative_tolerance = 1e-6);

/// Smallest coupling probability at which min_ions reaches its p_c = 1
/// plateau value k*.
double plateau_onset(std::int64_t distance, double cycle_time_s, const DeviceParams& device,
                     bool paper_compat, double relative_tolerance = 1e-6);

// CSV tables. Column layouts are documented in docs/formats.md.
void write_min_ions_csv(std::ostream& out, const std::vector<std::pair<MinIonsQuery, EstimateResult>>& rows);
void write_rate_csv(std::ostream& out, const std::vector<std::pair<RateQuery, EstimateResult>>& rows);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace ionls
