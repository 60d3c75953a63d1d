#include "ionls/resource_model.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

namespace ionls {

namespace {

constexpr std::int64_t kSearchCap = std::int64_t{1} << 60;

bool in_unit_interval_open_left(double p) { return p > 0.0 && p <= 1.0; }

// Smallest x in [lo, cap] with pred(x), assuming pred is monotone and pred(lo)
// is false. Doubles the step, then bisects. nullopt when pred(cap) is false.
template <class Pred>
std::optional<std::int64_t> first_true(std::int64_t lo, Pred pred) {
  std::int64_t step = std::max<std::int64_t>(1, lo);
  std::int64_t hi = lo + step;
  while (!pred(hi)) {
    if (hi >= kSearchCap) return std::nullopt;
    lo = hi;
    step *= 2;
    hi = std::min(kSearchCap, lo + step);
  }
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    (pred(mid) ? hi : lo) = mid;
  }
  return hi;
}

std::string format(const char* fmt, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, value);
  return buf;
}

template <class F>
double bisect_log(double lo, double hi, double relative_tolerance, F pred) {
  // pred(hi) true, pred(lo) false.
  while (hi / lo > 1.0 + relative_tolerance) {
    const double mid = std::sqrt(lo * hi);
    (pred(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace

void DeviceParams::validate() const {
  if (!(pulse_rate_hz > 0.0)) throw std::invalid_argument("pulse rate R must be positive");
  if (!(p_entangle >= 0.0 && p_entangle <= 1.0)) throw std::invalid_argument("p_c must lie in [0, 1]");
  if (!in_unit_interval_open_left(p_purify)) throw std::invalid_argument("p must lie in (0, 1]");
  if (pairs_per_circuit < 2) throw std::invalid_argument("N_p must be at least 2");
  if (!(p_pair_confidence > 0.0 && p_pair_confidence < 1.0)) {
    throw std::invalid_argument("P_pair must lie in (0, 1)");
  }
  if (!in_unit_interval_open_left(p_ls_confidence)) throw std::invalid_argument("P_LS must lie in (0, 1]");
  if (!(f_ideal > 0.0 && f_ideal <= 1.0)) throw std::invalid_argument("F_ideal must lie in (0, 1]");
}

DeviceParams device_from_json(const std::string& text) {
  const auto doc = nlohmann::json::parse(text);
  DeviceParams d;
  d.pulse_rate_hz = doc.value("R", d.pulse_rate_hz);
  d.p_entangle = doc.value("p_c", d.p_entangle);
  d.p_purify = doc.value("p", d.p_purify);
  d.pairs_per_circuit = doc.value("N_p", d.pairs_per_circuit);
  d.p_pair_confidence = doc.value("P_pair", d.p_pair_confidence);
  d.p_ls_confidence = doc.value("P_LS", d.p_ls_confidence);
  d.f_ideal = doc.value("F_ideal", d.f_ideal);
  d.validate();
  return d;
}

std::string device_to_json(const DeviceParams& d, int indent) {
  nlohmann::ordered_json doc;
  doc["R"] = d.pulse_rate_hz;
  doc["p_c"] = d.p_entangle;
  doc["p"] = d.p_purify;
  doc["N_p"] = d.pairs_per_circuit;
  doc["P_pair"] = d.p_pair_confidence;
  doc["P_LS"] = d.p_ls_confidence;
  doc["F_ideal"] = d.f_ideal;
  return doc.dump(indent);
}

DeviceParams load_device(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open device file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return device_from_json(buf.str());
}

std::int64_t multiplexing_k(double p_purify, double p_pair_confidence) {
  if (p_purify == 0.0) throw InfeasibleError("purification never succeeds (p = 0)");
  if (!in_unit_interval_open_left(p_purify)) throw std::invalid_argument("p must lie in (0, 1]");
  if (!(p_pair_confidence > 0.0 && p_pair_confidence < 1.0)) {
    throw std::invalid_argument("P_pair must lie in (0, 1)");
  }
  if (p_purify == 1.0) return 1;
  // (1 - p)^K <= 1 - P_pair, in log space.
  const double log_fail = std::log1p(-p_purify);
  const double log_target = std::log1p(-p_pair_confidence);
  auto ok = [&](std::int64_t k) { return static_cast<double>(k) * log_fail <= log_target; };
  std::int64_t k = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(log_target / log_fail)));
  while (k > 1 && ok(k - 1)) --k;
  while (!ok(k)) ++k;
  return k;
}

std::int64_t pairs_required(std::int64_t distance, std::int64_t pairs_per_circuit, std::int64_t k_multiplex) {
  if (distance < 1 || pairs_per_circuit < 1 || k_multiplex < 1) {
    throw std::invalid_argument("pairs_required arguments must be positive");
  }
  return distance * pairs_per_circuit * k_multiplex;
}

double p_onepair(double p_entangle, std::int64_t attempts) {
  if (attempts < 0) throw std::invalid_argument("attempt count must be non-negative");
  if (!(p_entangle >= 0.0 && p_entangle <= 1.0)) throw std::invalid_argument("p_e must lie in [0, 1]");
  if (attempts == 0 || p_entangle == 0.0) return 0.0;
  if (p_entangle == 1.0) return 1.0;
  return -std::expm1(static_cast<double>(attempts) * std::log1p(-p_entangle));
}

double binomial_tail_geq(std::int64_t n, double p, std::int64_t k) {
  if (n < 0) throw std::invalid_argument("binomial n must be non-negative");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("binomial p must lie in [0, 1]");
  if (k <= 0) return 1.0;
  if (k > n) return 0.0;
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;
  // P(X >= k) = I_p(k, n - k + 1).
  return boost::math::ibeta(static_cast<double>(k), static_cast<double>(n - k + 1), p);
}

std::int64_t attempts_budget(double cycle_time_s, double pulse_rate_hz) {
  if (!(cycle_time_s > 0.0)) throw std::invalid_argument("cycle time must be positive");
  return static_cast<std::int64_t>(std::floor(cycle_time_s * pulse_rate_hz * (1.0 + 1e-12)));
}

std::int64_t collection_threshold(std::int64_t n_ls, bool paper_compat) {
  return paper_compat ? n_ls + 1 : n_ls;
}

EstimateResult min_ions(const MinIonsQuery& query, const DeviceParams& device) {
  device.validate();
  if (query.distance < 1) throw std::invalid_argument("code distance must be at least 1");
  EstimateResult r;
  r.k_multiplex = multiplexing_k(device.p_purify, device.p_pair_confidence);
  r.n_ls = pairs_required(query.distance, device.pairs_per_circuit, r.k_multiplex);
  r.threshold = collection_threshold(r.n_ls, query.paper_compat);
  r.attempts_budget = attempts_budget(query.cycle_time_s, device.pulse_rate_hz);
  const double p1 = p_onepair(device.p_entangle, r.attempts_budget);
  if (p1 == 0.0) return r;

  const std::int64_t k = r.threshold;
  auto enough = [&](std::int64_t n) { return binomial_tail_geq(n, p1, k) >= device.p_ls_confidence; };
  if (enough(k)) {
    r.answer = k;
  } else {
    const auto n = first_true(k, enough);
    if (!n) return r;
    r.answer = *n;
  }
  r.feasible = true;
  r.rate_hz = 1.0 / query.cycle_time_s;
  return r;
}

EstimateResult min_attempts(const RateQuery& query, const DeviceParams& device) {
  device.validate();
  if (query.distance < 1) throw std::invalid_argument("code distance must be at least 1");
  if (query.n_ions < 1) throw std::invalid_argument("ion count must be at least 1");
  EstimateResult r;
  r.k_multiplex = multiplexing_k(device.p_purify, device.p_pair_confidence);
  r.n_ls = pairs_required(query.distance, device.pairs_per_circuit, r.k_multiplex);
  r.threshold = collection_threshold(r.n_ls, query.paper_compat);
  if (query.n_ions < r.threshold || device.p_entangle == 0.0) return r;

  auto enough = [&](std::int64_t a) {
    return binomial_tail_geq(query.n_ions, p_onepair(device.p_entangle, a), r.threshold) >=
           device.p_ls_confidence;
  };
  const auto a = enough(1) ? std::optional<std::int64_t>(1) : first_true(1, enough);
  if (!a) return r;
  r.answer = *a;
  r.attempts_budget = *a;
  r.feasible = true;
  return r;
}

EstimateResult max_rate(const RateQuery& query, const DeviceParams& device) {
  EstimateResult r = min_attempts(query, device);
  if (r.feasible) r.rate_hz = device.pulse_rate_hz / static_cast<double>(r.answer);
  return r;
}

std::vector<double> log_spaced(double from, double to, int points) {
  if (points < 1 || !(from > 0.0) || !(to > 0.0)) {
    throw std::invalid_argument("log_spaced needs positive bounds and at least one point");
  }
  if (points == 1) return {from};
  std::vector<double> out(points);
  const double a = std::log10(from);
  const double b = std::log10(to);
  for (int i = 0; i < points; ++i) out[i] = std::pow(10.0, a + (b - a) * i / (points - 1));
  out.front() = from;
  out.back() = to;
  return out;
}

std::vector<SweepRow> sweep_coupling(const std::vector<std::int64_t>& distances,
                                     const std::vector<double>& cycle_times_s,
                                     const std::vector<double>& p_entangle_grid,
                                     const DeviceParams& device, bool paper_compat) {
  if (distances.empty() || cycle_times_s.empty() || p_entangle_grid.empty()) {
    throw std::invalid_argument("sweep grids must be non-empty");
  }
  std::vector<SweepRow> rows;
  rows.reserve(distances.size() * cycle_times_s.size() * p_entangle_grid.size());
  for (auto d : distances) {
    for (double t : cycle_times_s) {
      for (double pc : p_entangle_grid) {
        DeviceParams dev = device;
        dev.p_entangle = pc;
        const auto r = min_ions({d, t, paper_compat}, dev);
        rows.push_back({d, t, pc, r.answer, r.feasible});
      }
    }
  }
  return rows;
}

std::optional<double> required_coupling(std::int64_t distance, double cycle_time_s,
                                        std::int64_t ion_budget, const DeviceParams& device,
                                        bool paper_compat, double relative_tolerance) {
  auto fits = [&](double pc) {
    DeviceParams dev = device;
    dev.p_entangle = pc;
    const auto r = min_ions({distance, cycle_time_s, paper_compat}, dev);
    return r.feasible && r.answer <= ion_budget;
  };
  if (!fits(1.0)) return std::nullopt;
  double lo = 1e-12;
  if (fits(lo)) return lo;
  return bisect_log(lo, 1.0, relative_tolerance, fits);
}

double plateau_onset(std::int64_t distance, double cycle_time_s, const DeviceParams& device,
                     bool paper_compat, double relative_tolerance) {
  auto at_plateau = [&](double pc) {
    DeviceParams dev = device;
    dev.p_entangle = pc;
    const auto r = min_ions({distance, cycle_time_s, paper_compat}, dev);
    return r.feasible && r.answer == r.threshold;
  };
  double lo = 1e-12;
  if (at_plateau(lo)) return lo;
  return bisect_log(lo, 1.0, relative_tolerance, at_plateau);
}

void write_min_ions_csv(std::ostream& out, const std::vector<std::pair<MinIonsQuery, EstimateResult>>& rows) {
  out << "distance,cycle_time_us,min_ions,feasible,k_multiplex,n_ls,threshold,attempts_budget\n";
  for (const auto& [q, r] : rows) {
    out << q.distance << ',' << format("%g", q.cycle_time_s * 1e6) << ',' << r.answer << ','
        << (r.feasible ? "true" : "false") << ',' << r.k_multiplex << ',' << r.n_ls << ',' << r.threshold
        << ',' << r.attempts_budget << '\n';
  }
}

void write_rate_csv(std::ostream& out, const std::vector<std::pair<RateQuery, EstimateResult>>& rows) {
  out << "distance,n_ions,rate_hz,feasible,min_attempts,full_surgery_rate_hz,k_multiplex,n_ls,threshold\n";
  for (const auto& [q, r] : rows) {
    out << q.distance << ',' << q.n_ions << ',' << format("%.1f", r.rate_hz) << ','
        << (r.feasible ? "true" : "false") << ',' << r.answer << ','
        << format("%.1f", r.rate_hz / static_cast<double>(q.distance)) << ',' << r.k_multiplex << ','
        << r.n_ls << ',' << r.threshold << '\n';
  }
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "distance,cycle_time_us,p_c,min_ions,feasible\n";
  for (const auto& r : rows) {
    out << r.distance << ',' << format("%g", r.cycle_time_s * 1e6) << ',' << format("%.6e", r.p_entangle) << ','
        << r.min_ions << ',' << (r.feasible ? "true" : "false") << '\n';
  }
}

}  // namespace ionls
