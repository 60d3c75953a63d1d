#include "cli.hpp"

#include "ionls/collection_mc.hpp"
#include "ionls/ga_search.hpp"
#include "ionls/purification.hpp"
#include "ionls/resource_model.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

namespace ionls::cli {

namespace {

using nlohmann::ordered_json;

struct Options {
  std::string device_path;
  std::string output_path;
  std::string format = "csv";
  bool paper_compat = false;
  bool strict = false;
  std::optional<double> pc;
};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

DeviceParams load_device_for(const Options& o) {
  DeviceParams d;
  std::string path = o.device_path;
  if (path.empty()) {
    if (const char* env = std::getenv("IONLS_DEVICE")) path = env;
  }
  if (!path.empty()) d = load_device(path);
  if (o.pc) d.p_entangle = *o.pc;
  d.validate();
  return d;
}

double paradigm_seconds(const std::string& name) {
  if (name == "t1000us") return 1e-3;
  if (name == "t100us") return 1e-4;
  if (name == "t10us") return 1e-5;
  throw std::invalid_argument("unknown paradigm \"" + name + "\" (t1000us, t100us, t10us, all)");
}

std::vector<double> cycle_times(const std::string& paradigm, const std::string& cycle_us) {
  if (!cycle_us.empty()) {
    std::vector<double> out;
    for (double us : parse_double_list(cycle_us)) out.push_back(us * 1e-6);
    return out;
  }
  if (paradigm == "all") return {1e-3, 1e-4, 1e-5};
  return {paradigm_seconds(paradigm)};
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

DensityMatrix parse_input(const std::string& text) {
  if (text == "stephenson") return stephenson_pair(true);
  if (text == "stephenson-raw") return stephenson_pair(false);
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  if (colon == std::string::npos) throw std::invalid_argument("unknown input \"" + text + "\"");
  const auto values = parse_double_list(text.substr(colon + 1));
  if (kind == "werner" && values.size() == 1) return to_density_matrix(BellDiagonalState::werner(values[0]));
  if (kind == "belldiag" && values.size() == 4) {
    return to_density_matrix(BellDiagonalState{values[0], values[1], values[2], values[3]});
  }
  throw std::invalid_argument("input must be stephenson, werner:F or belldiag:F,px,pz,py");
}

SearchInput parse_search_input(const std::string& text) {
  if (text == "stephenson") return SearchInput::stephenson();
  const auto colon = text.find(':');
  if (colon != std::string::npos) {
    const auto kind = text.substr(0, colon);
    const auto v = parse_double_list(text.substr(colon + 1));
    if (kind == "werner" && v.size() == 1) return SearchInput::werner(v[0]);
    if (kind == "belldiag" && v.size() == 4) {
      return {SearchInput::Kind::bell_diagonal, BellDiagonalState{v[0], v[1], v[2], v[3]}};
    }
  }
  throw std::invalid_argument("search input must be stephenson, werner:F or belldiag:F,px,pz,py");
}

NoiseModel parse_noise(const std::string& text) {
  if (text == "paper") return NoiseModel::paper();
  if (text == "none") return NoiseModel::none();
  const auto v = parse_double_list(text);
  if (v.size() == 3) {
    NoiseModel n{v[0], v[1], v[2]};
    n.validate();
    return n;
  }
  throw std::invalid_argument("noise must be paper, none or p1,p2,pmeas");
}

Engine parse_engine(const std::string& text) {
  if (text == "auto") return Engine::automatic;
  if (text == "dense") return Engine::dense;
  if (text == "bell") return Engine::bell_diagonal;
  throw std::invalid_argument("engine must be auto, dense or bell");
}

int finish_table(bool any_feasible, bool any_infeasible, const Options& o) {
  if (o.strict && any_infeasible && !any_feasible) return kExitInfeasible;
  return kExitOk;
}

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : default_out_(out), err_(err) {}

  std::ostream& out() {
    if (opts.output_path.empty()) return default_out_;
    if (!file_) {
      file_ = std::make_unique<std::ofstream>(opts.output_path);
      if (!*file_) throw std::runtime_error("cannot write " + opts.output_path);
    }
    return *file_;
  }
  std::ostream& err() { return err_; }

  Options opts;

 private:
  std::ostream& default_out_;
  std::ostream& err_;
  std::unique_ptr<std::ofstream> file_;
};

int cmd_min_ions(Runner& r, const std::string& distances, const std::string& paradigm, const std::string& cycle_us) {
  const auto device = load_device_for(r.opts);
  std::vector<std::pair<MinIonsQuery, EstimateResult>> rows;
  for (double t : cycle_times(paradigm, cycle_us)) {
    for (auto d : parse_int_list(distances)) {
      MinIonsQuery q{d, t, r.opts.paper_compat};
      rows.emplace_back(q, min_ions(q, device));
    }
  }
  bool any_feasible = false, any_infeasible = false;
  for (const auto& [q, e] : rows) (e.feasible ? any_feasible : any_infeasible) = true;
  if (r.opts.format == "json") {
    ordered_json doc = ordered_json::array();
    for (const auto& [q, e] : rows) {
      doc.push_back({{"distance", q.distance},
                     {"cycle_time_us", q.cycle_time_s * 1e6},
                     {"min_ions", e.answer},
                     {"feasible", e.feasible},
                     {"k_multiplex", e.k_multiplex},
                     {"n_ls", e.n_ls},
                     {"threshold", e.threshold},
                     {"attempts_budget", e.attempts_budget}});
    }
    r.out() << doc.dump(2) << '\n';
  } else {
    write_min_ions_csv(r.out(), rows);
  }
  return finish_table(any_feasible, any_infeasible, r.opts);
}

int cmd_rate(Runner& r, const std::string& ions, const std::string& distances) {
  const auto device = load_device_for(r.opts);
  std::vector<std::pair<RateQuery, EstimateResult>> rows;
  for (auto n : parse_int_list(ions)) {
    for (auto d : parse_int_list(distances)) {
      RateQuery q{d, n, r.opts.paper_compat};
      rows.emplace_back(q, max_rate(q, device));
    }
  }
  bool any_feasible = false, any_infeasible = false;
  for (const auto& [q, e] : rows) (e.feasible ? any_feasible : any_infeasible) = true;
  if (r.opts.format == "json") {
    ordered_json doc = ordered_json::array();
    for (const auto& [q, e] : rows) {
      doc.push_back({{"distance", q.distance},
                     {"n_ions", q.n_ions},
                     {"rate_hz", e.rate_hz},
                     {"feasible", e.feasible},
                     {"min_attempts", e.answer},
                     {"full_surgery_rate_hz", e.rate_hz / static_cast<double>(q.distance)},
                     {"k_multiplex", e.k_multiplex},
                     {"n_ls", e.n_ls},
                     {"threshold", e.threshold}});
    }
    r.out() << doc.dump(2) << '\n';
  } else {
    write_rate_csv(r.out(), rows);
  }
  return finish_table(any_feasible, any_infeasible, r.opts);
}

int cmd_sweep(Runner& r, const std::string& distances, const std::string& cycle_us, double pc_from, double pc_to,
              int points) {
  const auto device = load_device_for(r.opts);
  std::vector<std::int64_t> ds;
  for (auto d : parse_int_list(distances)) ds.push_back(d);
  std::vector<double> ts;
  for (double us : parse_double_list(cycle_us)) ts.push_back(us * 1e-6);
  const auto rows = sweep_coupling(ds, ts, log_spaced(pc_from, pc_to, points), device, r.opts.paper_compat);
  bool any_feasible = false, any_infeasible = false;
  for (const auto& row : rows) (row.feasible ? any_feasible : any_infeasible) = true;
  if (r.opts.format == "json") {
    ordered_json doc = ordered_json::array();
    for (const auto& row : rows) {
      doc.push_back({{"distance", row.distance},
                     {"cycle_time_us", row.cycle_time_s * 1e6},
                     {"p_c", row.p_entangle},
                     {"min_ions", row.min_ions},
                     {"feasible", row.feasible}});
    }
    r.out() << doc.dump(2) << '\n';
  } else {
    write_sweep_csv(r.out(), rows);
  }
  return finish_table(any_feasible, any_infeasible, r.opts);
}

int cmd_simulate(Runner& r, const std::string& circuit_path, const std::string& input, const std::string& noise,
                 const std::string& engine) {
  const auto circuit = load_circuit(circuit_path);
  const auto outcome = simulate(circuit, parse_input(input), parse_noise(noise), parse_engine(engine));
  if (r.opts.format == "json") {
    ordered_json doc{{"circuit", circuit_path},
                     {"n_pairs", circuit.n_pairs},
                     {"output_fidelity", outcome.output_fidelity},
                     {"success_probability", outcome.success_probability},
                     {"total_probability", outcome.total_probability}};
    r.out() << doc.dump(2) << '\n';
  } else {
    r.out() << "n_pairs,success_probability,output_fidelity,circuit_path\n"
            << circuit.n_pairs << ',' << fmt("%.6f", outcome.success_probability) << ','
            << fmt("%.6f", outcome.output_fidelity) << ',' << circuit_path << '\n';
  }
  return kExitOk;
}

int cmd_search(Runner& r, GaConfig config, const std::string& input, const std::string& noise,
               const std::string& objective, const std::string& save_best, int top) {
  config.objective = parse_objective(objective);
  const auto result = search(config, parse_search_input(input), parse_noise(noise));
  if (!save_best.empty()) save_circuit(result.ranked.front().circuit, save_best);
  const auto n = std::min<std::size_t>(result.ranked.size(), static_cast<std::size_t>(std::max(top, 1)));
  if (r.opts.format == "json") {
    ordered_json doc;
    doc["config"] = {{"n_pairs", config.n_pairs},         {"population_size", config.population_size},
                     {"generations", config.generations}, {"seed", config.seed},
                     {"objective", objective},            {"input", input},
                     {"noise", noise}};
    doc["best_per_generation"] = result.best_per_generation;
    ordered_json ranked = ordered_json::array();
    for (std::size_t i = 0; i < n; ++i) {
      const auto& rc = result.ranked[i];
      ranked.push_back({{"fitness", rc.fitness},
                        {"output_fidelity", rc.outcome.output_fidelity},
                        {"success_probability", rc.outcome.success_probability},
                        {"circuit", ordered_json::parse(circuit_to_json(rc.circuit))}});
    }
    doc["ranked"] = ranked;
    r.out() << doc.dump(2) << '\n';
  } else {
    r.out() << "rank,fitness,success_probability,output_fidelity,n_ops\n";
    for (std::size_t i = 0; i < n; ++i) {
      const auto& rc = result.ranked[i];
      r.out() << i << ',' << fmt("%.6f", rc.fitness) << ',' << fmt("%.6f", rc.outcome.success_probability) << ','
              << fmt("%.6f", rc.outcome.output_fidelity) << ',' << rc.circuit.ops.size() << '\n';
    }
  }
  return kExitOk;
}

int cmd_benchmark(Runner& r, const std::string& dir, const std::string& noise) {
  const auto candidates = load_candidates(dir);
  if (candidates.empty()) throw std::invalid_argument("no circuit files under " + dir);
  const auto rows = benchmark_sweep(candidates, parse_noise(noise));
  if (r.opts.format == "json") {
    ordered_json doc = ordered_json::array();
    for (const auto& row : rows) {
      doc.push_back({{"n_pairs", row.n_pairs},
                     {"success_probability", row.success_probability},
                     {"output_fidelity", row.output_fidelity},
                     {"circuit_path", row.circuit_path}});
    }
    r.out() << doc.dump(2) << '\n';
  } else {
    write_benchmark_csv(r.out(), rows);
  }
  return kExitOk;
}

int cmd_validate(Runner& r, long long ions, long long attempts, std::optional<double> pc, long long trials,
                 std::uint64_t seed, double sigmas, bool bracket) {
  std::vector<GridPoint> grid;
  if (ions > 0 || attempts > 0 || pc) {
    const auto device = load_device_for(r.opts);
    grid.push_back({ions > 0 ? ions : 100, pc.value_or(device.p_entangle), attempts > 0 ? attempts : 1000});
  } else {
    grid = default_smoke_grid();
  }
  const auto checks = cross_check(grid, trials, seed, sigmas);
  bool all_pass = true;
  for (const auto& c : checks) all_pass = all_pass && c.pass;

  // Every ion of a 45-ion register entangled with the lattice-surgery confidence.
  std::optional<ordered_json> bracket_doc;
  std::string bracket_line;
  if (bracket) {
    const auto device = load_device_for(r.opts);
    const RateQuery q{3, 45, false};
    const auto analytic = min_attempts(q, device);
    const auto mc = empirical_min_attempts(45, device.p_entangle, analytic.threshold, device.p_ls_confidence, trials,
                                           seed);
    // upper == 0: too few trials to resolve an upper bound.
    const bool ok = analytic.feasible && mc.feasible && mc.lower <= analytic.answer &&
                    (mc.upper == 0 || analytic.answer <= mc.upper);
    all_pass = all_pass && ok;
    const std::string upper = mc.upper == 0 ? "inf" : std::to_string(mc.upper);
    bracket_line = "# min_attempts n_ions=45 k=" + std::to_string(analytic.threshold) +
                   " analytic=" + std::to_string(analytic.answer) + " empirical=" + std::to_string(mc.point) +
                   " bracket=[" + std::to_string(mc.lower) + ',' + upper + "] " + (ok ? "PASS" : "FAIL");
    bracket_doc = ordered_json{{"n_ions", 45},
                               {"k", analytic.threshold},
                               {"analytic", analytic.answer},
                               {"empirical", mc.point},
                               {"lower", mc.lower},
                               {"upper", mc.upper == 0 ? ordered_json(nullptr) : ordered_json(mc.upper)},
                               {"pass", ok}};
  }

  auto& out = r.out();
  if (r.opts.format == "json") {
    ordered_json doc;
    ordered_json rows = ordered_json::array();
    for (const auto& c : checks) {
      rows.push_back({{"n_ions", c.point.n_ions},
                      {"p_c", c.point.p_entangle},
                      {"attempts", c.point.attempts},
                      {"k", c.k},
                      {"analytic", c.analytic},
                      {"empirical", c.empirical},
                      {"std_error", c.standard_error},
                      {"pass", c.pass}});
    }
    doc["checks"] = rows;
    if (bracket_doc) doc["min_attempts"] = *bracket_doc;
    doc["pass"] = all_pass;
    out << doc.dump(2) << '\n';
  } else {
    out << "n_ions,p_c,attempts,k,analytic,empirical,std_error,result\n";
    for (const auto& c : checks) {
      out << c.point.n_ions << ',' << fmt("%.6g", c.point.p_entangle) << ',' << c.point.attempts << ',' << c.k
          << ',' << fmt("%.6f", c.analytic) << ',' << fmt("%.6f", c.empirical) << ','
          << fmt("%.6f", c.standard_error) << ',' << (c.pass ? "PASS" : "FAIL") << '\n';
    }
    if (bracket) out << bracket_line << '\n';
    out << "# " << (all_pass ? "all checks passed" : "some checks failed") << '\n';
  }
  return all_pass ? kExitOk : kExitInfeasible;
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--device", o.device_path, "Device JSON (default: $IONLS_DEVICE, else built-in values)");
  sub->add_option("-o,--output", o.output_path, "Write to this file instead of stdout");
  sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

}  // namespace

std::vector<long long> parse_int_list(const std::string& text) {
  std::vector<long long> out;
  for (const auto& item : split(text, ',')) {
    const auto dots = item.find("..");
    try {
      if (dots == std::string::npos) {
        out.push_back(std::stoll(item));
      } else {
        const long long a = std::stoll(item.substr(0, dots));
        const long long b = std::stoll(item.substr(dots + 2));
        if (b < a) throw std::invalid_argument("empty range " + item);
        for (long long v = a; v <= b; ++v) out.push_back(v);
      }
    } catch (const std::logic_error&) {
      throw std::invalid_argument("bad integer list \"" + text + "\"");
    }
  }
  if (out.empty()) throw std::invalid_argument("empty integer list");
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split(text, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::logic_error&) {
      used = 0;
    }
    if (used != item.size()) throw std::invalid_argument("bad number \"" + item + "\"");
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty number list");
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Runner runner(out, err);
  auto& o = runner.opts;

  CLI::App app{"Communication-ion and purification estimates for modular trapped-ion lattice surgery", "ionls"};
  app.require_subcommand(1);
  app.add_flag("--paper-compat", o.paper_compat, "Collect N_LS + 1 pairs instead of N_LS");
  app.add_flag("--strict", o.strict, "Exit 1 when every result is infeasible");
  app.add_option("--pc", o.pc, "Override the device coupling probability p_c");

  std::string distances = "3..9", paradigm = "all", cycle_us;
  auto* min_cmd = app.add_subcommand("min-ions", "Minimum communication ions per (distance, cycle time)");
  min_cmd->add_option("--distance", distances, "Distances, e.g. 3..9 or 3,6,9");
  min_cmd->add_option("--paradigm", paradigm, "t1000us, t100us, t10us or all");
  min_cmd->add_option("--cycle-time-us", cycle_us, "Explicit cycle times in microseconds (overrides --paradigm)");

  std::string ions = "100,1000,10000", rate_distances = "3..9";
  auto* rate_cmd = app.add_subcommand("rate", "Maximum lattice-surgery cycle rate per (ions, distance)");
  rate_cmd->add_option("--ions", ions, "Ion counts, e.g. 100,1000,10000");
  rate_cmd->add_option("--distance", rate_distances, "Distances");

  std::string sweep_d = "3,6,9", sweep_t = "1000,100,10";
  double pc_from = 1e-5, pc_to = 1.0;
  int points = 50;
  auto* sweep_cmd = app.add_subcommand("sweep", "Minimum ions against coupling probability");
  sweep_cmd->add_option("--distances", sweep_d, "Distances");
  sweep_cmd->add_option("--cycle-times-us", sweep_t, "Cycle times in microseconds");
  sweep_cmd->add_option("--pc-from", pc_from, "Smallest p_c")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--pc-to", pc_to, "Largest p_c")->check(CLI::Range(0.0, 1.0));
  sweep_cmd->add_option("--points", points, "Log-spaced grid points")->check(CLI::PositiveNumber);

  auto* purify = app.add_subcommand("purify", "Purification circuits");
  purify->require_subcommand(1);
  std::string circuit_path, input = "stephenson", noise = "paper", engine = "auto";
  auto* sim_cmd = purify->add_subcommand("simulate", "Simulate one circuit file");
  sim_cmd->add_option("--circuit", circuit_path, "Circuit JSON")->required();
  sim_cmd->add_option("--input", input, "stephenson, werner:F or belldiag:F,px,pz,py");
  sim_cmd->add_option("--noise", noise, "paper, none or p1,p2,pmeas");
  sim_cmd->add_option("--engine", engine, "auto, dense or bell");

  GaConfig ga;
  std::string search_input = "werner:0.94", search_noise = "paper", objective = "fidelity", save_best;
  int top = 10;
  auto* search_cmd = purify->add_subcommand("search", "Genetic search for n -> 1 circuits");
  search_cmd->add_option("--n", ga.n_pairs, "Input pairs (2..5)");
  search_cmd->add_option("--pop", ga.population_size, "Population size");
  search_cmd->add_option("--gens", ga.generations, "Generations");
  search_cmd->add_option("--seed", ga.seed, "RNG seed");
  search_cmd->add_option("--max-ops", ga.max_ops, "Genome capacity");
  search_cmd->add_option("--mutation", ga.mutation_rate, "Per-gene mutation rate");
  search_cmd->add_option("--crossover", ga.crossover_rate, "Crossover rate");
  search_cmd->add_option("--elite", ga.elite_fraction, "Elite fraction");
  search_cmd->add_option("--floor", ga.success_floor, "Success-probability floor");
  search_cmd->add_option("--target-fidelity", ga.target_fidelity, "Fidelity target of the yield objective");
  search_cmd->add_option("--threads", ga.threads, "Fitness worker threads");
  search_cmd->add_option("--objective", objective, "fidelity or yield");
  search_cmd->add_option("--input", search_input, "werner:F, belldiag:F,px,pz,py or stephenson");
  search_cmd->add_option("--noise", search_noise, "paper, none or p1,p2,pmeas");
  search_cmd->add_option("--save-best", save_best, "Write the best circuit JSON here");
  search_cmd->add_option("--top", top, "Ranked circuits to report");

  std::string circuits_dir = "circuits/candidates", bench_noise = "paper";
  auto* bench_cmd = purify->add_subcommand("benchmark", "Re-simulate candidate circuits on Stephenson pairs");
  bench_cmd->add_option("--circuits", circuits_dir, "Directory of circuit JSON files");
  bench_cmd->add_option("--noise", bench_noise, "paper, none or p1,p2,pmeas");

  long long v_ions = 0, v_attempts = 0, v_trials = 100000;
  std::optional<double> v_pc;
  std::uint64_t v_seed = 1;
  double v_sigmas = 3.0;
  bool v_no_bracket = false;
  auto* val_cmd = app.add_subcommand("validate", "Check the binomial model against Monte Carlo");
  val_cmd->add_option("--ions", v_ions, "Ion count of a single check point");
  val_cmd->add_option("--attempts", v_attempts, "Attempts of a single check point");
  val_cmd->add_option("--pc", v_pc, "p_c of a single check point");
  val_cmd->add_option("--trials", v_trials, "Trials per point")->check(CLI::PositiveNumber);
  val_cmd->add_option("--seed", v_seed, "RNG seed");
  val_cmd->add_option("--sigmas", v_sigmas, "Allowed deviation in standard errors");
  val_cmd->add_flag("--no-bracket", v_no_bracket, "Skip the min-attempts bracket check");

  for (auto* sub : {min_cmd, rate_cmd, sweep_cmd, sim_cmd, search_cmd, bench_cmd, val_cmd}) add_common(sub, o);
  for (auto* sub : {min_cmd, rate_cmd, sweep_cmd, purify, val_cmd}) sub->fallthrough();
  for (auto* sub : {sim_cmd, search_cmd, bench_cmd}) sub->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*min_cmd) return cmd_min_ions(runner, distances, paradigm, cycle_us);
    if (*rate_cmd) return cmd_rate(runner, ions, rate_distances);
    if (*sweep_cmd) return cmd_sweep(runner, sweep_d, sweep_t, pc_from, pc_to, points);
    if (*sim_cmd) return cmd_simulate(runner, circuit_path, input, noise, engine);
    if (*search_cmd) return cmd_search(runner, ga, search_input, search_noise, objective, save_best, top);
    if (*bench_cmd) return cmd_benchmark(runner, circuits_dir, bench_noise);
    if (*val_cmd) return cmd_validate(runner, v_ions, v_attempts, v_pc, v_trials, v_seed, v_sigmas, !v_no_bracket);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace ionls::cli
