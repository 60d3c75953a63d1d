#include "ionls/purification.hpp"

#include "bell_frame.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace ionls {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string side_name(Side side) { return side == Side::A ? "A" : "B"; }

void require_pair(const PurificationCircuit& c, int pair, const char* what) {
  if (pair < 0 || pair >= c.n_pairs) {
    std::ostringstream msg;
    msg << what << " pair index " << pair << " out of range for " << c.n_pairs << " pairs";
    throw CircuitError(msg.str());
  }
}

std::vector<DensityMatrix> expand_inputs(const PurificationCircuit& circuit,
                                         std::span<const DensityMatrix> inputs) {
  if (inputs.size() != 1 && static_cast<int>(inputs.size()) != circuit.n_pairs) {
    throw std::invalid_argument("expected one shared input state or one state per pair");
  }
  for (const auto& s : inputs) {
    if (s.num_qubits() != 2) throw std::invalid_argument("purification inputs must be 2-qubit states");
  }
  std::vector<DensityMatrix> out;
  for (int i = 0; i < circuit.n_pairs; ++i) out.push_back(inputs.size() == 1 ? inputs[0] : inputs[i]);
  return out;
}

// Joint state with pair i on qubits (i, n + i).
DensityMatrix joint_input(std::span<const DensityMatrix> pairs) {
  const int n = static_cast<int>(pairs.size());
  DensityMatrix joint(2 * n);
  const std::size_t dim = joint.dim();
  const int nq = 2 * n;
  auto local = [&](std::size_t idx, int pair) {
    const std::size_t a = (idx >> (nq - 1 - pair)) & 1;
    const std::size_t b = (idx >> (nq - 1 - (n + pair))) & 1;
    return 2 * a + b;
  };
  std::vector<std::size_t> local_index(dim * n);
  for (std::size_t i = 0; i < dim; ++i) {
    for (int p = 0; p < n; ++p) local_index[i * n + p] = local(i, p);
  }
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < dim; ++c) {
      Complex acc{1.0, 0.0};
      for (int p = 0; p < n && acc != Complex{}; ++p) {
        acc *= pairs[p](local_index[r * n + p], local_index[c * n + p]);
      }
      joint(r, c) = acc;
    }
  }
  return joint;
}

DensityMatrix reduce_ordered(const DensityMatrix& state, std::vector<int> keep) {
  // Reduced state over `keep`, qubits in the order listed.
  std::vector<int> sorted = keep;
  std::sort(sorted.begin(), sorted.end());
  DensityMatrix reduced = partial_trace(state, sorted);
  if (sorted == keep) return reduced;
  const int k = static_cast<int>(keep.size());
  std::vector<int> position(k);  // position[t] = index in sorted of keep[t]
  for (int t = 0; t < k; ++t) {
    position[t] = static_cast<int>(std::find(sorted.begin(), sorted.end(), keep[t]) - sorted.begin());
  }
  auto remap = [&](std::size_t idx) {
    std::size_t out = 0;
    for (int t = 0; t < k; ++t) {
      const std::size_t bit = (idx >> (k - 1 - position[t])) & 1;
      out |= bit << (k - 1 - t);
    }
    return out;
  };
  DensityMatrix out(k);
  for (std::size_t r = 0; r < out.dim(); ++r) {
    for (std::size_t c = 0; c < out.dim(); ++c) out(remap(r), remap(c)) = reduced(r, c);
  }
  return out;
}

struct Branch {
  DensityMatrix state;
  std::vector<int> labels;  // reported outcome per measurement, in program order
};

struct DenseRun {
  std::vector<Branch> branches;
  std::vector<int> live;  // live[q] = current index of original qubit q, -1 once measured
  std::map<std::string, int> label_slot;
};

DenseRun run_dense(const PurificationCircuit& circuit, std::span<const DensityMatrix> pairs,
                   const NoiseModel& noise) {
  DenseRun run;
  const int nq = 2 * circuit.n_pairs;
  run.live.resize(nq);
  for (int q = 0; q < nq; ++q) run.live[q] = q;
  run.branches.push_back({joint_input(pairs), {}});

  for (const auto& op : circuit.ops) {
    std::visit(
        Overloaded{
            [&](const TwoQubitGateOp& g) {
              const int targets[2] = {run.live[qubit_index(circuit.n_pairs, g.control_pair, g.side)],
                                      run.live[qubit_index(circuit.n_pairs, g.target_pair, g.side)]};
              const Gate gate{g.kind == TwoQubitKind::CNOT ? GateKind::CNOT : GateKind::CZ};
              for (auto& b : run.branches) {
                apply_gate_inplace(b.state, gate, targets);
                depolarize_inplace(b.state, targets, noise.p2);
              }
            },
            [&](const CliffordOp& g) {
              const int target[1] = {run.live[qubit_index(circuit.n_pairs, g.pair, g.side)]};
              for (auto& b : run.branches) {
                apply_gate_inplace(b.state, Gate::clifford(g.clifford_index), target);
                depolarize_inplace(b.state, target, noise.p1);
              }
            },
            [&](const MeasureOp& m) {
              const int original = qubit_index(circuit.n_pairs, m.pair, m.side);
              const int current = run.live[original];
              std::vector<Branch> next;
              next.reserve(run.branches.size() * 2);
              for (auto& b : run.branches) {
                auto split = measure_and_discard(b.state, current, m.basis, noise.p_meas);
                for (int outcome = 0; outcome < 2; ++outcome) {
                  Branch child{std::move(split[outcome]), b.labels};
                  child.labels.push_back(outcome);
                  next.push_back(std::move(child));
                }
              }
              run.branches = std::move(next);
              run.label_slot[m.label] = static_cast<int>(run.label_slot.size());
              run.live[original] = -1;
              for (int q = 0; q < nq; ++q) {
                if (run.live[q] > current) --run.live[q];
              }
            },
        },
        op);
  }
  return run;
}

bool accepted(const PurificationCircuit& circuit, const std::map<std::string, int>& slot,
              const std::vector<int>& labels) {
  for (const auto& c : circuit.accept) {
    const bool same = labels[slot.at(c.first)] == labels[slot.at(c.second)];
    if (same != (c.relation == Relation::coincident)) return false;
  }
  return true;
}

ProtocolOutcome simulate_dense(const PurificationCircuit& circuit, std::span<const DensityMatrix> pairs,
                               const NoiseModel& noise) {
  DenseRun run = run_dense(circuit, pairs, noise);
  const int n = circuit.n_pairs;
  std::vector<int> keep{run.live[qubit_index(n, 0, Side::A)], run.live[qubit_index(n, 0, Side::B)]};

  ProtocolOutcome out;
  DensityMatrix accepted_state;
  bool have_state = false;
  for (const auto& b : run.branches) {
    const double weight = b.state.trace().real();
    out.total_probability += weight;
    if (!accepted(circuit, run.label_slot, b.labels)) continue;
    out.success_probability += weight;
    if (!have_state) {
      accepted_state = b.state;
      have_state = true;
    } else {
      accepted_state += b.state;
    }
  }
  if (!have_state) return out;
  out.output_state = reduce_ordered(accepted_state, keep);
  if (out.success_probability > 0.0) {
    out.output_state *= 1.0 / out.success_probability;
    out.output_fidelity = fidelity_to_bell(out.output_state, BellKind::phi_plus);
  } else {
    out.output_state = DensityMatrix(2);
  }
  out.success_probability = std::clamp(out.success_probability, 0.0, 1.0);
  return out;
}

// Bell-diagonal engine ------------------------------------------------------

struct BellStep {
  enum class Kind { two_qubit, clifford, measure } kind = Kind::two_qubit;
  const bell::TwoPairMap* two_pair = nullptr;
  bell::OnePairMap one_pair{};
  int pair = 0;
  int second = 0;
  PauliBasis basis = PauliBasis::Z;
  std::string label_a, label_b;
};

// Groups consecutive A/B instructions into bilateral steps; empty optional
// when some instruction has no matching partner.
std::optional<std::vector<BellStep>> bilateral_steps(const PurificationCircuit& circuit) {
  std::vector<BellStep> steps;
  const auto& ops = circuit.ops;
  for (std::size_t k = 0; k < ops.size(); k += 2) {
    if (k + 1 >= ops.size()) return std::nullopt;
    const auto& x = ops[k];
    const auto& y = ops[k + 1];
    if (x.index() != y.index()) return std::nullopt;
    if (const auto* g = std::get_if<TwoQubitGateOp>(&x)) {
      const auto& h = std::get<TwoQubitGateOp>(y);
      if (g->side == h.side || g->kind != h.kind || g->control_pair != h.control_pair ||
          g->target_pair != h.target_pair) {
        return std::nullopt;
      }
      BellStep s;
      s.kind = BellStep::Kind::two_qubit;
      s.two_pair = &bell::two_pair_map(g->kind);
      s.pair = g->control_pair;
      s.second = g->target_pair;
      steps.push_back(s);
    } else if (const auto* c = std::get_if<CliffordOp>(&x)) {
      const auto& d = std::get<CliffordOp>(y);
      if (c->side == d.side || c->pair != d.pair) return std::nullopt;
      const int index_a = c->side == Side::A ? c->clifford_index : d.clifford_index;
      const int index_b = c->side == Side::A ? d.clifford_index : c->clifford_index;
      auto map = bell::one_pair_map(index_a, index_b);
      if (!map) return std::nullopt;
      BellStep s;
      s.kind = BellStep::Kind::clifford;
      s.one_pair = *map;
      s.pair = c->pair;
      steps.push_back(s);
    } else {
      const auto& m = std::get<MeasureOp>(x);
      const auto& o = std::get<MeasureOp>(y);
      if (m.side == o.side || m.pair != o.pair || m.basis != o.basis) return std::nullopt;
      BellStep s;
      s.kind = BellStep::Kind::measure;
      s.pair = m.pair;
      s.basis = m.basis;
      s.label_a = m.side == Side::A ? m.label : o.label;
      s.label_b = m.side == Side::A ? o.label : m.label;
      steps.push_back(s);
    }
  }
  return steps;
}

ProtocolOutcome simulate_bell(const PurificationCircuit& circuit, std::span<const DensityMatrix> pairs,
                              const std::vector<BellStep>& steps, const NoiseModel& noise) {
  const int n = circuit.n_pairs;
  bell::FrameDistribution dist(n);
  std::vector<std::array<double, 4>> weights;
  for (const auto& p : pairs) {
    const auto w = bell_weights(p);
    // Frame codes x + 2z: I (phi+), X (psi+), Z (phi-), Y (psi-).
    weights.push_back({w[0], w[1], w[2], w[3]});
  }
  dist.set_product(weights);

  std::vector<std::pair<int, PauliBasis>> measured;  // (pair, basis) in program order
  std::vector<std::string> labels;
  for (const auto& s : steps) {
    switch (s.kind) {
      case BellStep::Kind::two_qubit:
        dist.apply_two_pair(*s.two_pair, s.pair, s.second);
        // One channel per side; Paulis on either side shift the frame alike.
        dist.depolarize_two_pairs(s.pair, s.second, noise.p2);
        dist.depolarize_two_pairs(s.pair, s.second, noise.p2);
        break;
      case BellStep::Kind::clifford:
        dist.apply_one_pair(s.one_pair, s.pair);
        dist.depolarize_one_pair(s.pair, noise.p1);
        dist.depolarize_one_pair(s.pair, noise.p1);
        break;
      case BellStep::Kind::measure:
        measured.emplace_back(s.pair, s.basis);
        labels.push_back(s.label_a);
        labels.push_back(s.label_b);
        break;
    }
  }

  // Accept weight for each vector of correlation bits s (bit j: pair j's
  // reported labels differ in the noiseless case).
  const int m = static_cast<int>(measured.size());
  std::map<std::string, int> slot;
  for (int k = 0; k < static_cast<int>(labels.size()); ++k) slot[labels[k]] = k;
  const double pm = noise.p_meas;
  const double q_same = 0.5 * ((1.0 - pm) * (1.0 - pm) + pm * pm);
  const double q_diff = pm * (1.0 - pm);
  std::vector<double> accept_weight(std::size_t{1} << m, 0.0);
  std::vector<int> reported(2 * m);
  for (std::size_t r = 0; r < (std::size_t{1} << (2 * m)); ++r) {
    for (int k = 0; k < 2 * m; ++k) reported[k] = static_cast<int>((r >> k) & 1);
    if (!accepted(circuit, slot, reported)) continue;
    for (std::size_t s = 0; s < accept_weight.size(); ++s) {
      double w = 1.0;
      for (int j = 0; j < m; ++j) {
        const int diff = reported[2 * j] ^ reported[2 * j + 1];
        w *= diff == static_cast<int>((s >> j) & 1) ? q_same : q_diff;
      }
      accept_weight[s] += w;
    }
  }

  ProtocolOutcome out;
  std::array<double, 4> output{};
  const auto& probs = dist.probabilities();
  for (std::size_t f = 0; f < probs.size(); ++f) {
    if (probs[f] == 0.0) continue;
    out.total_probability += probs[f];
    std::size_t s = 0;
    for (int j = 0; j < m; ++j) {
      if (bell::labels_differ(dist.frame_of(f, measured[j].first), measured[j].second)) {
        s |= std::size_t{1} << j;
      }
    }
    const double w = probs[f] * accept_weight[s];
    out.success_probability += w;
    output[dist.frame_of(f, 0)] += w;
  }
  if (out.success_probability <= 0.0) return out;
  BellDiagonalState state;
  state.f = output[0] / out.success_probability;
  const double rest = output[1] + output[2] + output[3];
  if (rest > 0.0) {
    state.px = output[1] / rest;
    state.pz = output[2] / rest;
    state.py = output[3] / rest;
  }
  state.f = std::clamp(state.f, 0.0, 1.0);
  out.output_state = to_density_matrix(state);
  out.output_fidelity = state.f;
  out.success_probability = std::clamp(out.success_probability, 0.0, 1.0);
  return out;
}

bool inputs_bell_diagonal(std::span<const DensityMatrix> pairs) {
  return std::all_of(pairs.begin(), pairs.end(),
                     [](const DensityMatrix& s) { return bell_coherence(s) <= 1e-12; });
}

double shannon_bits(const std::vector<double>& p) {
  double h = 0.0;
  for (double x : p) {
    if (x > 1e-300) h -= x * std::log2(x);
  }
  return h;
}

}  // namespace

int PurificationCircuit::num_measurements() const {
  return static_cast<int>(std::count_if(ops.begin(), ops.end(), [](const Instruction& op) {
    return std::holds_alternative<MeasureOp>(op);
  }));
}

int qubit_index(int n_pairs, int pair, Side side) { return side == Side::A ? pair : n_pairs + pair; }

void validate(const PurificationCircuit& circuit) {
  if (circuit.n_pairs < PurificationCircuit::kMinPairs || circuit.n_pairs > PurificationCircuit::kMaxPairs) {
    std::ostringstream msg;
    msg << "n_pairs must lie in " << PurificationCircuit::kMinPairs << ".." << PurificationCircuit::kMaxPairs
        << ", got " << circuit.n_pairs;
    throw CircuitError(msg.str());
  }
  std::set<int> measured_qubits;
  std::set<std::string> labels;
  auto touch = [&](int pair, Side side) {
    if (measured_qubits.count(qubit_index(circuit.n_pairs, pair, side))) {
      throw CircuitError("pair " + std::to_string(pair) + " side " + side_name(side) +
                         " is used after being measured");
    }
  };
  for (const auto& op : circuit.ops) {
    std::visit(Overloaded{
                   [&](const TwoQubitGateOp& g) {
                     require_pair(circuit, g.control_pair, "control");
                     require_pair(circuit, g.target_pair, "target");
                     if (g.control_pair == g.target_pair) {
                       throw CircuitError("two-qubit gate control and target must differ");
                     }
                     touch(g.control_pair, g.side);
                     touch(g.target_pair, g.side);
                   },
                   [&](const CliffordOp& g) {
                     require_pair(circuit, g.pair, "clifford");
                     if (g.clifford_index < 0 || g.clifford_index >= kCliffordCount) {
                       throw CircuitError("clifford index must lie in 0..23");
                     }
                     touch(g.pair, g.side);
                   },
                   [&](const MeasureOp& m) {
                     require_pair(circuit, m.pair, "measure");
                     if (m.pair == PurificationCircuit::kOutputPair) {
                       throw CircuitError("the output pair must not be measured");
                     }
                     touch(m.pair, m.side);
                     if (m.label.empty()) throw CircuitError("measurement label must not be empty");
                     if (!labels.insert(m.label).second) {
                       throw CircuitError("measurement label '" + m.label + "' is produced twice");
                     }
                     measured_qubits.insert(qubit_index(circuit.n_pairs, m.pair, m.side));
                   },
               },
               op);
  }
  for (const auto& c : circuit.accept) {
    for (const auto* l : {&c.first, &c.second}) {
      if (!labels.count(*l)) throw CircuitError("accept constraint references unknown label '" + *l + "'");
    }
  }
}

bool bell_diagonal_applicable(const PurificationCircuit& circuit, std::span<const DensityMatrix> inputs) {
  const auto pairs = expand_inputs(circuit, inputs);
  return inputs_bell_diagonal(pairs) && bilateral_steps(circuit).has_value();
}

ProtocolOutcome simulate(const PurificationCircuit& circuit, std::span<const DensityMatrix> inputs,
                         const NoiseModel& noise, Engine engine) {
  validate(circuit);
  noise.validate();
  const auto pairs = expand_inputs(circuit, inputs);
  if (engine != Engine::dense) {
    auto steps = bilateral_steps(circuit);
    const bool usable = steps.has_value() && inputs_bell_diagonal(pairs);
    if (usable) return simulate_bell(circuit, pairs, *steps, noise);
    if (engine == Engine::bell_diagonal) {
      throw std::invalid_argument("Bell-diagonal engine needs Bell-diagonal inputs and bilateral steps");
    }
  }
  return simulate_dense(circuit, pairs, noise);
}

ProtocolOutcome simulate(const PurificationCircuit& circuit, const DensityMatrix& shared_input,
                         const NoiseModel& noise, Engine engine) {
  return simulate(circuit, std::span<const DensityMatrix>(&shared_input, 1), noise, engine);
}

std::pair<DensityMatrix, double> simulate_joint(const PurificationCircuit& circuit,
                                                std::span<const DensityMatrix> inputs,
                                                const NoiseModel& noise,
                                                std::span<const int> output_pairs) {
  validate(circuit);
  noise.validate();
  const auto pairs = expand_inputs(circuit, inputs);
  const int n = circuit.n_pairs;
  DenseRun run = run_dense(circuit, pairs, noise);

  std::vector<int> keep_original;
  for (int p : output_pairs) {
    if (p < 0 || p >= n) throw std::invalid_argument("output pair out of range");
    if (run.live[qubit_index(n, p, Side::A)] < 0 || run.live[qubit_index(n, p, Side::B)] < 0) {
      throw std::invalid_argument("output pair " + std::to_string(p) + " is measured by the circuit");
    }
  }
  for (Side side : {Side::A, Side::B}) {
    for (int p : output_pairs) keep_original.push_back(run.live[qubit_index(n, p, side)]);
  }

  double success = 0.0;
  DensityMatrix sum;
  bool have = false;
  for (const auto& b : run.branches) {
    if (!accepted(circuit, run.label_slot, b.labels)) continue;
    success += b.state.trace().real();
    if (!have) {
      sum = b.state;
      have = true;
    } else {
      sum += b.state;
    }
  }
  const int k = static_cast<int>(output_pairs.size());
  if (!have || success <= 0.0) return {DensityMatrix(2 * k), 0.0};
  DensityMatrix joint = reduce_ordered(sum, keep_original);
  joint *= 1.0 / success;
  return {std::move(joint), success};
}

bool MarginalEntanglementReport::any_flagged() const {
  return std::any_of(correlations.begin(), correlations.end(), [](const auto& c) { return c.flagged; });
}

MarginalEntanglementReport marginal_entanglement_check(const DensityMatrix& joint, int num_pairs,
                                                       double threshold) {
  if (joint.num_qubits() != 2 * num_pairs) {
    throw std::invalid_argument("joint state must hold 2 qubits per output pair");
  }
  MarginalEntanglementReport report;
  for (int i = 0; i < num_pairs; ++i) {
    for (int j = i + 1; j < num_pairs; ++j) {
      const DensityMatrix pi = partial_trace(joint, {i, num_pairs + i});
      const DensityMatrix pj = partial_trace(joint, {j, num_pairs + j});
      const DensityMatrix pij = partial_trace(joint, {i, j, num_pairs + i, num_pairs + j});
      PairCorrelation c{i, j};
      c.quantum_mutual_information = pi.entropy_bits() + pj.entropy_bits() - pij.entropy_bits();

      // Computational-basis outcome statistics. pij qubit order: A_i A_j B_i B_j.
      std::vector<double> p_joint(16), p_i(4, 0.0), p_j(4, 0.0);
      for (std::size_t idx = 0; idx < 16; ++idx) {
        const double p = std::max(0.0, pij(idx, idx).real());
        p_joint[idx] = p;
        const std::size_t oi = (((idx >> 3) & 1) << 1) | ((idx >> 1) & 1);
        const std::size_t oj = (((idx >> 2) & 1) << 1) | (idx & 1);
        p_i[oi] += p;
        p_j[oj] += p;
      }
      c.classical_mutual_information = shannon_bits(p_i) + shannon_bits(p_j) - shannon_bits(p_joint);
      c.flagged = c.quantum_mutual_information > threshold || c.classical_mutual_information > threshold;
      report.correlations.push_back(c);
    }
  }
  return report;
}

}  // namespace ionls
