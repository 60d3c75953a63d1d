#pragma once

#include "ionls/quantum_core.hpp"

#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace ionls {

enum class Side { A, B };
enum class TwoQubitKind { CNOT, CZ };
enum class Relation { coincident, anticoincident };

struct TwoQubitGateOp {
  TwoQubitKind kind = TwoQubitKind::CNOT;
  Side side = Side::A;
  int control_pair = 0;
  int target_pair = 1;
  friend bool operator==(const TwoQubitGateOp&, const TwoQubitGateOp&) = default;
};

struct CliffordOp {
  int pair = 0;
  Side side = Side::A;
  int clifford_index = 0;
  friend bool operator==(const CliffordOp&, const CliffordOp&) = default;
};

struct MeasureOp {
  int pair = 1;
  Side side = Side::A;
  PauliBasis basis = PauliBasis::Z;
  std::string label;
  friend bool operator==(const MeasureOp&, const MeasureOp&) = default;
};

using Instruction = std::variant<TwoQubitGateOp, CliffordOp, MeasureOp>;

struct AcceptConstraint {
  std::string first;
  std::string second;
  Relation relation = Relation::coincident;
  friend bool operator==(const AcceptConstraint&, const AcceptConstraint&) = default;
};

/// An n -> 1 purification protocol. Pair i occupies qubit i on side A and
/// qubit n_pairs + i on side B; pair 0 carries the output.
struct PurificationCircuit {
  static constexpr int kOutputPair = 0;
  static constexpr int kMinPairs = 2;
  static constexpr int kMaxPairs = 5;

  int n_pairs = 2;
  std::vector<Instruction> ops;
  std::vector<AcceptConstraint> accept;

  int num_measurements() const;
  friend bool operator==(const PurificationCircuit&, const PurificationCircuit&) = default;
};

class CircuitError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

int qubit_index(int n_pairs, int pair, Side side);

/// Throws CircuitError on the first violated invariant.
void validate(const PurificationCircuit& circuit);

struct ProtocolOutcome {
  double output_fidelity = 0.0;
  double success_probability = 0.0;
  DensityMatrix output_state{2};
  /// Sum over every reported-label branch, accepted or not. Equals 1 up to
  /// rounding; exposed so callers can check normalization.
  double total_probability = 0.0;
};

enum class Engine {
  automatic,      // Bell-diagonal when exact, dense otherwise
  dense,          // full density-matrix simulation
  bell_diagonal,  // Pauli-frame distribution; throws if not applicable
};

/// Exact noisy simulation. `inputs` holds either one 2-qubit state shared by
/// every pair or one state per pair.
ProtocolOutcome simulate(const PurificationCircuit& circuit, std::span<const DensityMatrix> inputs,
                         const NoiseModel& noise, Engine engine = Engine::automatic);
ProtocolOutcome simulate(const PurificationCircuit& circuit, const DensityMatrix& shared_input,
                         const NoiseModel& noise, Engine engine = Engine::automatic);

/// Whether the Bell-diagonal engine reproduces the dense result exactly for
/// this circuit and these inputs.
bool bell_diagonal_applicable(const PurificationCircuit& circuit,
                              std::span<const DensityMatrix> inputs);

/// Accepted, renormalized joint state of several unmeasured pairs, ordered
/// (A of each pair..., B of each pair...). success probability in `.second`.
std::pair<DensityMatrix, double> simulate_joint(const PurificationCircuit& circuit,
                                                std::span<const DensityMatrix> inputs,
                                                const NoiseModel& noise,
                                                std::span<const int> output_pairs);

struct PairCorrelation {
  int first_pair = 0;
  int second_pair = 0;
  double quantum_mutual_information = 0.0;  // bits
  double classical_mutual_information = 0.0;  // bits, computational-basis outcomes
  bool flagged = false;
};

struct MarginalEntanglementReport {
  std::vector<PairCorrelation> correlations;
  bool any_flagged() const;
};

/// Pairwise correlations between the output pairs of a multi-output protocol.
/// `joint` spans 2 * num_pairs qubits in the simulate_joint layout. A single
/// output pair yields an empty report.
MarginalEntanglementReport marginal_entanglement_check(const DensityMatrix& joint, int num_pairs,
                                                       double threshold = 1e-6);

// Circuit JSON interchange (docs/formats.md).
std::string circuit_to_json(const PurificationCircuit& circuit, int indent = 2);
PurificationCircuit circuit_from_json(const std::string& text);
PurificationCircuit load_circuit(const std::filesystem::path& path);
void save_circuit(const PurificationCircuit& circuit, const std::filesystem::path& path);

}  // namespace ionls
