#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace ionls {

using Complex = std::complex<double>;

// Purification circuits use at most five pairs, i.e. ten qubits.
inline constexpr int kMaxQubits = 10;

enum class BellKind { phi_plus, phi_minus, psi_plus, psi_minus };
enum class PauliBasis { X, Y, Z };

std::string to_string(BellKind kind);
std::string to_string(PauliBasis basis);
PauliBasis parse_basis(const std::string& text);

/// Dense mixed state of up to kMaxQubits qubits.
///
/// Entries are stored row-major in the computational basis |q0 q1 ... q_{n-1}>
/// with q0 the most significant bit. Intermediate results inside the
/// simulators may be unnormalized (branch weights live in the trace), so the
/// class does not enforce unit trace; `check_state` does.
class DensityMatrix {
 public:
  DensityMatrix() = default;
  explicit DensityMatrix(int num_qubits);

  /// Builds a state from explicit rows; throws std::invalid_argument when the
  /// shape is not 2^n x 2^n.
  static DensityMatrix from_rows(std::initializer_list<std::initializer_list<Complex>> rows);
  static DensityMatrix from_entries(int num_qubits, std::vector<Complex> entries);
  static DensityMatrix basis_state(int num_qubits, std::uint64_t index);
  static DensityMatrix maximally_mixed(int num_qubits);

  int num_qubits() const { return num_qubits_; }
  std::size_t dim() const { return dim_; }

  Complex operator()(std::size_t row, std::size_t col) const { return data_[row * dim_ + col]; }
  Complex& operator()(std::size_t row, std::size_t col) { return data_[row * dim_ + col]; }

  std::span<const Complex> entries() const { return data_; }
  std::span<Complex> entries() { return data_; }

  Complex trace() const;
  double hermiticity_error() const;
  double min_eigenvalue() const;
  /// Von Neumann entropy in bits; eigenvalues below 1e-15 are ignored.
  double entropy_bits() const;
  double max_abs_diff(const DensityMatrix& other) const;

  DensityMatrix& operator+=(const DensityMatrix& other);
  DensityMatrix& operator*=(double scale);

  friend DensityMatrix operator+(DensityMatrix a, const DensityMatrix& b) { return a += b; }
  friend DensityMatrix operator*(double s, DensityMatrix a) { return a *= s; }
  friend bool operator==(const DensityMatrix&, const DensityMatrix&) = default;

 private:
  int num_qubits_ = 0;
  std::size_t dim_ = 0;
  std::vector<Complex> data_;
};

struct StateTolerances {
  double hermiticity = 1e-10;
  double trace = 1e-9;
  double min_eigenvalue = -1e-7;
};

/// Empty string when every invariant holds, otherwise a description of the
/// first violation.
std::string check_state(const DensityMatrix& state, const StateTolerances& tol = {});

/// Weight on phi+ plus the split of the remaining weight over the other three
/// Bell states.
struct BellDiagonalState {
  double f = 1.0;
  double px = 1.0 / 3.0;  // psi+
  double pz = 1.0 / 3.0;  // phi-
  double py = 1.0 / 3.0;  // psi-

  static BellDiagonalState werner(double fidelity) { return {fidelity, 1.0 / 3, 1.0 / 3, 1.0 / 3}; }

  /// Absolute weights in the order phi+, psi+, phi-, psi-.
  std::array<double, 4> weights() const;
  void validate() const;
};

DensityMatrix to_density_matrix(const BellDiagonalState& state);

struct NoiseModel {
  double p1 = 0.0;      // single-qubit depolarizing, per gate
  double p2 = 0.0;      // two-qubit depolarizing, per gate
  double p_meas = 0.0;  // classical bitflip on each measurement record

  static NoiseModel none() { return {}; }
  static NoiseModel paper() { return {1e-5, 5e-5, 1e-5}; }
  void validate() const;
  friend bool operator==(const NoiseModel&, const NoiseModel&) = default;
};

enum class GateKind { X, Y, Z, H, S, CNOT, CZ, Clifford };

struct Gate {
  GateKind kind = GateKind::X;
  int clifford_index = 0;

  static Gate clifford(int index) { return {GateKind::Clifford, index}; }
  int arity() const { return kind == GateKind::CNOT || kind == GateKind::CZ ? 2 : 1; }
};

inline constexpr int kCliffordCount = 24;

/// Single-qubit Clifford number `index` as a row-major 2x2 unitary.
///
/// index = 4 * coset + pauli, unitary = P[pauli] * C[coset] with
/// P = (I, X, Y, Z) and C = (I, H, S, HS, SH, HSH). Index 0 is the identity.
std::array<Complex, 4> clifford_matrix(int index);

/// Index of the Clifford equal (up to global phase) to the complex conjugate
/// of `index`. U (x) conj(U) leaves phi+ invariant.
int clifford_conjugate(int index);

DensityMatrix bell_state(BellKind kind);

/// Experimentally measured ion-ion pair. The unrotated matrix is the raw
/// detection-event state; the rotated one is the phi+-aligned version used as
/// purification input.
DensityMatrix stephenson_pair(bool rotated);

// In-place kernels. The free functions below are pure wrappers.
void apply_gate_inplace(DensityMatrix& state, Gate gate, std::span<const int> targets);
void apply_unitary_inplace(DensityMatrix& state, const std::array<Complex, 4>& u, int qubit);
void depolarize_inplace(DensityMatrix& state, std::span<const int> targets, double p);

DensityMatrix apply_gate(const DensityMatrix& state, Gate gate, std::span<const int> targets);
DensityMatrix apply_gate(const DensityMatrix& state, Gate gate, std::initializer_list<int> targets);
DensityMatrix depolarize(const DensityMatrix& state, std::span<const int> targets, double p);
DensityMatrix depolarize(const DensityMatrix& state, std::initializer_list<int> targets, double p);

struct MeasurementBranch {
  double probability = 0.0;
  DensityMatrix state;  // normalized when probability > 0, zero otherwise
};

/// Both outcomes of measuring `qubit` in `basis`. Branch b carries the
/// reported label b, i.e. the ideal outcome b with probability 1 - p_meas and
/// the flipped outcome with probability p_meas.
std::array<MeasurementBranch, 2> measure_branches(const DensityMatrix& state, int qubit,
                                                  PauliBasis basis, double p_meas);

/// Unnormalized reduced states for reported labels 0 and 1 with the measured
/// qubit traced out. Used by the circuit simulator.
std::array<DensityMatrix, 2> measure_and_discard(const DensityMatrix& state, int qubit,
                                                 PauliBasis basis, double p_meas);

DensityMatrix partial_trace(const DensityMatrix& state, std::span<const int> keep);
DensityMatrix partial_trace(const DensityMatrix& state, std::initializer_list<int> keep);

double fidelity_to_bell(const DensityMatrix& state, BellKind kind);

/// Bell-basis populations in the order phi+, psi+, phi-, psi-.
std::array<double, 4> bell_weights(const DensityMatrix& state);

/// Largest magnitude of a Bell-basis off-diagonal element.
double bell_coherence(const DensityMatrix& state);

BellDiagonalState twirl(const DensityMatrix& state);

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);

}  // namespace ionls
