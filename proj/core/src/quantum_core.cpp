#include "ionls/quantum_core.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ionls {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
const Complex kI{0.0, 1.0};

using Mat2 = std::array<Complex, 4>;

Mat2 mul(const Mat2& a, const Mat2& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
          a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

Mat2 dagger(const Mat2& a) {
  return {std::conj(a[0]), std::conj(a[2]), std::conj(a[1]), std::conj(a[3])};
}

const Mat2 kId{1.0, 0.0, 0.0, 1.0};
const Mat2 kPauliX{0.0, 1.0, 1.0, 0.0};
const Mat2 kPauliY{0.0, -kI, kI, 0.0};
const Mat2 kPauliZ{1.0, 0.0, 0.0, -1.0};
const Mat2 kHadamard{kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2};
const Mat2 kPhaseS{1.0, 0.0, 0.0, kI};

// True when a == c * b for some unit-modulus c.
bool equal_up_to_phase(const Mat2& a, const Mat2& b) {
  Complex phase{0.0, 0.0};
  for (int k = 0; k < 4; ++k) {
    if (std::abs(b[k]) > 1e-9) {
      phase = a[k] / b[k];
      break;
    }
  }
  if (std::abs(std::abs(phase) - 1.0) > 1e-9) return false;
  for (int k = 0; k < 4; ++k) {
    if (std::abs(a[k] - phase * b[k]) > 1e-9) return false;
  }
  return true;
}

const std::array<Mat2, kCliffordCount>& clifford_table() {
  static const std::array<Mat2, kCliffordCount> table = [] {
    const std::array<Mat2, 4> paulis{kId, kPauliX, kPauliY, kPauliZ};
    const std::array<Mat2, 6> cosets{kId,
                                     kHadamard,
                                     kPhaseS,
                                     mul(kHadamard, kPhaseS),
                                     mul(kPhaseS, kHadamard),
                                     mul(mul(kHadamard, kPhaseS), kHadamard)};
    std::array<Mat2, kCliffordCount> out{};
    for (int c = 0; c < 6; ++c) {
      for (int p = 0; p < 4; ++p) out[4 * c + p] = mul(paulis[p], cosets[c]);
    }
    return out;
  }();
  return table;
}

std::size_t bit_of(int num_qubits, int qubit) {
  return std::size_t{1} << (num_qubits - 1 - qubit);
}

void check_qubit(const DensityMatrix& state, int qubit) {
  if (qubit < 0 || qubit >= state.num_qubits()) {
    std::ostringstream msg;
    msg << "qubit index " << qubit << " out of range for " << state.num_qubits() << "-qubit state";
    throw std::out_of_range(msg.str());
  }
}

void check_two_qubit(const DensityMatrix& state, int a, int b) {
  check_qubit(state, a);
  check_qubit(state, b);
  if (a == b) throw std::invalid_argument("two-qubit gate targets must be distinct");
}

Eigen::MatrixXcd to_eigen(const DensityMatrix& state) {
  const auto dim = static_cast<Eigen::Index>(state.dim());
  Eigen::MatrixXcd m(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) m(r, c) = state(r, c);
  }
  return m;
}

Eigen::VectorXd eigenvalues(const DensityMatrix& state) {
  // Hermitian part only; measured data carries tiny anti-Hermitian noise.
  Eigen::MatrixXcd m = to_eigen(state);
  Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

std::array<std::array<Complex, 4>, 4> bell_vectors() {
  const double s = kInvSqrt2;
  // phi+, psi+, phi-, psi- in basis |00>,|01>,|10>,|11>.
  return {{{s, 0.0, 0.0, s}, {0.0, s, s, 0.0}, {s, 0.0, 0.0, -s}, {0.0, s, -s, 0.0}}};
}

int bell_slot(BellKind kind) {
  switch (kind) {
    case BellKind::phi_plus: return 0;
    case BellKind::psi_plus: return 1;
    case BellKind::phi_minus: return 2;
    case BellKind::psi_minus: return 3;
  }
  return 0;
}

Complex bell_element(const DensityMatrix& state, const std::array<Complex, 4>& u,
                     const std::array<Complex, 4>& v) {
  Complex acc{0.0, 0.0};
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t c = 0; c < 4; ++c) acc += std::conj(u[r]) * state(r, c) * v[c];
  }
  return acc;
}

void require_two_qubits(const DensityMatrix& state, const char* what) {
  if (state.num_qubits() != 2) {
    throw std::invalid_argument(std::string(what) + " requires a 2-qubit state");
  }
}

// Rotation taking the eigenbasis of `basis` onto the computational basis.
Mat2 basis_rotation(PauliBasis basis) {
  switch (basis) {
    case PauliBasis::X: return kHadamard;
    case PauliBasis::Y: return mul(kHadamard, dagger(kPhaseS));
    case PauliBasis::Z: return kId;
  }
  return kId;
}

}  // namespace

std::string to_string(BellKind kind) {
  switch (kind) {
    case BellKind::phi_plus: return "phi_plus";
    case BellKind::phi_minus: return "phi_minus";
    case BellKind::psi_plus: return "psi_plus";
    case BellKind::psi_minus: return "psi_minus";
  }
  return "?";
}

std::string to_string(PauliBasis basis) {
  switch (basis) {
    case PauliBasis::X: return "X";
    case PauliBasis::Y: return "Y";
    case PauliBasis::Z: return "Z";
  }
  return "?";
}

PauliBasis parse_basis(const std::string& text) {
  if (text == "X" || text == "x") return PauliBasis::X;
  if (text == "Y" || text == "y") return PauliBasis::Y;
  if (text == "Z" || text == "z") return PauliBasis::Z;
  throw std::invalid_argument("unknown measurement basis '" + text + "'");
}

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(int num_qubits) : num_qubits_(num_qubits) {
  if (num_qubits < 0 || num_qubits > kMaxQubits) {
    std::ostringstream msg;
    msg << "density matrix of " << num_qubits << " qubits exceeds the supported range 0.."
        << kMaxQubits;
    throw std::invalid_argument(msg.str());
  }
  dim_ = std::size_t{1} << num_qubits;
  data_.assign(dim_ * dim_, Complex{0.0, 0.0});
}

DensityMatrix DensityMatrix::from_rows(std::initializer_list<std::initializer_list<Complex>> rows) {
  const std::size_t dim = rows.size();
  if (dim == 0 || !std::has_single_bit(dim)) {
    throw std::invalid_argument("density matrix dimension must be a power of two");
  }
  std::vector<Complex> entries;
  entries.reserve(dim * dim);
  for (const auto& row : rows) {
    if (row.size() != dim) throw std::invalid_argument("density matrix must be square");
    entries.insert(entries.end(), row.begin(), row.end());
  }
  return from_entries(std::countr_zero(dim), std::move(entries));
}

DensityMatrix DensityMatrix::from_entries(int num_qubits, std::vector<Complex> entries) {
  DensityMatrix out(num_qubits);
  if (entries.size() != out.data_.size()) {
    throw std::invalid_argument("entry count does not match 4^num_qubits");
  }
  out.data_ = std::move(entries);
  return out;
}

DensityMatrix DensityMatrix::basis_state(int num_qubits, std::uint64_t index) {
  DensityMatrix out(num_qubits);
  if (index >= out.dim_) throw std::out_of_range("basis state index out of range");
  out(index, index) = 1.0;
  return out;
}

DensityMatrix DensityMatrix::maximally_mixed(int num_qubits) {
  DensityMatrix out(num_qubits);
  const double w = 1.0 / static_cast<double>(out.dim_);
  for (std::size_t i = 0; i < out.dim_; ++i) out(i, i) = w;
  return out;
}

Complex DensityMatrix::trace() const {
  Complex acc{0.0, 0.0};
  for (std::size_t i = 0; i < dim_; ++i) acc += (*this)(i, i);
  return acc;
}

double DensityMatrix::hermiticity_error() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = i; j < dim_; ++j) {
      worst = std::max(worst, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
    }
  }
  return worst;
}

double DensityMatrix::min_eigenvalue() const { return eigenvalues(*this).minCoeff(); }

double DensityMatrix::entropy_bits() const {
  double s = 0.0;
  for (double lambda : eigenvalues(*this)) {
    if (lambda > 1e-15) s -= lambda * std::log2(lambda);
  }
  return s;
}

double DensityMatrix::max_abs_diff(const DensityMatrix& other) const {
  if (other.dim_ != dim_) throw std::invalid_argument("dimension mismatch");
  double worst = 0.0;
  for (std::size_t k = 0; k < data_.size(); ++k) {
    worst = std::max(worst, std::abs(data_[k] - other.data_[k]));
  }
  return worst;
}

DensityMatrix& DensityMatrix::operator+=(const DensityMatrix& other) {
  if (other.dim_ != dim_) throw std::invalid_argument("dimension mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

DensityMatrix& DensityMatrix::operator*=(double scale) {
  for (auto& x : data_) x *= scale;
  return *this;
}

std::string check_state(const DensityMatrix& state, const StateTolerances& tol) {
  std::ostringstream msg;
  if (const double h = state.hermiticity_error(); h > tol.hermiticity) {
    msg << "not Hermitian (max deviation " << h << ")";
    return msg.str();
  }
  if (const double t = std::abs(state.trace() - 1.0); t > tol.trace) {
    msg << "trace deviates from 1 by " << t;
    return msg.str();
  }
  if (const double m = state.min_eigenvalue(); m < tol.min_eigenvalue) {
    msg << "not positive semidefinite (min eigenvalue " << m << ")";
    return msg.str();
  }
  return {};
}

// ---------------------------------------------------------------------------
// Bell-diagonal states and noise parameters

std::array<double, 4> BellDiagonalState::weights() const {
  const double rest = 1.0 - f;
  return {f, rest * px, rest * pz, rest * py};
}

void BellDiagonalState::validate() const {
  for (double w : {f, px, pz, py}) {
    if (!(w >= 0.0 && w <= 1.0)) throw std::invalid_argument("Bell-diagonal weight outside [0, 1]");
  }
  if (std::abs(px + py + pz - 1.0) > 1e-12) {
    throw std::invalid_argument("Bell-diagonal remainder weights must sum to 1");
  }
}

DensityMatrix to_density_matrix(const BellDiagonalState& state) {
  state.validate();
  const auto w = state.weights();
  // weights() is ordered phi+, psi+, phi-, psi- to match bell_vectors().
  const auto vecs = bell_vectors();
  DensityMatrix out(2);
  for (int k = 0; k < 4; ++k) {
    for (std::size_t r = 0; r < 4; ++r) {
      for (std::size_t c = 0; c < 4; ++c) out(r, c) += w[k] * vecs[k][r] * std::conj(vecs[k][c]);
    }
  }
  return out;
}

void NoiseModel::validate() const {
  for (double p : {p1, p2, p_meas}) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("noise probability outside [0, 1]");
  }
}

// ---------------------------------------------------------------------------
// Gates

std::array<Complex, 4> clifford_matrix(int index) {
  if (index < 0 || index >= kCliffordCount) throw std::out_of_range("Clifford index out of range");
  return clifford_table()[index];
}

int clifford_conjugate(int index) {
  static const std::array<int, kCliffordCount> conj_index = [] {
    std::array<int, kCliffordCount> out{};
    const auto& table = clifford_table();
    for (int i = 0; i < kCliffordCount; ++i) {
      Mat2 c = table[i];
      for (auto& x : c) x = std::conj(x);
      out[i] = -1;
      for (int j = 0; j < kCliffordCount; ++j) {
        if (equal_up_to_phase(c, table[j])) out[i] = j;
      }
    }
    return out;
  }();
  if (index < 0 || index >= kCliffordCount) throw std::out_of_range("Clifford index out of range");
  return conj_index[index];
}

void apply_unitary_inplace(DensityMatrix& state, const std::array<Complex, 4>& u, int qubit) {
  check_qubit(state, qubit);
  const std::size_t dim = state.dim();
  const std::size_t bit = bit_of(state.num_qubits(), qubit);
  auto data = state.entries();
  // rho <- U rho
  for (std::size_t i0 = 0; i0 < dim; ++i0) {
    if (i0 & bit) continue;
    Complex* r0 = &data[i0 * dim];
    Complex* r1 = &data[(i0 | bit) * dim];
    for (std::size_t c = 0; c < dim; ++c) {
      const Complex a = r0[c];
      const Complex b = r1[c];
      r0[c] = u[0] * a + u[1] * b;
      r1[c] = u[2] * a + u[3] * b;
    }
  }
  // rho <- rho U^dagger
  const Complex d00 = std::conj(u[0]), d01 = std::conj(u[1]);
  const Complex d10 = std::conj(u[2]), d11 = std::conj(u[3]);
  for (std::size_t r = 0; r < dim; ++r) {
    Complex* row = &data[r * dim];
    for (std::size_t j0 = 0; j0 < dim; ++j0) {
      if (j0 & bit) continue;
      const Complex a = row[j0];
      const Complex b = row[j0 | bit];
      row[j0] = a * d00 + b * d01;
      row[j0 | bit] = a * d10 + b * d11;
    }
  }
}

void apply_gate_inplace(DensityMatrix& state, Gate gate, std::span<const int> targets) {
  if (static_cast<int>(targets.size()) != gate.arity()) {
    throw std::invalid_argument("gate arity does not match target count");
  }
  switch (gate.kind) {
    case GateKind::X: apply_unitary_inplace(state, kPauliX, targets[0]); return;
    case GateKind::Y: apply_unitary_inplace(state, kPauliY, targets[0]); return;
    case GateKind::Z: apply_unitary_inplace(state, kPauliZ, targets[0]); return;
    case GateKind::H: apply_unitary_inplace(state, kHadamard, targets[0]); return;
    case GateKind::S: apply_unitary_inplace(state, kPhaseS, targets[0]); return;
    case GateKind::Clifford:
      if (gate.clifford_index == 0) {
        check_qubit(state, targets[0]);
        return;
      }
      apply_unitary_inplace(state, clifford_matrix(gate.clifford_index), targets[0]);
      return;
    case GateKind::CNOT:
    case GateKind::CZ: break;
  }

  check_two_qubit(state, targets[0], targets[1]);
  const std::size_t dim = state.dim();
  const std::size_t cbit = bit_of(state.num_qubits(), targets[0]);
  const std::size_t tbit = bit_of(state.num_qubits(), targets[1]);
  auto data = state.entries();
  if (gate.kind == GateKind::CZ) {
    for (std::size_t i = 0; i < dim; ++i) {
      const bool si = (i & cbit) && (i & tbit);
      for (std::size_t j = 0; j < dim; ++j) {
        const bool sj = (j & cbit) && (j & tbit);
        if (si != sj) data[i * dim + j] = -data[i * dim + j];
      }
    }
    return;
  }
  // CNOT is a self-inverse permutation pi; rho'[i][j] = rho[pi(i)][pi(j)].
  // Rows and columns are swapped in place, each pair once.
  for (std::size_t i = 0; i < dim; ++i) {
    if ((i & cbit) && (i & tbit)) std::swap_ranges(&data[i * dim], &data[i * dim] + dim, &data[(i ^ tbit) * dim]);
  }
  for (std::size_t i = 0; i < dim; ++i) {
    Complex* row = &data[i * dim];
    for (std::size_t j = 0; j < dim; ++j) {
      if ((j & cbit) && (j & tbit)) std::swap(row[j], row[j ^ tbit]);
    }
  }
}

void depolarize_inplace(DensityMatrix& state, std::span<const int> targets, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("depolarizing probability outside [0, 1]");
  if (targets.size() != 1 && targets.size() != 2) {
    throw std::invalid_argument("depolarizing channel acts on one or two qubits");
  }
  for (int t : targets) check_qubit(state, t);
  if (targets.size() == 2 && targets[0] == targets[1]) {
    throw std::invalid_argument("depolarizing targets must be distinct");
  }
  if (p == 0.0) return;

  // Uniform Pauli noise on a d-dimensional subsystem S equals
  // (1 - q) rho + q Tr_S(rho) (x) I/d with q = p d^2 / (d^2 - 1).
  std::size_t mask = 0;
  for (int t : targets) mask |= bit_of(state.num_qubits(), t);
  const double d = targets.size() == 1 ? 2.0 : 4.0;
  const double q = p * d * d / (d * d - 1.0);

  std::vector<std::size_t> local;  // every assignment of the target bits
  for (std::size_t s = mask;; s = (s - 1) & mask) {
    local.push_back(s);
    if (s == 0) break;
  }

  const std::size_t dim = state.dim();
  auto data = state.entries();
  for (std::size_t i = 0; i < dim; ++i) {
    if (i & mask) continue;
    for (std::size_t j = 0; j < dim; ++j) {
      if (j & mask) continue;
      Complex trace = 0.0;
      for (std::size_t s : local) trace += data[(i | s) * dim + (j | s)];
      const Complex mixed = trace * (q / d);
      for (std::size_t a : local) {
        for (std::size_t b : local) {
          Complex& x = data[(i | a) * dim + (j | b)];
          x *= (1.0 - q);
          if (a == b) x += mixed;
        }
      }
    }
  }
}

DensityMatrix apply_gate(const DensityMatrix& state, Gate gate, std::span<const int> targets) {
  DensityMatrix out = state;
  apply_gate_inplace(out, gate, targets);
  return out;
}

DensityMatrix apply_gate(const DensityMatrix& state, Gate gate, std::initializer_list<int> targets) {
  return apply_gate(state, gate, std::span<const int>(targets.begin(), targets.size()));
}

DensityMatrix depolarize(const DensityMatrix& state, std::span<const int> targets, double p) {
  DensityMatrix out = state;
  depolarize_inplace(out, targets, p);
  return out;
}

DensityMatrix depolarize(const DensityMatrix& state, std::initializer_list<int> targets, double p) {
  return depolarize(state, std::span<const int>(targets.begin(), targets.size()), p);
}

// ---------------------------------------------------------------------------
// Measurement and reduction

std::array<MeasurementBranch, 2> measure_branches(const DensityMatrix& state, int qubit,
                                                  PauliBasis basis, double p_meas) {
  check_qubit(state, qubit);
  if (!(p_meas >= 0.0 && p_meas <= 1.0)) {
    throw std::invalid_argument("measurement error probability outside [0, 1]");
  }
  const Mat2 rot = basis_rotation(basis);
  DensityMatrix rotated = state;
  if (basis != PauliBasis::Z) apply_unitary_inplace(rotated, rot, qubit);

  const std::size_t dim = state.dim();
  const std::size_t bit = bit_of(state.num_qubits(), qubit);
  std::array<DensityMatrix, 2> projected{DensityMatrix(state.num_qubits()),
                                         DensityMatrix(state.num_qubits())};
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      if (((i & bit) != 0) != ((j & bit) != 0)) continue;
      projected[(i & bit) ? 1 : 0](i, j) = rotated(i, j);
    }
  }
  std::array<MeasurementBranch, 2> out;
  for (int b = 0; b < 2; ++b) {
    DensityMatrix mixed = (1.0 - p_meas) * projected[b] + p_meas * projected[1 - b];
    if (basis != PauliBasis::Z) apply_unitary_inplace(mixed, dagger(rot), qubit);
    const double prob = std::max(0.0, mixed.trace().real());
    if (prob > 0.0) mixed *= 1.0 / prob;
    out[b] = {prob, std::move(mixed)};
  }
  return out;
}

std::array<DensityMatrix, 2> measure_and_discard(const DensityMatrix& state, int qubit,
                                                 PauliBasis basis, double p_meas) {
  check_qubit(state, qubit);
  // Outcome b keeps <b| U rho U^dagger |b> on the measured qubit, with U the
  // basis rotation; only row b of U is needed.
  const auto u = basis == PauliBasis::Z ? std::array<Complex, 4>{1.0, 0.0, 0.0, 1.0} : basis_rotation(basis);
  const int n = state.num_qubits();
  const std::size_t bit = bit_of(n, qubit);
  const std::size_t low_mask = bit - 1;
  std::array<DensityMatrix, 2> reduced{DensityMatrix(n - 1), DensityMatrix(n - 1)};
  const std::size_t rdim = reduced[0].dim();
  auto expand = [&](std::size_t r) { return ((r & ~low_mask) << 1) | (r & low_mask); };
  for (std::size_t b = 0; b < 2; ++b) {
    const Complex u0 = u[2 * b], u1 = u[2 * b + 1];
    const Complex w00 = u0 * std::conj(u0), w01 = u0 * std::conj(u1);
    const Complex w10 = u1 * std::conj(u0), w11 = u1 * std::conj(u1);
    for (std::size_t i = 0; i < rdim; ++i) {
      const std::size_t fi = expand(i);
      const Complex* r0 = &state.entries()[fi * state.dim()];
      const Complex* r1 = &state.entries()[(fi | bit) * state.dim()];
      for (std::size_t j = 0; j < rdim; ++j) {
        const std::size_t fj = expand(j);
        reduced[b](i, j) = w00 * r0[fj] + w01 * r0[fj | bit] + w10 * r1[fj] + w11 * r1[fj | bit];
      }
    }
  }
  if (p_meas == 0.0) return reduced;
  std::array<DensityMatrix, 2> out{(1.0 - p_meas) * reduced[0] + p_meas * reduced[1],
                                   (1.0 - p_meas) * reduced[1] + p_meas * reduced[0]};
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& state, std::span<const int> keep) {
  if (keep.empty()) throw std::invalid_argument("partial_trace needs at least one kept qubit");
  const int n = state.num_qubits();
  for (std::size_t k = 0; k < keep.size(); ++k) {
    check_qubit(state, keep[k]);
    if (k > 0 && keep[k] <= keep[k - 1]) {
      throw std::invalid_argument("kept qubits must be sorted and distinct");
    }
  }
  std::vector<int> traced;
  for (int q = 0; q < n; ++q) {
    if (std::find(keep.begin(), keep.end(), q) == keep.end()) traced.push_back(q);
  }
  const int kept = static_cast<int>(keep.size());
  auto compose = [&](std::size_t kept_bits, std::size_t traced_bits) {
    std::size_t full = 0;
    for (int k = 0; k < kept; ++k) {
      if (kept_bits & (std::size_t{1} << (kept - 1 - k))) full |= bit_of(n, keep[k]);
    }
    const int t_count = static_cast<int>(traced.size());
    for (int k = 0; k < t_count; ++k) {
      if (traced_bits & (std::size_t{1} << (t_count - 1 - k))) full |= bit_of(n, traced[k]);
    }
    return full;
  };
  DensityMatrix out(kept);
  const std::size_t odim = out.dim();
  const std::size_t tdim = std::size_t{1} << traced.size();
  for (std::size_t t = 0; t < tdim; ++t) {
    for (std::size_t r = 0; r < odim; ++r) {
      const std::size_t fr = compose(r, t);
      for (std::size_t c = 0; c < odim; ++c) out(r, c) += state(fr, compose(c, t));
    }
  }
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& state, std::initializer_list<int> keep) {
  return partial_trace(state, std::span<const int>(keep.begin(), keep.size()));
}

// ---------------------------------------------------------------------------
// Bell-basis utilities

DensityMatrix bell_state(BellKind kind) {
  const auto v = bell_vectors()[bell_slot(kind)];
  DensityMatrix out(2);
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t c = 0; c < 4; ++c) out(r, c) = v[r] * std::conj(v[c]);
  }
  return out;
}

DensityMatrix stephenson_pair(bool rotated) {
  using C = Complex;
  if (!rotated) {
    return DensityMatrix::from_rows({
        {C{0.01, 0.0}, C{-0.00487616, 0.00349614}, C{0.0135924, 0.00634402}, C{0.00374015, -0.00331833}},
        {C{-0.00487616, -0.00349614}, C{0.569, 0.0}, C{0.0542638, 0.440672}, C{-0.012985, -0.0292471}},
        {C{0.0135924, -0.00634402}, C{0.0542638, -0.440672}, C{0.416, 0.0}, C{-0.0225074, -0.00473484}},
        {C{0.00374015, 0.00331833}, C{-0.012985, 0.0292471}, C{-0.0225074, 0.00473484}, C{0.005, 0.0}},
    });
  }
  return DensityMatrix::from_rows({
      {C{0.569, 0.0}, C{-0.00487616, -0.00349614}, C{-0.0292471, 0.012985}, C{0.440672, -0.0542638}},
      {C{-0.00487616, 0.00349614}, C{0.01, 0.0}, C{-0.00331833, -0.00374015}, C{0.00634402, -0.0135924}},
      {C{-0.0292471, -0.012985}, C{-0.00331833, 0.00374015}, C{0.005, 0.0}, C{-0.0225074, 0.00473484}},
      {C{0.440672, 0.0542638}, C{0.00634402, 0.0135924}, C{-0.0225074, -0.00473484}, C{0.416, 0.0}},
  });
}

double fidelity_to_bell(const DensityMatrix& state, BellKind kind) {
  require_two_qubits(state, "fidelity_to_bell");
  const auto v = bell_vectors()[bell_slot(kind)];
  return bell_element(state, v, v).real();
}

std::array<double, 4> bell_weights(const DensityMatrix& state) {
  require_two_qubits(state, "bell_weights");
  const auto vecs = bell_vectors();
  std::array<double, 4> out{};
  for (int k = 0; k < 4; ++k) out[k] = bell_element(state, vecs[k], vecs[k]).real();
  return out;
}

double bell_coherence(const DensityMatrix& state) {
  require_two_qubits(state, "bell_coherence");
  const auto vecs = bell_vectors();
  double worst = 0.0;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      if (a != b) worst = std::max(worst, std::abs(bell_element(state, vecs[a], vecs[b])));
    }
  }
  return worst;
}

BellDiagonalState twirl(const DensityMatrix& state) {
  const auto w = bell_weights(state);
  BellDiagonalState out;
  out.f = w[0];
  const double rest = w[1] + w[2] + w[3];
  if (rest > 1e-300) {
    out.px = w[1] / rest;
    out.pz = w[2] / rest;
    out.py = w[3] / rest;
  }
  return out;
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  const int n = a.num_qubits() + b.num_qubits();
  if (n > kMaxQubits) {
    std::ostringstream msg;
    msg << "tensor product of " << n << " qubits exceeds the " << kMaxQubits << "-qubit limit";
    throw std::invalid_argument(msg.str());
  }
  DensityMatrix out(n);
  const std::size_t bd = b.dim();
  for (std::size_t ar = 0; ar < a.dim(); ++ar) {
    for (std::size_t ac = 0; ac < a.dim(); ++ac) {
      const Complex x = a(ar, ac);
      if (x == Complex{}) continue;
      for (std::size_t br = 0; br < bd; ++br) {
        for (std::size_t bc = 0; bc < bd; ++bc) out(ar * bd + br, ac * bd + bc) = x * b(br, bc);
      }
    }
  }
  return out;
}

}  // namespace ionls
