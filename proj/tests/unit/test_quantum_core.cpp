#include "ionls/quantum_core.hpp"

#include <doctest.h>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <random>

using namespace ionls;
using Mat = Eigen::MatrixXcd;

namespace {

Mat to_eigen(const DensityMatrix& rho) {
  Mat m(rho.dim(), rho.dim());
  for (std::size_t i = 0; i < rho.dim(); ++i)
    for (std::size_t j = 0; j < rho.dim(); ++j) m(i, j) = rho(i, j);
  return m;
}

double diff(const DensityMatrix& a, const Mat& b) { return (to_eigen(a) - b).cwiseAbs().maxCoeff(); }

Mat pauli(int k) {
  Mat p(2, 2);
  const Complex i{0.0, 1.0};
  switch (k) {
    case 0: p << 1, 0, 0, 1; break;
    case 1: p << 0, 1, 1, 0; break;
    case 2: p << 0, -i, i, 0; break;
    default: p << 1, 0, 0, -1;
  }
  return p;
}

Mat from_array(const std::array<Complex, 4>& u) {
  Mat m(2, 2);
  m << u[0], u[1], u[2], u[3];
  return m;
}

// Single-qubit operator `u` on `qubit` of an n-qubit register, qubit 0 leftmost.
Mat embed(const Mat& u, int qubit, int n) {
  Mat out = Mat::Identity(1, 1);
  for (int q = 0; q < n; ++q) {
    const Mat f = q == qubit ? u : Mat::Identity(2, 2);
    out = Eigen::kroneckerProduct(out, f).eval();
  }
  return out;
}

DensityMatrix random_state(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  const std::size_t d = std::size_t{1} << n;
  Mat a(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) a(i, j) = Complex{g(rng), g(rng)};
  Mat rho = a * a.adjoint();
  rho /= rho.trace();
  std::vector<Complex> e(d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) e[i * d + j] = rho(i, j);
  return DensityMatrix::from_entries(n, e);
}

}  // namespace

TEST_CASE("bell states are valid and orthogonal") {
  for (auto k : {BellKind::phi_plus, BellKind::phi_minus, BellKind::psi_plus, BellKind::psi_minus}) {
    const auto rho = bell_state(k);
    CHECK(check_state(rho).empty());
    CHECK(fidelity_to_bell(rho, k) == doctest::Approx(1.0).epsilon(1e-14));
    double total = 0.0;
    for (double w : bell_weights(rho)) total += w;
    CHECK(total == doctest::Approx(1.0));
  }
  CHECK(fidelity_to_bell(bell_state(BellKind::phi_plus), BellKind::psi_minus) == doctest::Approx(0.0));
}

TEST_CASE("check_state rejects broken matrices") {
  auto rho = bell_state(BellKind::phi_plus);
  rho(0, 3) = Complex{0.5, 0.1};
  CHECK_FALSE(check_state(rho).empty());
  CHECK_FALSE(check_state(2.0 * bell_state(BellKind::phi_plus)).empty());
  CHECK_THROWS_AS(DensityMatrix(kMaxQubits + 1), std::invalid_argument);
  CHECK_THROWS_AS(DensityMatrix::from_rows({{1.0, 0.0, 0.0}}), std::invalid_argument);
}

TEST_CASE("Clifford table: 24 distinct unitaries, identity first") {
  CHECK((from_array(clifford_matrix(0)) - Mat::Identity(2, 2)).norm() < 1e-14);
  for (int a = 0; a < kCliffordCount; ++a) {
    const Mat u = from_array(clifford_matrix(a));
    CHECK((u * u.adjoint() - Mat::Identity(2, 2)).norm() < 1e-12);
    for (int b = 0; b < a; ++b) {
      const Mat v = from_array(clifford_matrix(b));
      const Complex overlap = (u.adjoint() * v).trace() / 2.0;
      CHECK(std::abs(overlap) < 1.0 - 1e-9);
    }
    // Maps Paulis to Paulis up to sign.
    for (int p = 1; p < 4; ++p) {
      const Mat c = u * pauli(p) * u.adjoint();
      int hits = 0;
      for (int q = 1; q < 4; ++q) hits += std::abs(std::abs((c * pauli(q)).trace()) - 2.0) < 1e-12;
      CHECK(hits == 1);
    }
  }
  CHECK_THROWS(clifford_matrix(24));
}

TEST_CASE("U (x) conj(U) leaves phi+ invariant") {
  const auto phi = bell_state(BellKind::phi_plus);
  for (int k = 0; k < kCliffordCount; ++k) {
    auto rho = apply_gate(phi, Gate::clifford(k), {0});
    rho = apply_gate(rho, Gate::clifford(clifford_conjugate(k)), {1});
    CHECK(fidelity_to_bell(rho, BellKind::phi_plus) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("two-qubit gates match explicit matrices") {
  std::mt19937_64 rng(7);
  const auto rho = random_state(3, rng);
  Mat cnot = Mat::Zero(4, 4);
  cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1.0;
  // control 2, target 0 on three qubits: permute basis states directly
  Mat u = Mat::Zero(8, 8);
  for (int s = 0; s < 8; ++s) {
    const int c = s & 1;
    u(s ^ (c << 2), s) = 1.0;
  }
  CHECK(diff(apply_gate(rho, Gate{GateKind::CNOT}, {2, 0}), u * to_eigen(rho) * u.adjoint()) < 1e-13);

  Mat cz = Mat::Identity(8, 8);
  for (int s = 0; s < 8; ++s)
    if ((s & 4) && (s & 2)) cz(s, s) = -1.0;
  CHECK(diff(apply_gate(rho, Gate{GateKind::CZ}, {0, 1}), cz * to_eigen(rho) * cz) < 1e-13);

  const Mat h = embed(from_array(clifford_matrix(4)), 1, 3);
  CHECK(diff(apply_gate(rho, Gate::clifford(4), {1}), h * to_eigen(rho) * h.adjoint()) < 1e-13);
}

TEST_CASE("depolarizing channels match their Kraus sums") {
  std::mt19937_64 rng(11);
  const auto rho = random_state(3, rng);
  const Mat r = to_eigen(rho);
  const double p = 0.137;

  Mat one = (1.0 - p) * r;
  for (int k = 1; k < 4; ++k) {
    const Mat e = embed(pauli(k), 2, 3);
    one += (p / 3.0) * e * r * e.adjoint();
  }
  CHECK(diff(depolarize(rho, {2}, p), one) < 1e-13);

  Mat two = (1.0 - p) * r;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      if (a == 0 && b == 0) continue;
      const Mat e = embed(pauli(a), 0, 3) * embed(pauli(b), 2, 3);
      two += (p / 15.0) * e * r * e.adjoint();
    }
  }
  CHECK(diff(depolarize(rho, {0, 2}, p), two) < 1e-13);
  CHECK(depolarize(rho, {1}, 0.0) == rho);
}

TEST_CASE("measurement branches") {
  const auto zero = DensityMatrix::basis_state(1, 0);
  auto b = measure_branches(zero, 0, PauliBasis::Z, 0.0);
  CHECK(b[0].probability == doctest::Approx(1.0));
  CHECK(b[1].probability == doctest::Approx(0.0));
  b = measure_branches(zero, 0, PauliBasis::Z, 0.1);
  CHECK(b[1].probability == doctest::Approx(0.1));
  b = measure_branches(zero, 0, PauliBasis::X, 0.0);
  CHECK(b[0].probability == doctest::Approx(0.5));
  CHECK(b[0].state(0, 1).real() == doctest::Approx(0.5));  // |+><+|

  // On phi+, Z and X outcomes agree while Y outcomes disagree.
  const auto phi = bell_state(BellKind::phi_plus);
  for (auto basis : {PauliBasis::X, PauliBasis::Y, PauliBasis::Z}) {
    const auto first = measure_and_discard(phi, 0, basis, 0.0);
    const auto agree = measure_and_discard(first[0], 0, basis, 0.0);
    const double same = agree[0].trace().real();
    CHECK(same == doctest::Approx(basis == PauliBasis::Y ? 0.0 : 0.5));
  }
}

TEST_CASE("partial trace inverts tensor products") {
  std::mt19937_64 rng(3);
  const auto a = random_state(1, rng);
  const auto b = random_state(2, rng);
  const auto ab = tensor(a, b);
  CHECK(partial_trace(ab, {0}).max_abs_diff(a) < 1e-14);
  CHECK(partial_trace(ab, {1, 2}).max_abs_diff(b) < 1e-14);
  CHECK(check_state(ab).empty());
}

TEST_CASE("Stephenson pair") {
  const auto raw = stephenson_pair(false);
  const auto rot = stephenson_pair(true);
  for (const auto* rho : {&raw, &rot}) {
    CHECK(rho->trace().real() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rho->hermiticity_error() < 1e-15);
    CHECK(rho->min_eigenvalue() > 0.0);
  }
  CHECK(std::abs(fidelity_to_bell(rot, BellKind::phi_plus) - 0.933172) < 1e-5);

  // The rotated matrix is S on the first ion and X on the second.
  const Mat u = embed(from_array(clifford_matrix(8)), 0, 2) * embed(pauli(1), 1, 2);
  CHECK(diff(rot, u * to_eigen(raw) * u.adjoint()) < 1e-12);
}

TEST_CASE("twirl keeps the phi+ weight") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 10; ++t) {
    const auto rho = random_state(2, rng);
    const auto bd = twirl(rho);
    CHECK(bd.f == doctest::Approx(fidelity_to_bell(rho, BellKind::phi_plus)));
    const auto back = to_density_matrix(bd);
    CHECK(bell_coherence(back) < 1e-12);
    CHECK(fidelity_to_bell(back, BellKind::phi_plus) == doctest::Approx(bd.f));
  }
}

TEST_CASE("Bell-diagonal parametrisation") {
  const auto w = BellDiagonalState{0.9, 0.5, 0.3, 0.2}.weights();
  CHECK(w[0] == doctest::Approx(0.9));
  CHECK(w[1] == doctest::Approx(0.05));
  CHECK(w[2] == doctest::Approx(0.03));
  CHECK(w[3] == doctest::Approx(0.02));
  const auto rho = to_density_matrix({0.9, 0.5, 0.3, 0.2});
  CHECK(fidelity_to_bell(rho, BellKind::psi_plus) == doctest::Approx(0.05));
  CHECK(fidelity_to_bell(rho, BellKind::psi_minus) == doctest::Approx(0.02));
  CHECK_THROWS(to_density_matrix({0.9, 0.5, 0.5, 0.5}));
}
