#include "bell_frame.hpp"

#include <cmath>
#include <complex>

namespace ionls::bell {

namespace {

using Vec4 = std::array<Complex, 4>;    // (a, b) amplitudes, index 2a + b
using Vec16 = std::array<Complex, 16>;  // (a_c, a_t, b_c, b_t), a_c most significant

Vec4 pair_state(int frame) {
  const double s = 1.0 / std::sqrt(2.0);
  // (I (x) P)|phi+> with P = X^x Z^z up to phase.
  Vec4 out{};
  const int x = frame & 1;
  const int z = (frame >> 1) & 1;
  for (int a = 0; a < 2; ++a) {
    const int b = a ^ x;
    const double sign = (z && a == 1) ? -1.0 : 1.0;
    out[2 * a + b] = s * sign;
  }
  return out;
}

Vec16 two_pair_state(int fc, int ft) {
  const Vec4 c = pair_state(fc);
  const Vec4 t = pair_state(ft);
  Vec16 out{};
  for (int ac = 0; ac < 2; ++ac)
    for (int at = 0; at < 2; ++at)
      for (int bc = 0; bc < 2; ++bc)
        for (int bt = 0; bt < 2; ++bt) out[8 * ac + 4 * at + 2 * bc + bt] = c[2 * ac + bc] * t[2 * at + bt];
  return out;
}

template <std::size_t N>
double overlap(const std::array<Complex, N>& u, const std::array<Complex, N>& v) {
  Complex acc{};
  for (std::size_t k = 0; k < N; ++k) acc += std::conj(u[k]) * v[k];
  return std::abs(acc);
}

TwoPairMap build_two_pair(TwoQubitKind kind) {
  TwoPairMap map{};
  for (int fc = 0; fc < 4; ++fc) {
    for (int ft = 0; ft < 4; ++ft) {
      const Vec16 in = two_pair_state(fc, ft);
      Vec16 out{};
      for (int idx = 0; idx < 16; ++idx) {
        const int ac = (idx >> 3) & 1, at = (idx >> 2) & 1, bc = (idx >> 1) & 1, bt = idx & 1;
        if (kind == TwoQubitKind::CNOT) {
          out[8 * ac + 4 * (at ^ ac) + 2 * bc + (bt ^ bc)] = in[idx];
        } else {
          const double sign = ((ac & at) ^ (bc & bt)) ? -1.0 : 1.0;
          out[idx] = sign * in[idx];
        }
      }
      for (int gc = 0; gc < 4; ++gc) {
        for (int gt = 0; gt < 4; ++gt) {
          if (overlap(two_pair_state(gc, gt), out) > 1.0 - 1e-9) {
            map[fc + 4 * ft] = {static_cast<std::uint8_t>(gc), static_cast<std::uint8_t>(gt)};
          }
        }
      }
    }
  }
  return map;
}

}  // namespace

const TwoPairMap& two_pair_map(TwoQubitKind kind) {
  static const TwoPairMap cnot = build_two_pair(TwoQubitKind::CNOT);
  static const TwoPairMap cz = build_two_pair(TwoQubitKind::CZ);
  return kind == TwoQubitKind::CNOT ? cnot : cz;
}

std::optional<OnePairMap> one_pair_map(int clifford_a, int clifford_b) {
  const auto ua = clifford_matrix(clifford_a);
  const auto ub = clifford_matrix(clifford_b);
  OnePairMap map{};
  for (int f = 0; f < 4; ++f) {
    const Vec4 in = pair_state(f);
    Vec4 out{};
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int a0 = 0; a0 < 2; ++a0)
          for (int b0 = 0; b0 < 2; ++b0) out[2 * a + b] += ua[2 * a + a0] * ub[2 * b + b0] * in[2 * a0 + b0];
    int found = -1;
    for (int g = 0; g < 4; ++g) {
      if (overlap(pair_state(g), out) > 1.0 - 1e-9) found = g;
    }
    if (found < 0) return std::nullopt;
    map[f] = static_cast<std::uint8_t>(found);
  }
  return map;
}

bool labels_differ(int frame, PauliBasis basis) {
  const bool x = frame & 1;
  const bool z = (frame >> 1) & 1;
  switch (basis) {
    case PauliBasis::X: return z;
    case PauliBasis::Z: return x;
    case PauliBasis::Y: return !(x != z);  // <YY> = -1 on phi+
  }
  return false;
}

FrameDistribution::FrameDistribution(int num_pairs)
    : num_pairs_(num_pairs),
      probs_(std::size_t{1} << (2 * num_pairs), 0.0),
      scratch_(probs_.size(), 0.0) {}

void FrameDistribution::set_product(const std::vector<std::array<double, 4>>& pair_weights) {
  for (std::size_t f = 0; f < probs_.size(); ++f) {
    double p = 1.0;
    for (int k = 0; k < num_pairs_ && p != 0.0; ++k) p *= pair_weights[k][frame_of(f, k)];
    probs_[f] = p;
  }
}

void FrameDistribution::apply_two_pair(const TwoPairMap& map, int control, int target) {
  std::fill(scratch_.begin(), scratch_.end(), 0.0);
  const std::size_t clear = ~((std::size_t{3} << (2 * control)) | (std::size_t{3} << (2 * target)));
  for (std::size_t f = 0; f < probs_.size(); ++f) {
    const auto& m = map[frame_of(f, control) + 4 * frame_of(f, target)];
    const std::size_t g = (f & clear) | (std::size_t{m[0]} << (2 * control)) | (std::size_t{m[1]} << (2 * target));
    scratch_[g] += probs_[f];
  }
  probs_.swap(scratch_);
}

void FrameDistribution::apply_one_pair(const OnePairMap& map, int pair) {
  std::fill(scratch_.begin(), scratch_.end(), 0.0);
  const std::size_t clear = ~(std::size_t{3} << (2 * pair));
  for (std::size_t f = 0; f < probs_.size(); ++f) {
    scratch_[(f & clear) | (std::size_t{map[frame_of(f, pair)]} << (2 * pair))] += probs_[f];
  }
  probs_.swap(scratch_);
}

void FrameDistribution::depolarize_one_pair(int pair, double p) {
  if (p == 0.0) return;
  const double w = p / 3.0;
  for (std::size_t f = 0; f < probs_.size(); ++f) {
    double acc = (1.0 - p) * probs_[f];
    for (std::size_t q = 1; q < 4; ++q) acc += w * probs_[f ^ (q << (2 * pair))];
    scratch_[f] = acc;
  }
  probs_.swap(scratch_);
}

void FrameDistribution::depolarize_two_pairs(int first, int second, double p) {
  if (p == 0.0) return;
  const double w = p / 15.0;
  for (std::size_t f = 0; f < probs_.size(); ++f) {
    double acc = (1.0 - p) * probs_[f];
    for (std::size_t q = 1; q < 16; ++q) {
      const std::size_t shift = ((q & 3) << (2 * first)) | ((q >> 2) << (2 * second));
      acc += w * probs_[f ^ shift];
    }
    scratch_[f] = acc;
  }
  probs_.swap(scratch_);
}

}  // namespace ionls::bell
