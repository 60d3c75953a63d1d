#pragma once

// Pauli-frame representation of products of Bell-diagonal pairs. A pair in
// frame P holds (I (x) P)|phi+>; codes are x + 2z, so 0 = I (phi+),
// 1 = X (psi+), 2 = Z (phi-), 3 = Y (psi-). Bilateral Clifford operations
// permute frames and Pauli noise on either side shifts them.

#include "ionls/purification.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace ionls::bell {

// Indexed by control_frame + 4 * target_frame; yields {control', target'}.
using TwoPairMap = std::array<std::array<std::uint8_t, 2>, 16>;
using OnePairMap = std::array<std::uint8_t, 4>;

const TwoPairMap& two_pair_map(TwoQubitKind kind);

/// Frame permutation of clifford_a on side A and clifford_b on side B, or
/// nullopt when the pair maps some Bell state outside the Bell basis.
std::optional<OnePairMap> one_pair_map(int clifford_a, int clifford_b);

/// Whether ideal bilateral measurement in `basis` reports different labels on
/// the two sides of a pair in `frame`.
bool labels_differ(int frame, PauliBasis basis);

class FrameDistribution {
 public:
  explicit FrameDistribution(int num_pairs);

  void set_product(const std::vector<std::array<double, 4>>& pair_weights);
  void apply_two_pair(const TwoPairMap& map, int control, int target);
  void apply_one_pair(const OnePairMap& map, int pair);
  void depolarize_one_pair(int pair, double p);
  void depolarize_two_pairs(int first, int second, double p);

  int frame_of(std::size_t index, int pair) const { return static_cast<int>((index >> (2 * pair)) & 3); }
  const std::vector<double>& probabilities() const { return probs_; }

 private:
  int num_pairs_;
  std::vector<double> probs_;
  std::vector<double> scratch_;
};

}  // namespace ionls::bell
