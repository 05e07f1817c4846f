#ifndef DIVKECM_ECC_H
#define DIVKECM_ECC_H

// Syndrome error correction: a seeded random parity-check code and a
// bounded-weight coset decoder.

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "divkecm/devices.h"

namespace divkecm {

/// h2(q) in bits; h2(0) = h2(1) = 0.
double binary_entropy(double q);

/// ceil(ξ(1−γ)(1−α) h2(q) l).
int syndrome_length(double xi, double gamma, double alpha, double q, int l);

/// Packed GF(2) vector of at most a few hundred bits.
using Word = std::vector<std::uint64_t>;

/// Uniformly random parity-check matrix of shape syn_bits × l, fully
/// determined by (l, syn_bits, seed).
class LinearCode {
 public:
  static constexpr int kMaxSearchWeight = 4;

  LinearCode(int l, int syn_bits, std::uint64_t seed, int t_max = kMaxSearchWeight);

  int length() const { return l_; }
  int syndrome_bits() const { return syn_bits_; }
  int t_max() const { return t_max_; }
  std::uint64_t seed() const { return seed_; }

  int entry(int row, int col) const;
  const Word& column(int col) const { return columns_[col]; }

  /// H·v over GF(2).
  Bits syndrome(const Bits& v) const;
  Word syndrome_word(const Bits& v) const;

 private:
  struct Tables;
  friend std::optional<Bits> decode_guess(const LinearCode&, const Bits&, const Bits&, const Bits*);

  int l_;
  int syn_bits_;
  std::uint64_t seed_;
  int t_max_;
  std::vector<Word> columns_;
  // Column and column-pair lookup tables for the decoder, shared by copies.
  std::shared_ptr<const Tables> tables_;
};

/// Same as code.syndrome(v).
Bits compute_syndrome(const LinearCode& code, const Bits& v);

/// Reconstructs v from a noisy copy `noisy` and syn(v): the lightest error e
/// (weight ≤ t_max, ties broken by the lexicographically smallest sorted
/// support) with H(noisy ⊕ e) = syn, returned as noisy ⊕ e. When `support`
/// is given, errors are only searched on positions where it is nonzero.
/// Returns nullopt when no such e exists.
std::optional<Bits> decode_guess(const LinearCode& code, const Bits& noisy, const Bits& syn,
                                 const Bits* support = nullptr);

}  // namespace divkecm

#endif  // DIVKECM_ECC_H
