#ifndef DIVKECM_RNG_H
#define DIVKECM_RNG_H

#include <cstdint>
#include <limits>
#include <string_view>

namespace divkecm {

/// Counter-based pseudo random stream.
///
/// Every draw is a pure function of (key, counter), so a stream is fully
/// described by its key and position. Independent streams are obtained with
/// `derive`, which hashes a label into a fresh key; two calls with the same
/// label on equal streams give equal children. Satisfies
/// UniformRandomBitGenerator, so it can feed <random> distributions.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform double in [0, 1).
  double uniform();
  /// Uniform integer in [0, n). `n` must be positive.
  std::uint64_t below(std::uint64_t n);
  int bit() { return static_cast<int>((*this)() >> 63); }
  /// True with probability `p`.
  bool bernoulli(double p) { return uniform() < p; }

  Rng derive(std::uint64_t id) const;
  Rng derive(std::string_view label) const;
  Rng derive(std::string_view label, std::uint64_t id) const { return derive(label).derive(id); }

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

  friend bool operator==(const Rng&, const Rng&) = default;

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t z);

}  // namespace divkecm

#endif  // DIVKECM_RNG_H
