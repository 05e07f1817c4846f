#include <gtest/gtest.h>

#include <algorithm>
#include <bit>

#include "divkecm/ecc.h"
#include "divkecm/errors.h"
#include "oracles.h"

using namespace divkecm;

namespace {

Bits random_bits(int l, oracle::SplitMix& g) {
  Bits v(l);
  for (auto& b : v) b = static_cast<std::uint8_t>(g.bit());
  return v;
}

// A 16-bit code read back through `entry`, with every pattern's syndrome
// tabulated once.
struct ToyCode {
  std::vector<std::uint32_t> syn;
  explicit ToyCode(const LinearCode& code) : syn(1u << 16, 0) {
    std::uint32_t col[16] = {};
    for (int c = 0; c < 16; ++c) {
      for (int r = 0; r < code.syndrome_bits(); ++r) col[c] |= static_cast<std::uint32_t>(code.entry(r, c)) << r;
    }
    for (std::uint32_t e = 1; e < (1u << 16); ++e) {
      int low = std::countr_zero(e);
      syn[e] = syn[e & (e - 1)] ^ col[low];
    }
  }
};

std::uint32_t pack(const Bits& v) {
  std::uint32_t x = 0;
  for (int c = 0; c < 16; ++c) x |= static_cast<std::uint32_t>(v[c] & 1) << c;
  return x;
}

// Sorted flip positions of e, compared lexicographically.
std::vector<int> positions(std::uint32_t e) {
  std::vector<int> p;
  for (int c = 0; c < 16; ++c) {
    if ((e >> c) & 1) p.push_back(c);
  }
  return p;
}

// Minimum weight, lexicographic tie-break.
std::optional<std::uint32_t> brute_force_decode(const ToyCode& toy, std::uint32_t target, int t_max) {
  std::optional<std::uint32_t> best;
  for (std::uint32_t e = 0; e < (1u << 16); ++e) {
    int w = std::popcount(e);
    if (w > t_max || toy.syn[e] != target) continue;
    if (!best || w < std::popcount(*best) || (w == std::popcount(*best) && positions(e) < positions(*best))) best = e;
  }
  return best;
}

}  // namespace

TEST(Ecc, BinaryEntropy) {
  EXPECT_DOUBLE_EQ(binary_entropy(0.5), 1.0);
  EXPECT_EQ(binary_entropy(0.0), 0.0);
  EXPECT_EQ(binary_entropy(1.0), 0.0);
  EXPECT_NEAR(binary_entropy(0.11), 0.499916, 1e-5);
  for (double q : {0.001, 0.004, 0.1, 0.3}) EXPECT_NEAR(binary_entropy(q), oracle::h2(q), 1e-14);
  EXPECT_THROW(binary_entropy(-0.1), ParameterError);
  EXPECT_THROW(binary_entropy(1.5), ParameterError);
}

TEST(Ecc, SyndromeLength) {
  EXPECT_EQ(syndrome_length(2, 0.2, 0.3, 0.0, 512), 0);
  const int expected = static_cast<int>(std::ceil(2 * 0.8 * 0.7 * oracle::h2(0.004) * 512));
  EXPECT_EQ(expected, 22);
  EXPECT_EQ(syndrome_length(2, 0.2, 0.3, 0.004, 512), expected);
  const int a = syndrome_length(2, 0.2, 0.3, 0.01, 400);
  const int b = syndrome_length(2, 0.2, 0.3, 0.01, 800);
  EXPECT_LE(std::abs(b - 2 * a), 1);
}

TEST(Ecc, SyndromeLinearityAndDeterminism) {
  LinearCode code(128, 20, 5);
  LinearCode again(128, 20, 5);
  LinearCode other(128, 20, 6);
  bool differs = false;
  for (int r = 0; r < 20; ++r) {
    for (int c = 0; c < 128; ++c) {
      EXPECT_EQ(code.entry(r, c), again.entry(r, c));
      differs |= code.entry(r, c) != other.entry(r, c);
    }
  }
  EXPECT_TRUE(differs);
  oracle::SplitMix g(1);
  Bits zero(128, 0);
  EXPECT_EQ(compute_syndrome(code, zero), Bits(20, 0));
  for (int t = 0; t < 20; ++t) {
    Bits a = random_bits(128, g), e = random_bits(128, g), ae(128);
    for (int i = 0; i < 128; ++i) ae[i] = a[i] ^ e[i];
    Bits sa = compute_syndrome(code, a), se = compute_syndrome(code, e), sae = compute_syndrome(code, ae);
    for (int r = 0; r < 20; ++r) EXPECT_EQ(sae[r], sa[r] ^ se[r]);
  }
  EXPECT_THROW(compute_syndrome(code, Bits(5, 0)), StructuralError);
  EXPECT_THROW(LinearCode(16, 4, 1, 5), ParameterError);
}

TEST(Ecc, DecodeIsIdentityOnNoiselessInput) {
  oracle::SplitMix g(2);
  for (int t = 0; t < 50; ++t) {
    LinearCode code(200, 18, t);
    Bits a = random_bits(200, g);
    auto out = decode_guess(code, a, compute_syndrome(code, a));
    ASSERT_TRUE(out.has_value());
    EXPECT_EQ(*out, a);
  }
}

TEST(Ecc, MatchesBruteForceOnToyCode) {
  oracle::SplitMix g(3);
  int checked = 0, failures = 0;
  for (int seed = 0; seed < 8; ++seed) {
    LinearCode code(16, 10, seed);
    ToyCode toy(code);
    for (int t = 0; t < 40; ++t) {
      Bits a = random_bits(16, g);
      Bits noisy = a;
      int flips = static_cast<int>(g.next() % 6);
      for (int f = 0; f < flips; ++f) noisy[g.next() % 16] ^= 1;
      Bits syn = compute_syndrome(code, a);
      auto expect = brute_force_decode(toy, toy.syn[pack(noisy)] ^ toy.syn[pack(a)], 4);
      auto got = decode_guess(code, noisy, syn);
      ASSERT_EQ(got.has_value(), expect.has_value());
      ++checked;
      if (!got) {
        ++failures;
        continue;
      }
      Bits want = noisy;
      for (int c = 0; c < 16; ++c) want[c] ^= (*expect >> c) & 1;
      EXPECT_EQ(*got, want);
    }
  }
  EXPECT_EQ(checked, 320);
}

TEST(Ecc, WeightBeyondSearchBoundFails) {
  // Find a weight-2 error with no representative of weight <= 1 and decode
  // with t_max = 1.
  bool found = false;
  for (int seed = 0; seed < 20 && !found; ++seed) {
    LinearCode code(16, 8, seed, 1);
    ToyCode toy(code);
    for (std::uint32_t e = 0; e < (1u << 16) && !found; ++e) {
      if (std::popcount(e) != 2) continue;
      if (brute_force_decode(toy, toy.syn[e], 1)) continue;
      Bits zero(16, 0), noisy(16, 0);
      for (int c = 0; c < 16; ++c) noisy[c] = (e >> c) & 1;
      EXPECT_FALSE(decode_guess(code, noisy, compute_syndrome(code, zero)).has_value());
      found = true;
    }
  }
  EXPECT_TRUE(found);
}

TEST(Ecc, SingleFlipRecoveryRate) {
  oracle::SplitMix g(4);
  const int l = 512;
  const int syn = static_cast<int>(std::ceil(2 * std::log2(l))) + 2;
  int fails = 0;
  for (int seed = 0; seed < 1000; ++seed) {
    LinearCode code(l, syn, seed, 1);
    Bits a = random_bits(l, g), noisy = a;
    noisy[g.next() % l] ^= 1;
    auto out = decode_guess(code, noisy, compute_syndrome(code, a));
    fails += !(out && *out == a);
  }
  EXPECT_LT(fails / 1000.0, 0.05);
}

TEST(Ecc, SupportMaskRestrictsSearch) {
  LinearCode code(64, 16, 9);
  oracle::SplitMix g(5);
  Bits a = random_bits(64, g);
  Bits support(64, 0);
  for (int i = 0; i < 64; i += 2) support[i] = 1;
  Bits noisy = a;
  noisy[10] ^= 1;
  auto out = decode_guess(code, noisy, compute_syndrome(code, a), &support);
  ASSERT_TRUE(out.has_value());
  EXPECT_EQ(*out, a);
  Bits noisy_odd = a;
  noisy_odd[11] ^= 1;  // outside the support
  auto miss = decode_guess(code, noisy_odd, compute_syndrome(code, a), &support);
  EXPECT_TRUE(!miss.has_value() || *miss != a);
}
