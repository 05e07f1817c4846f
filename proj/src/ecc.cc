#include "divkecm/ecc.h"

#include <cmath>
#include <string>
#include <unordered_map>
#include <utility>

#include "divkecm/errors.h"

namespace divkecm {

double binary_entropy(double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw ParameterError("binary_entropy: q must lie in [0, 1]");
  if (q == 0.0 || q == 1.0) return 0.0;
  return -q * std::log2(q) - (1.0 - q) * std::log2(1.0 - q);
}

int syndrome_length(double xi, double gamma, double alpha, double q, int l) {
  if (l < 0) throw ParameterError("syndrome_length: l must be non-negative");
  double bits = xi * (1.0 - gamma) * (1.0 - alpha) * binary_entropy(q) * l;
  // Guard against products such as 21.000000000000004 rounding up.
  return static_cast<int>(std::ceil(bits - 1e-9));
}

namespace {

struct WordHash {
  std::size_t operator()(const Word& w) const {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (auto v : w) h = mix64(h ^ v);
    return static_cast<std::size_t>(h);
  }
};

void xor_into(Word& acc, const Word& w) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] ^= w[i];
}

Word xor_of(Word a, const Word& b) {
  xor_into(a, b);
  return a;
}

bool is_zero(const Word& w) {
  for (auto v : w) {
    if (v != 0) return false;
  }
  return true;
}

}  // namespace

struct LinearCode::Tables {
  std::unordered_map<Word, std::vector<int>, WordHash> single;
  std::unordered_map<Word, std::vector<std::pair<int, int>>, WordHash> pairs;
};

LinearCode::LinearCode(int l, int syn_bits, std::uint64_t seed, int t_max)
    : l_(l), syn_bits_(syn_bits), seed_(seed), t_max_(t_max) {
  if (l <= 0) throw ParameterError("LinearCode: length must be positive");
  if (syn_bits < 0) throw ParameterError("LinearCode: syndrome length must be non-negative");
  if (t_max < 0 || t_max > kMaxSearchWeight) {
    throw ParameterError("LinearCode: t_max must lie in [0, " + std::to_string(kMaxSearchWeight) + "]");
  }
  const std::size_t words = (static_cast<std::size_t>(syn_bits) + 63) / 64;
  Rng rng = Rng(seed).derive("parity-check");
  columns_.assign(l, Word(words, 0));
  for (int c = 0; c < l; ++c) {
    for (int r = 0; r < syn_bits; ++r) {
      if (rng.bit()) columns_[c][r / 64] |= std::uint64_t{1} << (r % 64);
    }
  }
  auto tables = std::make_shared<Tables>();
  if (t_max >= 1) {
    for (int c = 0; c < l; ++c) tables->single[columns_[c]].push_back(c);
  }
  if (t_max >= 4) {
    tables->pairs.reserve(static_cast<std::size_t>(l) * (l - 1) / 2);
    for (int i = 0; i < l; ++i) {
      for (int j = i + 1; j < l; ++j) tables->pairs[xor_of(columns_[i], columns_[j])].emplace_back(i, j);
    }
  }
  tables_ = std::move(tables);
}

int LinearCode::entry(int row, int col) const {
  if (row < 0 || row >= syn_bits_ || col < 0 || col >= l_) throw StructuralError("LinearCode: index out of range");
  return static_cast<int>((columns_[col][row / 64] >> (row % 64)) & 1);
}

Word LinearCode::syndrome_word(const Bits& v) const {
  if (static_cast<int>(v.size()) != l_) throw StructuralError("syndrome: input length does not match the code");
  Word acc(columns_.empty() ? 0 : columns_[0].size(), 0);
  for (int c = 0; c < l_; ++c) {
    if (v[c] & 1) xor_into(acc, columns_[c]);
  }
  return acc;
}

Bits LinearCode::syndrome(const Bits& v) const {
  Word w = syndrome_word(v);
  Bits out(syn_bits_);
  for (int r = 0; r < syn_bits_; ++r) out[r] = static_cast<std::uint8_t>((w[r / 64] >> (r % 64)) & 1);
  return out;
}

Bits compute_syndrome(const LinearCode& code, const Bits& v) { return code.syndrome(v); }

std::optional<Bits> decode_guess(const LinearCode& code, const Bits& noisy, const Bits& syn, const Bits* support) {
  const int l = code.length();
  if (static_cast<int>(noisy.size()) != l) throw StructuralError("decode_guess: input length does not match the code");
  if (static_cast<int>(syn.size()) != code.syndrome_bits()) {
    throw StructuralError("decode_guess: syndrome length does not match the code");
  }
  if (support && static_cast<int>(support->size()) != l) {
    throw StructuralError("decode_guess: support mask length does not match the code");
  }
  // Target: H e = H noisy ⊕ syn.
  Word target = code.syndrome_word(noisy);
  for (int r = 0; r < code.syndrome_bits(); ++r) {
    if (syn[r] & 1) target[r / 64] ^= std::uint64_t{1} << (r % 64);
  }

  std::vector<int> pos;
  for (int i = 0; i < l; ++i) {
    if (!support || (*support)[i]) pos.push_back(i);
  }
  std::vector<char> allowed(l, support ? 0 : 1);
  for (int i : pos) allowed[i] = 1;

  const auto& single = code.tables_->single;
  const auto& pairs = code.tables_->pairs;
  // Smallest allowed column index above `after` whose column equals w.
  auto lookup = [&](const Word& w, int after) -> int {
    auto it = single.find(w);
    if (it == single.end()) return -1;
    for (int c : it->second) {
      if (c > after && allowed[c]) return c;
    }
    return -1;
  };
  auto result = [&](std::initializer_list<int> flips) {
    Bits out = noisy;
    for (int c : flips) out[c] ^= 1;
    return out;
  };

  if (is_zero(target)) return noisy;
  const int t = code.t_max();
  if (t >= 1) {
    if (int c = lookup(target, -1); c >= 0) return result({c});
  }
  if (t >= 2) {
    for (int i : pos) {
      if (int c = lookup(xor_of(target, code.column(i)), i); c >= 0) return result({i, c});
    }
  }
  if (t >= 3) {
    for (std::size_t a = 0; a < pos.size(); ++a) {
      Word wi = xor_of(target, code.column(pos[a]));
      for (std::size_t b = a + 1; b < pos.size(); ++b) {
        if (int c = lookup(xor_of(wi, code.column(pos[b])), pos[b]); c >= 0) return result({pos[a], pos[b], c});
      }
    }
  }
  if (t >= 4) {
    for (std::size_t a = 0; a < pos.size(); ++a) {
      Word wi = xor_of(target, code.column(pos[a]));
      for (std::size_t b = a + 1; b < pos.size(); ++b) {
        auto it = pairs.find(xor_of(wi, code.column(pos[b])));
        if (it == pairs.end()) continue;
        for (auto [k, m] : it->second) {
          if (k > pos[b] && allowed[k] && allowed[m]) return result({pos[a], pos[b], k, m});
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace divkecm
