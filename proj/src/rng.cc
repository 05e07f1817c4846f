#include "divkecm/rng.h"

#include <stdexcept>

namespace divkecm {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t hash_label(std::string_view label) {
  // FNV-1a, then mixed.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : label) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return mix64(h);
}
}  // namespace

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream) : key_(mix64(seed ^ mix64(stream + kGolden))) {}

Rng::result_type Rng::operator()() {
  std::uint64_t c = counter_++;
  return mix64(key_ + (c + 1) * kGolden);
}

double Rng::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) {
    throw std::invalid_argument("Rng::below: n must be positive");
  }
  // Rejection sampling keeps the result exactly uniform.
  std::uint64_t limit = max() - max() % n;
  while (true) {
    std::uint64_t v = (*this)();
    if (v < limit) {
      return v % n;
    }
  }
}

Rng Rng::derive(std::uint64_t id) const {
  Rng child(0);
  child.key_ = mix64(key_ ^ mix64(id ^ 0x5851f42d4c957f2dULL));
  return child;
}

Rng Rng::derive(std::string_view label) const { return derive(hash_label(label)); }

}  // namespace divkecm
