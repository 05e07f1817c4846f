#include "divkecm/extract.h"

#include <cmath>
#include <numbers>
#include <random>

namespace divkecm {

namespace {

Complex root_of_unity(int p, long power) {
  double angle = 2.0 * std::numbers::pi * static_cast<double>(((power % p) + p) % p) / p;
  return std::polar(1.0, angle);
}

int ipow(int base, int exp) {
  int r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

int seed_index(const std::vector<int>& x, int p) {
  int r = 0;
  for (int v : x) r = r * p + v;
  return r;
}

}  // namespace

Matrix qudit_fourier(int p) {
  if (p < 2) throw ParameterError("qudit_fourier: p must be at least 2");
  Matrix f(p, p);
  const double norm = 1.0 / std::sqrt(static_cast<double>(p));
  for (int k = 0; k < p; ++k) {
    for (int j = 0; j < p; ++j) f(k, j) = norm * root_of_unity(p, static_cast<long>(j) * k);
  }
  return f;
}

double amplitude_identity(const std::vector<double>& a, int p) {
  if (p < 2 || static_cast<int>(a.size()) != p) {
    throw ParameterError("amplitude_identity: need one weight per element of F_p");
  }
  double total = 0.0;
  Complex sum = 0.0;
  for (int j = 0; j < p; ++j) {
    if (!(a[j] >= -kTolerance)) throw ParameterError("amplitude_identity: negative weight");
    total += a[j];
    sum += a[j] * root_of_unity(p, j);
  }
  if (std::abs(total - 1.0) > kTolerance) throw ParameterError("amplitude_identity: weights must sum to 1");
  return std::norm(sum);
}

// -- Oracles ---------------------------------------------------------------------

int IpOracle::seeds() const { return ipow(p, l); }

void IpOracle::validate() const {
  if (p < 2 || l < 1 || d < 1) throw StructuralError("IpOracle: bad shape");
  if (static_cast<int>(xb.size()) != l || static_cast<int>(xc.size()) != l) {
    throw StructuralError("IpOracle: secret strings must have length l");
  }
  for (const auto* x : {&xb, &xc}) {
    for (int v : *x) {
      if (v < 0 || v >= p) throw StructuralError("IpOracle: secret symbol outside F_p");
    }
  }
  const std::size_t rows = static_cast<std::size_t>(seeds()) * seeds();
  if (alpha.size() != rows * p * p || sigma.size() != alpha.size()) {
    throw StructuralError("IpOracle: table size does not match p and l");
  }
  if (rho.size() != d || std::abs(rho.norm() - 1.0) > kTolerance) {
    throw StructuralError("IpOracle: ρ must be a unit vector of dimension d");
  }
  for (std::size_t r = 0; r < rows; ++r) {
    double norm = 0.0;
    for (int jk = 0; jk < p * p; ++jk) {
      std::size_t i = r * p * p + jk;
      norm += std::norm(alpha[i]);
      if (sigma[i].size() != d || std::abs(sigma[i].norm() - 1.0) > kTolerance) {
        throw StructuralError("IpOracle: residual states must be unit vectors of dimension d");
      }
    }
    if (std::abs(norm - 1.0) > kTolerance) throw StructuralError("IpOracle: α row is not normalized");
  }
}

int seed_dot(const std::vector<int>& x, int r, int p) {
  int acc = 0;
  for (int i = static_cast<int>(x.size()) - 1; i >= 0; --i) {
    acc += x[i] * (r % p);
    r /= p;
  }
  return acc % p;
}

IpOracle class_oracle(int p, int l, std::vector<int> xb, std::vector<int> xc,
                      const std::vector<std::vector<double>>& w) {
  if (static_cast<int>(w.size()) != p) throw StructuralError("class_oracle: weight table must be p × p");
  IpOracle o;
  o.p = p;
  o.l = l;
  o.d = 1;
  o.xb = std::move(xb);
  o.xc = std::move(xc);
  o.rho = Vector::Ones(1);
  const std::size_t rows = static_cast<std::size_t>(o.seeds()) * o.seeds();
  for (std::size_t r = 0; r < rows; ++r) {
    for (int j = 0; j < p; ++j) {
      if (static_cast<int>(w[j].size()) != p) throw StructuralError("class_oracle: weight table must be p × p");
      for (int k = 0; k < p; ++k) {
        if (w[j][k] < 0.0) throw ParameterError("class_oracle: negative weight");
        o.alpha.emplace_back(std::sqrt(w[j][k]), 0.0);
        o.sigma.push_back(o.rho);
      }
    }
  }
  o.validate();
  return o;
}

IpOracle perfect_oracle(int p, int l, std::vector<int> xb, std::vector<int> xc) {
  std::vector<std::vector<double>> w(p, std::vector<double>(p, 0.0));
  w[0][0] = 1.0;
  return class_oracle(p, l, std::move(xb), std::move(xc), w);
}

IpOracle random_oracle(int p, int l, int d, Rng& rng) {
  std::normal_distribution<double> gauss;
  auto random_unit = [&](int n) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = Complex(gauss(rng), gauss(rng));
    return Vector(v / v.norm());
  };
  IpOracle o;
  o.p = p;
  o.l = l;
  o.d = d;
  for (int i = 0; i < l; ++i) {
    o.xb.push_back(static_cast<int>(rng.below(p)));
    o.xc.push_back(static_cast<int>(rng.below(p)));
  }
  o.rho = random_unit(d);
  const std::size_t rows = static_cast<std::size_t>(o.seeds()) * o.seeds();
  for (std::size_t r = 0; r < rows; ++r) {
    Vector row = random_unit(p * p);
    for (int jk = 0; jk < p * p; ++jk) {
      o.alpha.push_back(row(jk));
      o.sigma.push_back(random_unit(d));
    }
  }
  o.validate();
  return o;
}

std::vector<double> aggregate_classes(const IpOracle& o) {
  o.validate();
  const int p = o.p;
  std::vector<double> a(p, 0.0);
  const double scale = 1.0 / (static_cast<double>(o.seeds()) * o.seeds());
  for (int rb = 0; rb < o.seeds(); ++rb) {
    for (int rc = 0; rc < o.seeds(); ++rc) {
      for (int j = 0; j < p; ++j) {
        for (int k = 0; k < p; ++k) a[(j + k) % p] += scale * std::norm(o.alpha[o.table_index(rb, rc, j, k)]);
      }
    }
  }
  return a;
}

double oracle_guess_prob(const IpOracle& o) { return aggregate_classes(o)[0]; }

// -- Circuit ---------------------------------------------------------------------

Matrix complete_to_unitary(const Vector& v) {
  const int n = static_cast<int>(v.size());
  if (n == 0 || std::abs(v.norm() - 1.0) > kTolerance) {
    throw StructuralError("complete_to_unitary: need a unit vector");
  }
  Matrix q(n, n);
  q.col(0) = v;
  int filled = 1;
  for (int e = 0; e < n && filled < n; ++e) {
    Vector w = Vector::Unit(n, e);
    for (int pass = 0; pass < 2; ++pass) {
      for (int c = 0; c < filled; ++c) w -= q.col(c) * q.col(c).dot(w);
    }
    double norm = w.norm();
    if (norm > 1e-6) q.col(filled++) = w / norm;
  }
  return q;
}

long bv_circuit_dimension(const IpOracle& o) {
  const int cap = o.p == 2 ? 5 : o.p == 3 ? 3 : 0;
  if (o.l < 1 || o.l > cap) {
    throw StructuralError("run_bv_extraction: (p, l) outside the supported grid (p=2: l<=5, p=3: l<=3)");
  }
  long dim = static_cast<long>(o.seeds()) * o.seeds() * o.p * o.p * o.d * o.p * o.p;
  if (dim > kMaxCircuitDimension) throw StructuralError("run_bv_extraction: statevector above the cap");
  return dim;
}

namespace {

// Applies a dim × dim gate to the digit with the given stride.
void apply_local(Vector& state, long stride, int dim, const Matrix& gate) {
  const long n = state.size();
  std::vector<Complex> buf(dim);
  for (long base = 0; base < n; base += stride * dim) {
    for (long off = 0; off < stride; ++off) {
      for (int k = 0; k < dim; ++k) buf[k] = state(base + off + k * stride);
      for (int r = 0; r < dim; ++r) {
        Complex acc = 0.0;
        for (int k = 0; k < dim; ++k) acc += gate(r, k) * buf[k];
        state(base + off + r * stride) = acc;
      }
    }
  }
}

struct Layout {
  int p, d;
  long tilde;  // p² (Z̃^B Z̃^C)
  long block;  // one seed pair: Z^B Z^C BC Z̃^B Z̃^C
  int seeds;
  int l;
};

void apply_fourier_stage(Vector& state, const Layout& L, const Matrix& f) {
  // Z̃^C then Z̃^B.
  apply_local(state, 1, L.p, f);
  apply_local(state, L.p, L.p, f);
  // R^C digits (least significant last), then R^B digits.
  long stride = L.block;
  for (int q = 0; q < 2 * L.l; ++q) {
    apply_local(state, stride, L.p, f);
    stride *= L.p;
  }
}

std::vector<Matrix> oracle_blocks(const IpOracle& o) {
  const int p = o.p;
  const int d = o.d;
  const int rows = p * p * d;
  Vector source = Vector::Zero(rows);
  source.head(d) = o.rho;
  Matrix source_basis = complete_to_unitary(source);
  std::vector<Matrix> blocks;
  blocks.reserve(static_cast<std::size_t>(o.seeds()) * o.seeds());
  for (int rb = 0; rb < o.seeds(); ++rb) {
    for (int rc = 0; rc < o.seeds(); ++rc) {
      Vector target = Vector::Zero(rows);
      const int ib = seed_dot(o.xb, rb, p);
      const int ic = seed_dot(o.xc, rc, p);
      for (int j = 0; j < p; ++j) {
        for (int k = 0; k < p; ++k) {
          int i = o.table_index(rb, rc, j, k);
          int z = ((ib + j) % p) * p + (ic + k) % p;
          target.segment(static_cast<long>(z) * d, d) += o.alpha[i] * o.sigma[i];
        }
      }
      blocks.push_back(complete_to_unitary(target) * source_basis.adjoint());
    }
  }
  return blocks;
}

void apply_blocks(Vector& state, const Layout& L, const std::vector<Matrix>& blocks, bool adjoint) {
  using RowMajor = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const long rows = L.block / L.tilde;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    Eigen::Map<RowMajor> m(state.data() + static_cast<long>(b) * L.block, rows, L.tilde);
    RowMajor next = adjoint ? RowMajor(blocks[b].adjoint() * m) : RowMajor(blocks[b] * m);
    m = next;
  }
}

void apply_add(Vector& state, const Layout& L) {
  const int p = L.p;
  Vector out(state.size());
  const long pairs = static_cast<long>(L.seeds) * L.seeds;
  for (long r = 0; r < pairs; ++r) {
    for (int zb = 0; zb < p; ++zb) {
      for (int zc = 0; zc < p; ++zc) {
        for (int b = 0; b < L.d; ++b) {
          long row = r * L.block + ((static_cast<long>(zb) * p + zc) * L.d + b) * L.tilde;
          for (int tb = 0; tb < p; ++tb) {
            for (int tc = 0; tc < p; ++tc) {
              out(row + ((tb + zb) % p) * p + (tc + zc) % p) = state(row + tb * p + tc);
            }
          }
        }
      }
    }
  }
  state = std::move(out);
}

}  // namespace

Vector apply_bv_circuit(const IpOracle& o, const Vector& in) {
  o.validate();
  const long dim = bv_circuit_dimension(o);
  if (in.size() != dim) throw StructuralError("apply_bv_circuit: input has the wrong dimension");
  Layout L{o.p, o.d, static_cast<long>(o.p) * o.p, static_cast<long>(o.p) * o.p * o.d * o.p * o.p, o.seeds(), o.l};
  const Matrix f = qudit_fourier(o.p);
  const std::vector<Matrix> blocks = oracle_blocks(o);
  Vector state = in;
  apply_fourier_stage(state, L, f);
  apply_blocks(state, L, blocks, false);
  apply_add(state, L);
  apply_blocks(state, L, blocks, true);
  apply_fourier_stage(state, L, f.adjoint());
  return state;
}

BvResult run_bv_extraction(const IpOracle& o) {
  o.validate();
  const long dim = bv_circuit_dimension(o);
  const int p = o.p;
  const long tilde = static_cast<long>(p) * p;
  const long block = tilde * o.d * tilde;
  const long corner = (p - 1) * p + (p - 1);  // |p−1, p−1> on Z̃^B Z̃^C

  Vector in = Vector::Zero(dim);
  for (int b = 0; b < o.d; ++b) in(b * tilde + corner) = o.rho(b);
  Vector out = apply_bv_circuit(o, in);

  BvResult res{};
  const int pairs = o.seeds() * o.seeds();
  res.distribution.assign(pairs, 0.0);
  for (int r = 0; r < pairs; ++r) res.distribution[r] = out.segment(static_cast<long>(r) * block, block).squaredNorm();
  const int hit = o.pair_index(seed_index(o.xb, p), seed_index(o.xc, p));
  res.rhat_marginal = res.distribution[hit];
  Complex overlap = 0.0;
  for (int b = 0; b < o.d; ++b) overlap += std::conj(o.rho(b)) * out(static_cast<long>(hit) * block + b * tilde + corner);
  res.recovery_prob = std::norm(overlap);
  return res;
}

// -- Simultaneous guessing -------------------------------------------------------

double simultaneous_ip_guess_prob(const std::vector<CqEntry>& ensemble, const std::vector<Povm>& bob,
                                  const std::vector<Povm>& charlie, int p, int l) {
  if (p < 2 || l < 1) throw ParameterError("simultaneous_ip_guess_prob: bad p or l");
  const int seeds = ipow(p, l);
  if (static_cast<int>(bob.size()) != seeds || static_cast<int>(charlie.size()) != seeds) {
    throw StructuralError("simultaneous_ip_guess_prob: need one measurement per seed");
  }
  double total_prob = 0.0;
  double value = 0.0;
  for (const auto& e : ensemble) {
    if (static_cast<int>(e.xb.size()) != l || static_cast<int>(e.xc.size()) != l) {
      throw StructuralError("simultaneous_ip_guess_prob: secret length mismatch");
    }
    for (int v : e.xb) {
      if (v < 0 || v >= p) throw StructuralError("simultaneous_ip_guess_prob: secret symbol outside F_p");
    }
    for (int v : e.xc) {
      if (v < 0 || v >= p) throw StructuralError("simultaneous_ip_guess_prob: secret symbol outside F_p");
    }
    const Dims& dims = e.bc.dims();
    if (dims.size() != 2) throw StructuralError("simultaneous_ip_guess_prob: state must be on B ⊗ C");
    total_prob += e.prob;
    double inner = 0.0;
    for (int rb = 0; rb < seeds; ++rb) {
      const Povm& mb = bob[rb];
      if (mb.dimension() != dims[0] || mb.outcomes() != p) {
        throw StructuralError("simultaneous_ip_guess_prob: Bob's measurement does not fit");
      }
      const int ib = seed_dot(e.xb, rb, p);
      for (int rc = 0; rc < seeds; ++rc) {
        const Povm& mc = charlie[rc];
        if (mc.dimension() != dims[1] || mc.outcomes() != p) {
          throw StructuralError("simultaneous_ip_guess_prob: Charlie's measurement does not fit");
        }
        const int ic = seed_dot(e.xc, rc, p);
        for (int j = 0; j < p; ++j) {
          int k = (p - j) % p;
          Matrix op = kron(mb.element((ib + j) % p), mc.element((ic + k) % p));
          inner += (op * e.bc.matrix()).trace().real();
        }
      }
    }
    value += e.prob * inner / (static_cast<double>(seeds) * seeds);
  }
  if (std::abs(total_prob - 1.0) > kTolerance) {
    throw ParameterError("simultaneous_ip_guess_prob: ensemble probabilities must sum to 1");
  }
  return value;
}

// -- Landscape -------------------------------------------------------------------

GridMinimum p3_grid_minimum(double a0, int steps) {
  if (!(a0 >= 0.0 && a0 <= 1.0) || steps < 1) throw ParameterError("p3_grid_minimum: bad arguments");
  GridMinimum best{std::numeric_limits<double>::infinity(), 0.0};
  for (int i = 0; i <= steps; ++i) {
    double a1 = (1.0 - a0) * i / steps;
    double v = amplitude_identity({a0, a1, std::max(0.0, 1.0 - a0 - a1)}, 3);
    if (v < best.value) best = {v, a1};
  }
  return best;
}

ZeroSum p5_zero_sum(double eps) {
  const double a0 = 0.2 + eps / 2.0;
  if (!(eps > 0.0 && a0 < 1.0)) throw ParameterError("p5_zero_sum: eps out of range");
  auto weights = [a0](double t) {
    double lo = (1.0 - a0 - t) / 4.0;
    double hi = (1.0 - a0 + t) / 4.0;
    return std::vector<double>{a0, lo, hi, hi, lo};
  };
  auto real_part = [&](double t) {
    auto a = weights(t);
    double re = 0.0;
    for (int j = 0; j < 5; ++j) re += a[j] * std::cos(2.0 * std::numbers::pi * j / 5.0);
    return re;
  };
  double lo = 0.0;
  double hi = 1.0 - a0;
  if (!(real_part(lo) > 0.0 && real_part(hi) < 0.0)) {
    throw ParameterError("p5_zero_sum: no sign change, eps too large");
  }
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (real_part(mid) > 0.0 ? lo : hi) = mid;
  }
  double t = std::abs(real_part(lo)) < std::abs(real_part(hi)) ? lo : hi;
  ZeroSum z{t, 0.0, weights(t)};
  z.value = amplitude_identity(z.a, 5);
  return z;
}

}  // namespace divkecm
