#include <gtest/gtest.h>

#include "divkecm/errors.h"
#include "divkecm/extract.h"
#include "oracles.h"

using namespace divkecm;

namespace {

std::vector<int> digits(int p, int l, int v) {
  std::vector<int> x(l);
  for (int j = l - 1; j >= 0; --j) {
    x[j] = v % p;
    v /= p;
  }
  return x;
}

// Class weights with a0 on the diagonal class and the rest spread evenly
// over the other classes (j fixed to 0, k = class).
std::vector<std::vector<double>> class_weights(int p, double a0) {
  std::vector<std::vector<double>> w(p, std::vector<double>(p, 0.0));
  w[0][0] = a0;
  for (int k = 1; k < p; ++k) w[0][k] = (1 - a0) / (p - 1);
  return w;
}

}  // namespace

TEST(Extract, QuditFourier) {
  Matrix f2 = qudit_fourier(2);
  EXPECT_NEAR(std::abs(f2(0, 0) - 1 / std::sqrt(2.0)), 0, 1e-12);
  EXPECT_NEAR(std::abs(f2(1, 1) + 1 / std::sqrt(2.0)), 0, 1e-12);
  for (int p : {2, 3, 5}) {
    Matrix f = qudit_fourier(p);
    EXPECT_LT((f * f.adjoint() - Matrix::Identity(p, p)).norm(), 1e-9);
  }
  Matrix f3 = qudit_fourier(3);
  for (int k = 0; k < 3; ++k) {
    oracle::cplx want = std::polar(1.0, 2 * oracle::kPi * k / 3) / std::sqrt(3.0);
    EXPECT_NEAR(std::abs(f3(k, 1) - want), 0, 1e-12);
  }
  EXPECT_ANY_THROW(qudit_fourier(1));
}

TEST(Extract, AmplitudeIdentity) {
  EXPECT_NEAR(amplitude_identity({1, 0}, 2), 1, 1e-12);
  for (double eps : {0.1, 0.3, 0.5}) {
    EXPECT_NEAR(amplitude_identity({0.5 + eps / 2, 0.5 - eps / 2}, 2), eps * eps, 1e-12);
    const double a0 = 1.0 / 3 + eps / 2;
    EXPECT_NEAR(amplitude_identity({a0, (1 - a0) / 2, (1 - a0) / 2}, 3), 9 * eps * eps / 16, 1e-12);
    EXPECT_NEAR(amplitude_identity({a0, (1 - a0) / 2, (1 - a0) / 2}, 3), 0.25 * (3 * a0 - 1) * (3 * a0 - 1), 1e-12);
  }
  oracle::SplitMix g(1);
  for (int t = 0; t < 20; ++t) {
    std::vector<double> a(3);
    double s = 0;
    for (auto& v : a) s += (v = g.uniform());
    for (auto& v : a) v /= s;
    EXPECT_NEAR(amplitude_identity(a, 3), oracle::amplitude_sum(a), 1e-12);
  }
  EXPECT_THROW(amplitude_identity({0.5, 0.6}, 2), ParameterError);
  EXPECT_THROW(amplitude_identity({1.2, -0.2}, 2), ParameterError);
}

TEST(Extract, PerfectOracleRecoversExactly) {
  for (auto [p, l] : {std::pair{2, 1}, {2, 2}, {2, 3}, {3, 1}, {3, 2}}) {
    const int n = static_cast<int>(std::pow(p, l));
    for (int v = 0; v < n; v += std::max(1, n / 4)) {
      IpOracle o = perfect_oracle(p, l, digits(p, l, v), digits(p, l, n - 1 - v));
      BvResult r = run_bv_extraction(o);
      EXPECT_NEAR(r.recovery_prob, 1.0, 1e-9);
      double total = 0;
      for (double d : r.distribution) total += d;
      EXPECT_NEAR(total, 1.0, 1e-9);
    }
  }
}

TEST(Extract, ClassOracleValue) {
  // a0 = 0.9, a1 = 0.1 at p = 2, l = 2 gives (0.9 − 0.1)².
  IpOracle o = class_oracle(2, 2, {1, 0}, {1, 1}, class_weights(2, 0.9));
  EXPECT_NEAR(run_bv_extraction(o).recovery_prob, 0.64, 1e-9);
  EXPECT_NEAR(oracle_guess_prob(o), 0.9, 1e-12);
}

TEST(Extract, RandomOraclesMatchIdentity) {
  Rng rng(5);
  for (auto [p, l] : {std::pair{2, 1}, {2, 2}, {3, 1}}) {
    for (int t = 0; t < 10; ++t) {
      IpOracle o = random_oracle(p, l, 2, rng);
      BvResult r = run_bv_extraction(o);
      auto a = aggregate_classes(o);
      EXPECT_NEAR(r.recovery_prob, oracle::amplitude_sum(a), 1e-9);
      EXPECT_GE(r.rhat_marginal, r.recovery_prob - 1e-12);
    }
  }
}

TEST(Extract, ContrapositiveOnClassFamilies) {
  for (double eps : {0.1, 0.2, 0.3}) {
    IpOracle o2 = class_oracle(2, 2, {0, 1}, {1, 0}, class_weights(2, 0.5 + eps));
    EXPECT_GE(oracle_guess_prob(o2), 0.5 + eps - 1e-12);
    EXPECT_GE(run_bv_extraction(o2).recovery_prob, eps * eps);
    IpOracle o3 = class_oracle(3, 1, {2}, {1}, class_weights(3, 1.0 / 3 + eps));
    EXPECT_GE(run_bv_extraction(o3).recovery_prob, 9 * eps * eps / 16);
  }
}

TEST(Extract, CircuitIsUnitary) {
  Rng rng(8);
  // Full matrix check on the smallest instance.
  IpOracle small = random_oracle(2, 1, 2, rng);
  const long n = bv_circuit_dimension(small);
  Matrix u(n, n);
  for (long i = 0; i < n; ++i) {
    Vector e = Vector::Zero(n);
    e(i) = 1;
    u.col(i) = apply_bv_circuit(small, e);
  }
  EXPECT_LT((u.adjoint() * u - Matrix::Identity(n, n)).norm(), 1e-8);
  // Norm and inner products preserved at every supported size.
  for (auto [p, l] : {std::pair{2, 1}, {2, 2}, {2, 3}, {2, 4}, {2, 5}, {3, 1}, {3, 2}, {3, 3}}) {
    IpOracle o = random_oracle(p, l, 1, rng);
    const long dim = bv_circuit_dimension(o);
    Vector a(dim), b(dim);
    for (long i = 0; i < dim; ++i) {
      a(i) = Complex(rng.uniform() - 0.5, rng.uniform() - 0.5);
      b(i) = Complex(rng.uniform() - 0.5, rng.uniform() - 0.5);
    }
    Vector ua = apply_bv_circuit(o, a), ub = apply_bv_circuit(o, b);
    EXPECT_NEAR(std::abs(ua.dot(ub) - a.dot(b)), 0, 1e-8 * dim) << p << "," << l;
  }
}

TEST(Extract, DimensionCap) {
  Rng rng(9);
  EXPECT_THROW(bv_circuit_dimension(perfect_oracle(2, 6, std::vector<int>(6, 0), std::vector<int>(6, 0))),
               StructuralError);
  EXPECT_THROW(bv_circuit_dimension(perfect_oracle(3, 4, std::vector<int>(4, 0), std::vector<int>(4, 0))),
               StructuralError);
}

TEST(Extract, SimultaneousGuessing) {
  // l = 1, p = 2: x^B = x^C = x held as |x>|x>.
  std::vector<CqEntry> ens;
  for (int x = 0; x < 2; ++x) {
    ens.push_back({0.5, {x}, {x}, tensor(basis_ket(x, 2), basis_ket(x, 2)).density()});
  }
  const Povm zero = constant_povm(2, 0, 2);
  const Povm z = computational_basis(2);
  const Povm coin({Matrix::Identity(2, 2) * 0.5, Matrix::Identity(2, 2) * 0.5});
  std::vector<Povm> exact{zero, z};
  std::vector<Povm> uniform{coin, coin};
  EXPECT_NEAR(simultaneous_ip_guess_prob(ens, exact, exact, 2, 1), 1.0, 1e-12);
  EXPECT_NEAR(simultaneous_ip_guess_prob(ens, uniform, uniform, 2, 1), 0.5, 1e-12);
  EXPECT_NEAR(simultaneous_ip_guess_prob(ens, exact, uniform, 2, 1), 0.5, 1e-12);
  EXPECT_ANY_THROW(simultaneous_ip_guess_prob(ens, {zero}, exact, 2, 1));
}

TEST(Extract, Landscape) {
  for (double a0 : {0.4, 0.5, 0.7}) {
    GridMinimum g = p3_grid_minimum(a0, 100000);
    EXPECT_NEAR(g.value, 0.25 * (3 * a0 - 1) * (3 * a0 - 1), 1e-6);
    EXPECT_NEAR(g.argmin_a1, (1 - a0) / 2, 1e-3);
  }
  ZeroSum z = p5_zero_sum(0.1);
  EXPECT_LT(z.value, 1e-12);
  EXPECT_NEAR(z.a[0], 0.2 + 0.05, 1e-12);
  double total = 0;
  for (double v : z.a) {
    EXPECT_GE(v, 0);
    total += v;
  }
  EXPECT_NEAR(total, 1, 1e-12);
  EXPECT_LT(oracle::amplitude_sum(z.a), 1e-12);
}
