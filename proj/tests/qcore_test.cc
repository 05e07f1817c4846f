#include <gtest/gtest.h>

#include <Eigen/SVD>

#include "divkecm/errors.h"
#include "divkecm/qcore.h"
#include "oracles.h"

using namespace divkecm;

namespace {

// ½ Σ singular values of ρ − σ.
double nuclear_half(const DensityOp& a, const DensityOp& b) {
  Eigen::JacobiSVD<Matrix> svd(a.matrix() - b.matrix());
  return 0.5 * svd.singularValues().sum();
}

DensityOp random_density(int dim, oracle::SplitMix& g) {
  Matrix m(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) m(i, j) = Complex(g.uniform() - 0.5, g.uniform() - 0.5);
  }
  Matrix rho = m * m.adjoint();
  rho /= rho.trace();
  return DensityOp(rho);
}

}  // namespace

TEST(Qcore, StateConstructors) {
  StateVec w = wiesner(0, 0);
  EXPECT_NEAR(std::abs(w[0] - Complex(1, 0)), 0, 1e-12);
  StateVec w11 = wiesner(1, 1);
  EXPECT_NEAR(w11[0].real(), 1 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(w11[1].real(), -1 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(nuclear_half(werner(0), bell_phi_plus().density()), 0, 1e-12);
  EXPECT_NEAR(nuclear_half(werner(0.5), maximally_mixed(4)), 0, 1e-12);
  StateVec k = angle_ket(0.3);
  EXPECT_NEAR(k[0].real(), std::cos(0.3), 1e-12);
  EXPECT_NEAR(k[1].real(), std::sin(0.3), 1e-12);
  EXPECT_THROW(werner(0.6), ParameterError);
  EXPECT_THROW(werner(-0.1), ParameterError);
  EXPECT_THROW(wiesner(2, 0), ParameterError);
}

TEST(Qcore, DensityOpInvariants) {
  Matrix bad = Matrix::Zero(2, 2);
  bad(0, 0) = 2;
  EXPECT_ANY_THROW(DensityOp{bad});
  Matrix nonherm = Matrix::Identity(2, 2) * 0.5;
  nonherm(0, 1) = 0.3;
  EXPECT_ANY_THROW(DensityOp{nonherm});
  for (double q : {0.0, 0.1, 0.25, 0.5}) {
    DensityOp w = werner(q);
    EXPECT_NEAR(w.matrix().trace().real(), 1, 1e-12);
    EXPECT_GE(w.min_eigenvalue(), -1e-9);
  }
}

TEST(Qcore, MeasureBasics) {
  Rng rng(1);
  for (int i = 0; i < 20; ++i) {
    Measurement m = measure(basis_ket(0, 2).density(), computational_basis(2), 0, rng);
    EXPECT_EQ(m.outcome, 0);
  }
  // Bell collapse: Alice's outcome a leaves Bob in |a>.
  for (int a = 0; a < 2; ++a) {
    DensityOp post = condition(werner(0), computational_basis(2), a, 0);
    DensityOp bob = partial_trace(post, {1});
    EXPECT_NEAR(nuclear_half(bob, basis_ket(a, 2).density()), 0, 1e-12);
  }
  EXPECT_THROW(measure(werner(0), computational_basis(3), 0, rng), StructuralError);
}

TEST(Qcore, WernerMarginalIsUniform) {
  Rng rng(2);
  for (double q : {0.0, 0.1}) {
    for (int x = 0; x < 2; ++x) {
      Povm basis = x == 0 ? computational_basis(2) : angle_basis(oracle::kPi / 4, -oracle::kPi / 4);
      auto probs = outcome_probabilities(werner(q), basis, 0);
      EXPECT_NEAR(probs[0], 0.5, 1e-12);
      long ones = 0;
      const long n = 20000;
      for (long i = 0; i < n; ++i) ones += measure(werner(q), basis, 0, rng).outcome;
      EXPECT_TRUE(oracle::within_sigma(ones, n, 0.5));
    }
  }
}

TEST(Qcore, SampledFrequenciesMatchBornRule) {
  oracle::SplitMix g(11);
  Rng rng(12);
  for (int dim : {2, 4}) {
    DensityOp rho = random_density(dim, g);
    Povm povm = computational_basis(dim);
    std::vector<double> expected(dim);
    for (int k = 0; k < dim; ++k) expected[k] = rho(k, k).real();
    std::vector<long> counts(dim, 0);
    const long n = 100000;
    for (long i = 0; i < n; ++i) ++counts[measure(rho, povm, 0, rng).outcome];
    for (int k = 0; k < dim; ++k) EXPECT_TRUE(oracle::within_sigma(counts[k], n, expected[k])) << dim << " " << k;
  }
}

TEST(Qcore, WiesnerMeasuredInOwnBasisIsCertain) {
  for (int a = 0; a < 2; ++a) {
    for (int x = 0; x < 2; ++x) {
      Povm basis = x == 0 ? computational_basis(2) : angle_basis(oracle::kPi / 4, -oracle::kPi / 4);
      auto probs = outcome_probabilities(wiesner(a, x).density(), basis, 0);
      EXPECT_NEAR(probs[a], 1.0, 1e-12);
    }
  }
}

TEST(Qcore, TraceDistance) {
  DensityOp z0 = basis_ket(0, 2).density();
  DensityOp z1 = basis_ket(1, 2).density();
  DensityOp plus = wiesner(0, 1).density();
  EXPECT_NEAR(trace_distance(z0, z0), 0, 1e-12);
  EXPECT_NEAR(trace_distance(z0, z1), 1, 1e-12);
  EXPECT_NEAR(trace_distance(z0, plus), 1 / std::sqrt(2.0), 1e-12);
  EXPECT_THROW(trace_distance(z0, werner(0)), StructuralError);

  oracle::SplitMix g(5);
  for (int i = 0; i < 30; ++i) {
    int dim = i % 2 ? 2 : 4;
    DensityOp a = random_density(dim, g), b = random_density(dim, g), c = random_density(dim, g);
    double dab = trace_distance(a, b);
    EXPECT_NEAR(dab, nuclear_half(a, b), 1e-9);
    EXPECT_NEAR(dab, trace_distance(b, a), 1e-12);
    EXPECT_LE(dab, trace_distance(a, c) + trace_distance(c, b) + 1e-12);
    EXPECT_GE(dab, 0);
    EXPECT_LE(dab, 1 + 1e-12);
  }
}

TEST(Qcore, PartialTraceAndTensor) {
  EXPECT_NEAR(nuclear_half(partial_trace(werner(0), {0}), maximally_mixed(2)), 0, 1e-12);
  EXPECT_NEAR(nuclear_half(partial_trace(werner(0.2), {1}), maximally_mixed(2)), 0, 1e-12);
  oracle::SplitMix g(8);
  DensityOp rho = random_density(2, g);
  DensityOp sigma = random_density(3, g);
  DensityOp both = tensor(rho, sigma);
  EXPECT_EQ(both.dims(), (Dims{2, 3}));
  EXPECT_EQ(both.dimension(), 6);
  EXPECT_NEAR(nuclear_half(partial_trace(both, {0}), rho), 0, 1e-12);
  EXPECT_NEAR(nuclear_half(partial_trace(tensor(rho, maximally_mixed(2)), {0}), rho), 0, 1e-12);
  EXPECT_NEAR(nuclear_half(partial_trace(both, {0, 1}), both), 0, 1e-12);
  EXPECT_ANY_THROW(partial_trace(both, {}));

  StateVec k01 = tensor(basis_ket(0, 2), basis_ket(1, 2));
  EXPECT_NEAR(std::abs(k01[1] - Complex(1, 0)), 0, 1e-12);
}
