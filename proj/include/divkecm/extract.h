#ifndef DIVKECM_EXTRACT_H
#define DIVKECM_EXTRACT_H

// Two-party Bernstein–Vazirani extraction over F_p: oracles given by their
// amplitude tables, the exact five-stage circuit, the aggregated amplitude
// identity, and simultaneous inner-product guessing on CQ ensembles.

#include <vector>

#include "divkecm/qcore.h"
#include "divkecm/rng.h"

namespace divkecm {

/// F_p|j> = p^{-1/2} Σ_k ω^{jk}|k>, ω = e^{2πi/p}. Any p ≥ 2.
Matrix qudit_fourier(int p);

/// |Σ_j a_j ω^j|² for a probability vector a of length p.
double amplitude_identity(const std::vector<double>& a, int p);

/// Joint action of Bob's and Charlie's inner-product unitaries for one fixed
/// pair (x^B, x^C):
///
///   |r^B r^C>|00>|ρ>  ->  |r^B r^C> Σ_{j,k} α^{r}_{jk} |x^B·r^B + j, x^C·r^C + k> |σ^{r}_{jk}>
///
/// The residual register BC has dimension `d`. Tables are indexed by
/// pair_index(rb, rc) * p² + j * p + k.
struct IpOracle {
  int p = 2;
  int l = 1;
  int d = 1;
  std::vector<int> xb;
  std::vector<int> xc;
  std::vector<Complex> alpha;
  std::vector<Vector> sigma;
  Vector rho;

  int seeds() const;  // p^l
  int pair_index(int rb, int rc) const { return rb * seeds() + rc; }
  int table_index(int rb, int rc, int j, int k) const { return (pair_index(rb, rc) * p + j) * p + k; }

  /// Normalization of every α row, residual states and ρ; throws otherwise.
  void validate() const;
};

/// Digits of seed index r (most significant first) dotted with x, mod p.
int seed_dot(const std::vector<int>& x, int r, int p);

/// α_00 = 1 for every seed pair.
IpOracle perfect_oracle(int p, int l, std::vector<int> xb, std::vector<int> xc);
/// Seed-independent amplitudes α_{jk} = sqrt(w[j][k]) with σ_{jk} = ρ.
IpOracle class_oracle(int p, int l, std::vector<int> xb, std::vector<int> xc,
                      const std::vector<std::vector<double>>& w);
/// Random x, α table and residual states with a d-dimensional BC register.
IpOracle random_oracle(int p, int l, int d, Rng& rng);

/// a_{k'} = p^{-2l} Σ_r Σ_{j'} |α^r_{j', k'−j'}|².
std::vector<double> aggregate_classes(const IpOracle& o);

/// Probability that the oracle answers satisfy j + k ≡ 0 (mod p), averaged
/// over seeds: the quantity the good-pair assumption lower-bounds.
double oracle_guess_prob(const IpOracle& o);

struct BvResult {
  /// |<x^B x^C, 00, ρ, p−1 p−1| U5 U4 U3 U2 U1 |0 0, 00, ρ, p−1 p−1>|².
  double recovery_prob;
  /// Probability that measuring R^B R^C gives (x^B, x^C); at least recovery_prob.
  double rhat_marginal;
  /// Distribution of the R^B R^C measurement, indexed by pair_index.
  std::vector<double> distribution;
};

/// Largest statevector the circuit will build.
inline constexpr long kMaxCircuitDimension = 1L << 20;

/// Total dimension of R^B R^C Z^B Z^C BC Z̃^B Z̃^C. Throws StructuralError
/// when outside the supported (p, l) grid (p = 2: l ≤ 5; p = 3: l ≤ 3).
long bv_circuit_dimension(const IpOracle& o);

/// Applies U5 U4 U3 U2 U1 to an arbitrary vector in register order
/// R^B, R^C, Z^B, Z^C, BC, Z̃^B, Z̃^C. U2 completes each seed block to a
/// unitary by Gram–Schmidt; U5 applies F_p^† to the registers U1 touched.
Vector apply_bv_circuit(const IpOracle& o, const Vector& in);

BvResult run_bv_extraction(const IpOracle& o);

/// Unit vector completed to a unitary (first column `v`) by Gram–Schmidt.
Matrix complete_to_unitary(const Vector& v);

// -- Simultaneous inner-product guessing ---------------------------------------

struct CqEntry {
  double prob;
  std::vector<int> xb;
  std::vector<int> xc;
  DensityOp bc;  // dims {dB, dC}
};

/// E over x and independent uniform seeds of
/// Pr[∨_{j+k≡0} (G^B = x^B·r^B + j) ∧ (G^C = x^C·r^C + k)], where Bob
/// measures bob[r^B] (p outcomes) and Charlie charlie[r^C].
double simultaneous_ip_guess_prob(const std::vector<CqEntry>& ensemble, const std::vector<Povm>& bob,
                                  const std::vector<Povm>& charlie, int p, int l);

// -- Lower-bound landscape -----------------------------------------------------

struct GridMinimum {
  double value;
  double argmin_a1;
};

/// min over a1 ∈ [0, 1−a0] (grid of `steps`+1 points) of |a0 + a1 ω + a2 ω²|²
/// with a2 = 1 − a0 − a1.
GridMinimum p3_grid_minimum(double a0, int steps);

struct ZeroSum {
  double t;
  double value;  // |Σ a_j ω^j|² at t
  std::vector<double> a;
};

/// p = 5: a0 = 1/5 + ε/2, a1 = a4 = (1−a0−t)/4, a2 = a3 = (1−a0+t)/4;
/// bisection on t for a vanishing real part.
ZeroSum p5_zero_sum(double eps);

}  // namespace divkecm

#endif  // DIVKECM_EXTRACT_H
