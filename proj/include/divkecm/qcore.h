#ifndef DIVKECM_QCORE_H
#define DIVKECM_QCORE_H

// Small-dimension quantum state primitives: pure and mixed states over a list
// of subsystems, POVMs, channels, instruments, Born-rule sampling, partial
// trace and trace distance. Everything is dense; registers are a handful of
// qubits at most.

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "divkecm/errors.h"
#include "divkecm/rng.h"

namespace divkecm {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Dims = std::vector<int>;

inline constexpr double kTolerance = 1e-9;
inline constexpr double kDriftLimit = 1e-6;

int total_dimension(const Dims& dims);

class DensityOp;

class StateVec {
 public:
  StateVec(Vector amplitudes, Dims dims);
  /// Single register of the amplitude length.
  explicit StateVec(Vector amplitudes);

  const Vector& amplitudes() const { return amplitudes_; }
  const Dims& dims() const { return dims_; }
  int dimension() const { return static_cast<int>(amplitudes_.size()); }
  Complex operator[](int i) const { return amplitudes_(i); }

  DensityOp density() const;

 private:
  Vector amplitudes_;
  Dims dims_;
};

class DensityOp {
 public:
  /// Validates Hermiticity, unit trace and positivity (all within 1e-9).
  DensityOp(Matrix matrix, Dims dims);
  explicit DensityOp(Matrix matrix);

  /// For operations that preserve positivity by construction: checks trace
  /// and Hermiticity only, then symmetrizes.
  static DensityOp trusted(Matrix matrix, Dims dims);

  const Matrix& matrix() const { return matrix_; }
  const Dims& dims() const { return dims_; }
  int dimension() const { return static_cast<int>(matrix_.rows()); }
  Complex operator()(int r, int c) const { return matrix_(r, c); }

  double min_eigenvalue() const;

 private:
  struct Unchecked {};
  DensityOp(Matrix matrix, Dims dims, Unchecked);

  Matrix matrix_;
  Dims dims_;
};

/// Positive operators on one register, summing to the identity.
class Povm {
 public:
  explicit Povm(std::vector<Matrix> elements);

  const std::vector<Matrix>& elements() const { return elements_; }
  const Matrix& element(int k) const { return elements_.at(k); }
  /// Lüders Kraus operators sqrt(E_k).
  const std::vector<Matrix>& roots() const { return roots_; }
  int outcomes() const { return static_cast<int>(elements_.size()); }
  int dimension() const { return dim_; }

 private:
  std::vector<Matrix> elements_;
  std::vector<Matrix> roots_;
  int dim_ = 0;
};

/// Trace-preserving map given by Kraus operators. The input register of
/// dimension `in_dim` is replaced by registers `out_dims`.
class Channel {
 public:
  Channel(std::vector<Matrix> kraus, int in_dim, Dims out_dims);

  static Channel identity(int dim);

  const std::vector<Matrix>& kraus() const { return kraus_; }
  int in_dim() const { return in_dim_; }
  const Dims& out_dims() const { return out_dims_; }
  int out_dim() const { return total_dimension(out_dims_); }

 private:
  std::vector<Matrix> kraus_;
  int in_dim_;
  Dims out_dims_;
};

/// Quantum instrument: classical outcome plus a post-measurement state.
/// Branch Kraus operators together must form a trace-preserving map.
class Instrument {
 public:
  struct Branch {
    int outcome = 0;
    std::vector<Matrix> kraus;
  };

  Instrument(std::vector<Branch> branches, int in_dim, Dims out_dims);

  /// Lüders instrument of a POVM; outcome k keeps the register.
  static Instrument from_povm(const Povm& povm);
  /// Do nothing and report `outcome`.
  static Instrument identity(int dim, int outcome = 0);

  const std::vector<Branch>& branches() const { return branches_; }
  int in_dim() const { return in_dim_; }
  const Dims& out_dims() const { return out_dims_; }

 private:
  std::vector<Branch> branches_;
  int in_dim_;
  Dims out_dims_;
};

// -- State constructors ------------------------------------------------------

StateVec basis_ket(int index, int dim);
/// cos(theta)|0> + sin(theta)|1>.
StateVec angle_ket(double theta);
/// H^x |a>.
StateVec wiesner(int a, int x);
/// (|00> + |11>) / sqrt(2).
StateVec bell_phi_plus();
/// (1-2q)|Phi+><Phi+| + 2q I/4, q in [0, 1/2].
DensityOp werner(double q);
DensityOp maximally_mixed(int dim);

// -- Measurements ------------------------------------------------------------

Povm computational_basis(int dim);
/// Two-outcome projective qubit measurement {|theta0>, |theta1>}.
Povm angle_basis(double theta0, double theta1);
/// Single outcome `outcome` always fires; the others are zero operators.
Povm constant_povm(int dim, int outcome, int outcomes);

std::vector<double> outcome_probabilities(const DensityOp& state, const Povm& povm, int subsystem);

struct Measurement {
  int outcome;
  DensityOp post_state;
};

/// Born-rule sample of `povm` on `subsystem`, with the Lüders post-state.
Measurement measure(const DensityOp& state, const Povm& povm, int subsystem, Rng& rng);

/// Normalized post-state for a fixed outcome. Throws if it has zero weight.
DensityOp condition(const DensityOp& state, const Povm& povm, int outcome, int subsystem);

struct InstrumentSample {
  int outcome;
  DensityOp post_state;
};

InstrumentSample sample_instrument(const DensityOp& state, const Instrument& inst, int subsystem,
                                   Rng& rng);

DensityOp apply_channel(const DensityOp& state, const Channel& channel, int subsystem);

// -- Distances and structure -------------------------------------------------

/// Half the trace norm of the difference.
double trace_distance(const DensityOp& rho, const DensityOp& sigma);

DensityOp partial_trace(const DensityOp& state, const std::vector<int>& keep);

StateVec tensor(const StateVec& a, const StateVec& b);
DensityOp tensor(const DensityOp& a, const DensityOp& b);

template <typename T, typename... Rest>
T tensor(const T& a, const T& b, const Rest&... rest) {
  if constexpr (sizeof...(rest) == 0) {
    return tensor(a, b);
  } else {
    return tensor(tensor(a, b), rest...);
  }
}

// -- Raw matrix helpers ------------------------------------------------------

Matrix kron(const Matrix& a, const Matrix& b);

/// I ⊗ op ⊗ I with `op` on `subsystem`. `op` may be rectangular; its column
/// count must match the subsystem dimension.
Matrix embed(const Matrix& op, const Dims& dims, int subsystem);

/// Σ_K (I⊗K⊗I) rho (I⊗K⊗I)†, unnormalized.
Matrix apply_kraus(const Matrix& rho, const Dims& dims, int subsystem, const std::vector<Matrix>& kraus);

/// Dims after replacing `subsystem` with `replacement`.
Dims replace_subsystem(const Dims& dims, int subsystem, const Dims& replacement);

Matrix projector(const StateVec& psi);

}  // namespace divkecm

#endif  // DIVKECM_QCORE_H
