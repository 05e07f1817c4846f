#include "divkecm/qcore.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace divkecm {

namespace {

void check_dims(const Dims& dims, int length, const char* what) {
  if (dims.empty()) {
    throw StructuralError(std::string(what) + ": empty dims");
  }
  for (int d : dims) {
    if (d < 1) {
      throw StructuralError(std::string(what) + ": subsystem dimension must be positive");
    }
  }
  if (total_dimension(dims) != length) {
    throw StructuralError(std::string(what) + ": product of dims does not match length");
  }
}

double hermitian_defect(const Matrix& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

Matrix psd_sqrt(const Matrix& e) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(e);
  Eigen::VectorXd vals = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * vals.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

bool is_projector(const Matrix& e) { return (e * e - e).cwiseAbs().maxCoeff() < 1e-12; }

// Normalizes an unnormalized conditional state whose weight was predicted to
// be `expected`. Fails hard when the actual trace drifted away from it.
DensityOp renormalize(Matrix m, Dims dims, double expected) {
  double tr = m.trace().real();
  if (expected <= 0.0 || std::abs(tr / expected - 1.0) > kDriftLimit) {
    throw StructuralError("conditioning drift exceeds 1e-6");
  }
  m /= tr;
  return DensityOp::trusted(std::move(m), std::move(dims));
}

int sample_index(const std::vector<double>& probs, Rng& rng) {
  double u = rng.uniform();
  double acc = 0.0;
  int last_nonzero = 0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (probs[k] > 0.0) {
      last_nonzero = static_cast<int>(k);
    }
    acc += probs[k];
    if (u < acc) {
      return static_cast<int>(k);
    }
  }
  return last_nonzero;
}

}  // namespace

int total_dimension(const Dims& dims) {
  return std::accumulate(dims.begin(), dims.end(), 1, std::multiplies<int>());
}

// -- StateVec ----------------------------------------------------------------

StateVec::StateVec(Vector amplitudes, Dims dims) : amplitudes_(std::move(amplitudes)), dims_(std::move(dims)) {
  check_dims(dims_, static_cast<int>(amplitudes_.size()), "StateVec");
  for (int d : dims_) {
    if (d < 2) {
      throw StructuralError("StateVec: subsystem dimension must be at least 2");
    }
  }
  if (std::abs(amplitudes_.squaredNorm() - 1.0) > kTolerance) {
    throw ParameterError("StateVec: amplitudes are not normalized");
  }
}

StateVec::StateVec(Vector amplitudes) : StateVec(amplitudes, Dims{static_cast<int>(amplitudes.size())}) {}

DensityOp StateVec::density() const {
  return DensityOp::trusted(amplitudes_ * amplitudes_.adjoint(), dims_);
}

// -- DensityOp ---------------------------------------------------------------

DensityOp::DensityOp(Matrix matrix, Dims dims, Unchecked) : matrix_(std::move(matrix)), dims_(std::move(dims)) {}

DensityOp::DensityOp(Matrix matrix, Dims dims) : matrix_(std::move(matrix)), dims_(std::move(dims)) {
  if (matrix_.rows() != matrix_.cols()) {
    throw StructuralError("DensityOp: matrix is not square");
  }
  check_dims(dims_, static_cast<int>(matrix_.rows()), "DensityOp");
  if (hermitian_defect(matrix_) > kTolerance) {
    throw ParameterError("DensityOp: matrix is not Hermitian");
  }
  if (std::abs(matrix_.trace().real() - 1.0) > kTolerance) {
    throw ParameterError("DensityOp: trace is not 1");
  }
  if (min_eigenvalue() < -kTolerance) {
    throw ParameterError("DensityOp: matrix has a negative eigenvalue");
  }
}

DensityOp::DensityOp(Matrix matrix) : DensityOp(matrix, Dims{static_cast<int>(matrix.rows())}) {}

DensityOp DensityOp::trusted(Matrix matrix, Dims dims) {
  if (matrix.rows() != matrix.cols()) {
    throw StructuralError("DensityOp: matrix is not square");
  }
  check_dims(dims, static_cast<int>(matrix.rows()), "DensityOp");
  if (hermitian_defect(matrix) > kDriftLimit || std::abs(matrix.trace().real() - 1.0) > kDriftLimit) {
    throw StructuralError("DensityOp: numerical drift exceeds 1e-6");
  }
  Matrix sym = 0.5 * (matrix + matrix.adjoint());
  sym /= sym.trace().real();
  return DensityOp(std::move(sym), std::move(dims), Unchecked{});
}

double DensityOp::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(matrix_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// -- Povm / Channel / Instrument ----------------------------------------------

Povm::Povm(std::vector<Matrix> elements) : elements_(std::move(elements)) {
  if (elements_.empty()) {
    throw StructuralError("Povm: no elements");
  }
  dim_ = static_cast<int>(elements_.front().rows());
  Matrix sum = Matrix::Zero(dim_, dim_);
  for (const auto& e : elements_) {
    if (e.rows() != dim_ || e.cols() != dim_) {
      throw StructuralError("Povm: elements have mismatched shapes");
    }
    if (hermitian_defect(e) > kTolerance) {
      throw ParameterError("Povm: element is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(e, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -kTolerance) {
      throw ParameterError("Povm: element is not positive semidefinite");
    }
    sum += e;
  }
  if ((sum - Matrix::Identity(dim_, dim_)).cwiseAbs().maxCoeff() > kTolerance) {
    throw ParameterError("Povm: elements do not sum to identity");
  }
  roots_.reserve(elements_.size());
  for (const auto& e : elements_) {
    roots_.push_back(is_projector(e) ? e : psd_sqrt(e));
  }
}

namespace {
void check_trace_preserving(const std::vector<Matrix>& kraus, int in_dim, int out_dim, const char* what) {
  Matrix sum = Matrix::Zero(in_dim, in_dim);
  for (const auto& k : kraus) {
    if (k.cols() != in_dim || k.rows() != out_dim) {
      throw StructuralError(std::string(what) + ": Kraus operator has wrong shape");
    }
    sum += k.adjoint() * k;
  }
  if ((sum - Matrix::Identity(in_dim, in_dim)).cwiseAbs().maxCoeff() > kTolerance) {
    throw StructuralError(std::string(what) + ": map is not trace preserving");
  }
}
}  // namespace

Channel::Channel(std::vector<Matrix> kraus, int in_dim, Dims out_dims)
    : kraus_(std::move(kraus)), in_dim_(in_dim), out_dims_(std::move(out_dims)) {
  if (kraus_.empty()) {
    throw StructuralError("Channel: no Kraus operators");
  }
  check_trace_preserving(kraus_, in_dim_, total_dimension(out_dims_), "Channel");
}

Channel Channel::identity(int dim) { return Channel({Matrix::Identity(dim, dim)}, dim, {dim}); }

Instrument::Instrument(std::vector<Branch> branches, int in_dim, Dims out_dims)
    : branches_(std::move(branches)), in_dim_(in_dim), out_dims_(std::move(out_dims)) {
  if (branches_.empty()) {
    throw StructuralError("Instrument: no branches");
  }
  std::vector<Matrix> all;
  for (const auto& b : branches_) {
    all.insert(all.end(), b.kraus.begin(), b.kraus.end());
  }
  check_trace_preserving(all, in_dim_, total_dimension(out_dims_), "Instrument");
}

Instrument Instrument::from_povm(const Povm& povm) {
  std::vector<Branch> branches;
  for (int k = 0; k < povm.outcomes(); ++k) {
    branches.push_back({k, {povm.roots()[k]}});
  }
  return Instrument(std::move(branches), povm.dimension(), {povm.dimension()});
}

Instrument Instrument::identity(int dim, int outcome) {
  return Instrument({{outcome, {Matrix::Identity(dim, dim)}}}, dim, {dim});
}

// -- Constructors ------------------------------------------------------------

StateVec basis_ket(int index, int dim) {
  if (index < 0 || index >= dim) {
    throw ParameterError("basis_ket: index out of range");
  }
  Vector v = Vector::Zero(dim);
  v(index) = 1.0;
  return StateVec(std::move(v));
}

StateVec angle_ket(double theta) {
  Vector v(2);
  v << std::cos(theta), std::sin(theta);
  return StateVec(std::move(v));
}

StateVec wiesner(int a, int x) {
  if ((a != 0 && a != 1) || (x != 0 && x != 1)) {
    throw ParameterError("wiesner: a and x must be bits");
  }
  if (x == 0) {
    return basis_ket(a, 2);
  }
  const double h = 1.0 / std::sqrt(2.0);
  Vector v(2);
  v << h, a == 0 ? h : -h;
  return StateVec(std::move(v));
}

StateVec bell_phi_plus() {
  const double h = 1.0 / std::sqrt(2.0);
  Vector v = Vector::Zero(4);
  v(0) = h;
  v(3) = h;
  return StateVec(std::move(v), {2, 2});
}

DensityOp werner(double q) {
  if (!(q >= 0.0 && q <= 0.5)) {
    throw ParameterError("werner: q must lie in [0, 1/2]");
  }
  Matrix m = (1.0 - 2.0 * q) * projector(bell_phi_plus()) + (2.0 * q / 4.0) * Matrix::Identity(4, 4);
  return DensityOp(std::move(m), {2, 2});
}

DensityOp maximally_mixed(int dim) {
  return DensityOp(Matrix::Identity(dim, dim) / static_cast<double>(dim), {dim});
}

Matrix projector(const StateVec& psi) { return psi.amplitudes() * psi.amplitudes().adjoint(); }

// -- Measurements ------------------------------------------------------------

Povm computational_basis(int dim) {
  std::vector<Matrix> els;
  for (int k = 0; k < dim; ++k) {
    Matrix e = Matrix::Zero(dim, dim);
    e(k, k) = 1.0;
    els.push_back(std::move(e));
  }
  return Povm(std::move(els));
}

Povm angle_basis(double theta0, double theta1) {
  return Povm({projector(angle_ket(theta0)), projector(angle_ket(theta1))});
}

Povm constant_povm(int dim, int outcome, int outcomes) {
  if (outcome < 0 || outcome >= outcomes) {
    throw ParameterError("constant_povm: outcome out of range");
  }
  std::vector<Matrix> els(outcomes, Matrix::Zero(dim, dim));
  els[outcome] = Matrix::Identity(dim, dim);
  return Povm(std::move(els));
}

namespace {
void check_subsystem(const Dims& dims, int subsystem, int dim, const char* what) {
  if (subsystem < 0 || subsystem >= static_cast<int>(dims.size())) {
    throw StructuralError(std::string(what) + ": subsystem index out of range");
  }
  if (dims[subsystem] != dim) {
    throw StructuralError(std::string(what) + ": operator dimension does not match subsystem");
  }
}
}  // namespace

std::vector<double> outcome_probabilities(const DensityOp& state, const Povm& povm, int subsystem) {
  check_subsystem(state.dims(), subsystem, povm.dimension(), "measure");
  std::vector<double> probs;
  probs.reserve(povm.outcomes());
  double total = 0.0;
  for (const auto& e : povm.elements()) {
    double p = (embed(e, state.dims(), subsystem) * state.matrix()).trace().real();
    p = std::max(p, 0.0);
    probs.push_back(p);
    total += p;
  }
  if (std::abs(total - 1.0) > kTolerance) {
    throw StructuralError("measure: outcome probabilities do not sum to 1");
  }
  return probs;
}

Measurement measure(const DensityOp& state, const Povm& povm, int subsystem, Rng& rng) {
  std::vector<double> probs = outcome_probabilities(state, povm, subsystem);
  int k = sample_index(probs, rng);
  Matrix post = apply_kraus(state.matrix(), state.dims(), subsystem, {povm.roots()[k]});
  return {k, renormalize(std::move(post), state.dims(), probs[k])};
}

DensityOp condition(const DensityOp& state, const Povm& povm, int outcome, int subsystem) {
  std::vector<double> probs = outcome_probabilities(state, povm, subsystem);
  if (outcome < 0 || outcome >= povm.outcomes()) {
    throw StructuralError("condition: outcome out of range");
  }
  if (probs[outcome] <= 0.0) {
    throw ParameterError("condition: outcome has zero probability");
  }
  Matrix post = apply_kraus(state.matrix(), state.dims(), subsystem, {povm.roots()[outcome]});
  return renormalize(std::move(post), state.dims(), probs[outcome]);
}

InstrumentSample sample_instrument(const DensityOp& state, const Instrument& inst, int subsystem, Rng& rng) {
  check_subsystem(state.dims(), subsystem, inst.in_dim(), "sample_instrument");
  Dims out = replace_subsystem(state.dims(), subsystem, inst.out_dims());
  std::vector<Matrix> branch_states;
  std::vector<double> probs;
  for (const auto& b : inst.branches()) {
    Matrix m = apply_kraus(state.matrix(), state.dims(), subsystem, b.kraus);
    probs.push_back(std::max(m.trace().real(), 0.0));
    branch_states.push_back(std::move(m));
  }
  int k = sample_index(probs, rng);
  return {inst.branches()[k].outcome, renormalize(std::move(branch_states[k]), std::move(out), probs[k])};
}

DensityOp apply_channel(const DensityOp& state, const Channel& channel, int subsystem) {
  check_subsystem(state.dims(), subsystem, channel.in_dim(), "apply_channel");
  Matrix m = apply_kraus(state.matrix(), state.dims(), subsystem, channel.kraus());
  return DensityOp::trusted(std::move(m), replace_subsystem(state.dims(), subsystem, channel.out_dims()));
}

// -- Distances and structure -------------------------------------------------

double trace_distance(const DensityOp& rho, const DensityOp& sigma) {
  if (rho.dimension() != sigma.dimension()) {
    throw StructuralError("trace_distance: dimension mismatch");
  }
  Matrix diff = rho.matrix() - sigma.matrix();
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (diff + diff.adjoint()), Eigen::EigenvaluesOnly);
  double d = 0.5 * es.eigenvalues().cwiseAbs().sum();
  return std::clamp(d, 0.0, 1.0);
}

DensityOp partial_trace(const DensityOp& state, const std::vector<int>& keep) {
  if (keep.empty()) {
    throw StructuralError("partial_trace: keep set is empty (result would be a scalar)");
  }
  const Dims& dims = state.dims();
  const int n = static_cast<int>(dims.size());
  std::vector<bool> kept(n, false);
  for (int k : keep) {
    if (k < 0 || k >= n) {
      throw StructuralError("partial_trace: subsystem index out of range");
    }
    kept[k] = true;
  }
  Dims kept_dims, traced_dims;
  for (int i = 0; i < n; ++i) {
    (kept[i] ? kept_dims : traced_dims).push_back(dims[i]);
  }
  const int dk = total_dimension(kept_dims);
  const int dt = traced_dims.empty() ? 1 : total_dimension(traced_dims);

  // Full index for a (kept index, traced index) pair, mixed radix, last
  // subsystem fastest.
  auto full_index = [&](int ki, int ti) {
    int idx = 0;
    int kd = dk, td = dt;
    for (int i = 0; i < n; ++i) {
      int digit;
      if (kept[i]) {
        kd /= dims[i];
        digit = (ki / kd) % dims[i];
      } else {
        td /= dims[i];
        digit = (ti / td) % dims[i];
      }
      idx = idx * dims[i] + digit;
    }
    return idx;
  };

  std::vector<int> table(static_cast<std::size_t>(dk) * dt);
  for (int ki = 0; ki < dk; ++ki) {
    for (int ti = 0; ti < dt; ++ti) {
      table[static_cast<std::size_t>(ki) * dt + ti] = full_index(ki, ti);
    }
  }
  Matrix out = Matrix::Zero(dk, dk);
  for (int r = 0; r < dk; ++r) {
    for (int c = 0; c < dk; ++c) {
      Complex acc = 0.0;
      for (int t = 0; t < dt; ++t) {
        acc += state.matrix()(table[static_cast<std::size_t>(r) * dt + t], table[static_cast<std::size_t>(c) * dt + t]);
      }
      out(r, c) = acc;
    }
  }
  return DensityOp::trusted(std::move(out), std::move(kept_dims));
}

StateVec tensor(const StateVec& a, const StateVec& b) {
  Vector v(a.dimension() * b.dimension());
  for (int i = 0; i < a.dimension(); ++i) {
    v.segment(i * b.dimension(), b.dimension()) = a.amplitudes()(i) * b.amplitudes();
  }
  Dims dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  return StateVec(std::move(v), std::move(dims));
}

DensityOp tensor(const DensityOp& a, const DensityOp& b) {
  Dims dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  return DensityOp::trusted(kron(a.matrix(), b.matrix()), std::move(dims));
}

// -- Raw helpers ---------------------------------------------------------------

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Matrix embed(const Matrix& op, const Dims& dims, int subsystem) {
  if (subsystem < 0 || subsystem >= static_cast<int>(dims.size()) || op.cols() != dims[subsystem]) {
    throw StructuralError("embed: operator does not fit subsystem");
  }
  int left = 1, right = 1;
  for (int i = 0; i < subsystem; ++i) left *= dims[i];
  for (std::size_t i = subsystem + 1; i < dims.size(); ++i) right *= dims[i];
  Matrix out = op;
  if (right > 1) out = kron(out, Matrix::Identity(right, right));
  if (left > 1) out = kron(Matrix::Identity(left, left), out);
  return out;
}

Matrix apply_kraus(const Matrix& rho, const Dims& dims, int subsystem, const std::vector<Matrix>& kraus) {
  Matrix out;
  for (const auto& k : kraus) {
    Matrix full = embed(k, dims, subsystem);
    Matrix term = full * rho * full.adjoint();
    if (out.size() == 0) {
      out = std::move(term);
    } else {
      out += term;
    }
  }
  return out;
}

Dims replace_subsystem(const Dims& dims, int subsystem, const Dims& replacement) {
  Dims out(dims.begin(), dims.begin() + subsystem);
  out.insert(out.end(), replacement.begin(), replacement.end());
  out.insert(out.end(), dims.begin() + subsystem + 1, dims.end());
  return out;
}

}  // namespace divkecm
