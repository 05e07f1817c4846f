#include "divkecm/games.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace divkecm {

namespace {

constexpr double kPi = std::numbers::pi;

void check_bit(int v, const char* what) {
  if (v != 0 && v != 1) {
    throw StructuralError(std::string(what) + " must be 0 or 1");
  }
}

// tr[(A ⊗ B ⊗ ...) rho] for a product of single-register operators.
double product_expectation(const Matrix& rho, const std::vector<const Matrix*>& ops) {
  Matrix full = *ops.front();
  for (std::size_t i = 1; i < ops.size(); ++i) {
    full = kron(full, *ops[i]);
  }
  return (full * rho).trace().real();
}

}  // namespace

// -- CHSH --------------------------------------------------------------------

Povm ideal_alice_measurement(int x) {
  check_bit(x, "Alice's input");
  return x == 0 ? angle_basis(0.0, kPi / 2) : angle_basis(kPi / 4, -kPi / 4);
}

Povm ideal_bob_measurement(int y) {
  check_bit(y, "Bob's input");
  return y == 0 ? angle_basis(kPi / 8, -3 * kPi / 8) : angle_basis(-kPi / 8, 3 * kPi / 8);
}

ChshStrategy ideal_chsh_strategy(double q) {
  return ChshStrategy{werner(q),
                      {ideal_alice_measurement(0), ideal_alice_measurement(1)},
                      {ideal_bob_measurement(0), ideal_bob_measurement(1)}};
}

double chsh_value(const ChshStrategy& s) {
  const Dims& dims = s.shared_state.dims();
  if (dims.size() != 2) {
    throw StructuralError("chsh_value: shared state must have two registers");
  }
  for (int i = 0; i < 2; ++i) {
    if (s.alice[i].dimension() != dims[0] || s.bob[i].dimension() != dims[1] || s.alice[i].outcomes() != 2 ||
        s.bob[i].outcomes() != 2) {
      throw StructuralError("chsh_value: measurements do not fit the shared state");
    }
  }
  double value = 0.0;
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      for (int a = 0; a < 2; ++a) {
        int b = a ^ (x & y);
        value += 0.25 * product_expectation(s.shared_state.matrix(), {&s.alice[x].element(a), &s.bob[y].element(b)});
      }
    }
  }
  return std::clamp(value, 0.0, 1.0);
}

ClassicalChshResult classical_chsh_value(bool constant_only) {
  // A response function f: {0,1} -> {0,1} is encoded as f(0) | f(1) << 1.
  // Codes 0 and 3 are the constant functions.
  std::vector<int> functions = constant_only ? std::vector<int>{0, 3} : std::vector<int>{0, 1, 2, 3};
  int best = -1;
  int count = 0;
  for (int fa : functions) {
    for (int fb : functions) {
      int wins = 0;
      for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) {
          int a = (fa >> x) & 1;
          int b = (fb >> y) & 1;
          wins += ((a ^ b) == (x & y)) ? 1 : 0;
        }
      }
      if (wins > best) {
        best = wins;
        count = 1;
      } else if (wins == best) {
        ++count;
      }
    }
  }
  // Ratios of small integers by a power of two are exact in binary.
  return {best / 4.0, count};
}

// -- Monogamy ------------------------------------------------------------------

Channel measure_and_broadcast(double theta) {
  std::vector<Matrix> kraus;
  for (int k = 0; k < 2; ++k) {
    Vector out = Vector::Zero(4);
    out(k * 2 + k) = 1.0;
    kraus.push_back(out * angle_ket(theta + k * kPi / 2).amplitudes().adjoint());
  }
  return Channel(std::move(kraus), 2, {2, 2});
}

double monogamy_value(const Channel& split, const std::array<Povm, 2>& bob, const std::array<Povm, 2>& charlie) {
  if (split.in_dim() != 2 || split.out_dims().size() != 2) {
    throw StructuralError("monogamy_value: split must map a qubit to two registers");
  }
  double total = 0.0;
  for (int x = 0; x < 2; ++x) {
    if (bob[x].dimension() != split.out_dims()[0] || charlie[x].dimension() != split.out_dims()[1]) {
      throw StructuralError("monogamy_value: measurement does not fit split output");
    }
    for (int a = 0; a < 2; ++a) {
      DensityOp shared = apply_channel(wiesner(a, x).density(), split, 0);
      total += product_expectation(shared.matrix(), {&bob[x].element(a), &charlie[x].element(a)});
    }
  }
  return total / 4.0;
}

double monogamy_broadcast_value() {
  Povm z = computational_basis(2);
  return monogamy_value(measure_and_broadcast(kPi / 8), {z, z}, {z, z});
}

// -- Cloning game ----------------------------------------------------------------

void CloneGameSpec::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw ParameterError("CloneGameSpec: gamma must lie in (0, 1)");
  }
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw ParameterError("CloneGameSpec: alpha must lie in [0, 1)");
  }
}

namespace {
double second_round_weight(double alpha, int x, int y) {
  if (y == kBlank) return alpha;
  return y == x ? 1.0 - alpha : 0.0;
}
}  // namespace

double clone_input_weight(const CloneGameSpec& spec, const CloneInputs& in) {
  double pu = in.u == kKeep ? 1.0 - spec.gamma : spec.gamma / 2.0;
  return 0.5 * pu * second_round_weight(spec.alpha, in.x, in.y) * second_round_weight(spec.alpha, in.x, in.z);
}

CloneInputs sample_clone_inputs(const CloneGameSpec& spec, Rng& rng) {
  CloneInputs in{};
  in.x = rng.bit();
  in.u = rng.bernoulli(1.0 - spec.gamma) ? kKeep : rng.bit();
  in.y = rng.bernoulli(spec.alpha) ? kBlank : in.x;
  in.z = rng.bernoulli(spec.alpha) ? kBlank : in.x;
  return in;
}

bool clone_win_predicate(const WinRecord& r) {
  check_bit(r.x, "x");
  check_bit(r.a, "a");
  check_bit(r.s, "s");
  check_bit(r.b, "b");
  check_bit(r.c, "c");
  if (r.u != 0 && r.u != 1 && r.u != kKeep) {
    throw StructuralError("u must be 0, 1 or keep");
  }
  for (int v : {r.y, r.z}) {
    if (v != 0 && v != 1 && v != kBlank) {
      throw StructuralError("second-round input must be 0, 1 or blank");
    }
  }
  if (r.u != kKeep) {
    return (r.a ^ r.s) == (r.x & r.u);
  }
  if (r.y == kBlank && r.z == kBlank) return true;
  if (r.y == kBlank) return true;
  if (r.z == kBlank) return true;
  return r.b == r.a && r.c == r.a;
}

void CloneStrategy::validate() const {
  const Dims& d = shared.dims();
  if (d.size() != 2) {
    throw StructuralError("CloneStrategy: shared state must be Alice ⊗ Barlie");
  }
  if (total_dimension(d) > kMaxStrategyDimension) {
    throw StructuralError("CloneStrategy: shared state exceeds the 4-qubit cap");
  }
  for (int x = 0; x < 2; ++x) {
    if (alice[x].dimension() != d[0] || alice[x].outcomes() != 2) {
      throw StructuralError("CloneStrategy: Alice's measurement does not fit");
    }
  }
  for (int u = 0; u < 3; ++u) {
    const Instrument& inst = barlie[u];
    if (inst.in_dim() != d[1] || inst.out_dims().size() != 1) {
      throw StructuralError("CloneStrategy: Barlie's instrument does not fit");
    }
    for (const auto& br : inst.branches()) {
      if (br.outcome != 0 && br.outcome != 1) {
        throw StructuralError("CloneStrategy: Barlie's outcome must be a bit");
      }
    }
    const Channel& ch = split[u];
    if (ch.in_dim() != inst.out_dims()[0] || ch.out_dims().size() != 2) {
      throw StructuralError("CloneStrategy: split must map Barlie's register to Bob ⊗ Charlie");
    }
    if (d[0] * ch.out_dim() > kMaxStrategyDimension || d[0] * inst.out_dims()[0] > kMaxStrategyDimension) {
      throw StructuralError("CloneStrategy: post-split state exceeds the 4-qubit cap");
    }
    for (int y = 0; y < 2; ++y) {
      if (bob[u][y].dimension() != ch.out_dims()[0] || bob[u][y].outcomes() != 2 ||
          charlie[u][y].dimension() != ch.out_dims()[1] || charlie[u][y].outcomes() != 2) {
        throw StructuralError("CloneStrategy: second-round measurement does not fit");
      }
    }
  }
}

double clone_game_value(const CloneGameSpec& spec, const CloneStrategy& s) {
  spec.validate();
  s.validate();
  const Matrix& rho = s.shared.matrix();
  const Dims& dims = s.shared.dims();

  // Test rounds: Barlie's effective POVM for outcome s is Σ K†K over the
  // branches reporting s.
  double test_win = 0.0;
  for (int u = 0; u < 2; ++u) {
    std::array<Matrix, 2> effect{Matrix::Zero(dims[1], dims[1]), Matrix::Zero(dims[1], dims[1])};
    for (const auto& br : s.barlie[u].branches()) {
      for (const auto& k : br.kraus) effect[br.outcome] += k.adjoint() * k;
    }
    for (int x = 0; x < 2; ++x) {
      for (int a = 0; a < 2; ++a) {
        int out = a ^ (x & u);
        test_win += 0.5 * 0.5 * product_expectation(rho, {&s.alice[x].element(a), &effect[out]});
      }
    }
  }

  // Keep rounds: Barlie's instrument (outcome ignored) then the split. Alice's
  // measurement commutes with both, so it is applied as an expectation.
  Matrix after = apply_kraus(rho, dims, 1, [&] {
    std::vector<Matrix> all;
    for (const auto& br : s.barlie[kKeep].branches()) all.insert(all.end(), br.kraus.begin(), br.kraus.end());
    return all;
  }());
  Dims mid = replace_subsystem(dims, 1, s.barlie[kKeep].out_dims());
  Matrix split = apply_kraus(after, mid, 1, s.split[kKeep].kraus());

  double guess_win = 0.0;
  for (int x = 0; x < 2; ++x) {
    for (int a = 0; a < 2; ++a) {
      guess_win += 0.5 * product_expectation(split, {&s.alice[x].element(a), &s.bob[kKeep][x].element(a),
                                                     &s.charlie[kKeep][x].element(a)});
    }
  }
  const double revealed = (1.0 - spec.alpha) * (1.0 - spec.alpha);
  double value = spec.gamma * test_win + (1.0 - spec.gamma) * ((1.0 - revealed) + revealed * guess_win);
  return std::clamp(value, 0.0, 1.0);
}

WinRecord play_clone_game(const CloneGameSpec& spec, const CloneStrategy& s, Rng& rng) {
  CloneInputs in = sample_clone_inputs(spec, rng);
  WinRecord rec;
  rec.x = in.x;
  rec.u = in.u;
  rec.y = in.y;
  rec.z = in.z;
  Measurement alice = measure(s.shared, s.alice[in.x], 0, rng);
  rec.a = alice.outcome;
  InstrumentSample barlie = sample_instrument(alice.post_state, s.barlie[in.u], 1, rng);
  rec.s = barlie.outcome;
  DensityOp shared = apply_channel(barlie.post_state, s.split[in.u], 1);
  if (in.y != kBlank) {
    Measurement bob = measure(shared, s.bob[in.u][in.y], 1, rng);
    rec.b = bob.outcome;
    shared = bob.post_state;
  }
  if (in.z != kBlank) {
    rec.c = measure(shared, s.charlie[in.u][in.z], 2, rng).outcome;
  }
  return rec;
}

namespace {
std::array<std::array<Povm, 2>, 3> same_povms(const Povm& p) {
  return {{{p, p}, {p, p}, {p, p}}};
}

Channel attach_blank_for_charlie() {
  // |ψ> -> |ψ> ⊗ |0>
  Matrix v = Matrix::Zero(4, 2);
  v(0, 0) = 1.0;
  v(2, 1) = 1.0;
  return Channel({v}, 2, {2, 2});
}
}  // namespace

CloneStrategy chsh_broadcast_strategy() {
  Instrument breidbart({{0,
                         {basis_ket(0, 2).amplitudes() * angle_ket(kPi / 8).amplitudes().adjoint(),
                          basis_ket(1, 2).amplitudes() * angle_ket(kPi / 8 + kPi / 2).amplitudes().adjoint()}}},
                       2, {2});
  Channel copy = measure_and_broadcast(0.0);
  Povm z = computational_basis(2);
  return CloneStrategy{
      bell_phi_plus().density(),
      {ideal_alice_measurement(0), ideal_alice_measurement(1)},
      {Instrument::from_povm(ideal_bob_measurement(0)), Instrument::from_povm(ideal_bob_measurement(1)), breidbart},
      {copy, copy, copy},
      same_povms(z),
      same_povms(z)};
}

CloneStrategy forward_to_bob_strategy() {
  Channel forward = attach_blank_for_charlie();
  Povm zero = constant_povm(2, 0, 2);
  std::array<Povm, 2> bob_bases{ideal_alice_measurement(0), ideal_alice_measurement(1)};
  return CloneStrategy{
      bell_phi_plus().density(),
      {ideal_alice_measurement(0), ideal_alice_measurement(1)},
      {Instrument::from_povm(ideal_bob_measurement(0)), Instrument::from_povm(ideal_bob_measurement(1)),
       Instrument::identity(2, 0)},
      {forward, forward, forward},
      {bob_bases, bob_bases, bob_bases},
      same_povms(zero)};
}

CloneStrategy deterministic_strategy(std::array<int, 2> alice_out, std::array<int, 3> barlie_out, int bob_out,
                                     int charlie_out) {
  Channel copy = measure_and_broadcast(0.0);
  return CloneStrategy{
      tensor(basis_ket(0, 2), basis_ket(0, 2)).density(),
      {constant_povm(2, alice_out[0], 2), constant_povm(2, alice_out[1], 2)},
      {Instrument::identity(2, barlie_out[0]), Instrument::identity(2, barlie_out[1]),
       Instrument::identity(2, barlie_out[2])},
      {copy, copy, copy},
      same_povms(constant_povm(2, bob_out, 2)),
      same_povms(constant_povm(2, charlie_out, 2))};
}

// -- Bound expression ------------------------------------------------------------

namespace {
void check_bound_args(double gamma, double alpha, double c_rig) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ParameterError("gamma must lie in (0, 1)");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ParameterError("alpha must lie in [0, 1]");
  if (!(c_rig > 0.0)) throw ParameterError("c_rig must be positive");
}

double beta_of(double alpha) {
  double at = (1.0 - alpha) * (1.0 - alpha);
  return 1.0 - at + at * kChshQuantumValue;
}
}  // namespace

double clone_value_upper_bound_expr(double gamma, double alpha, double mu, double c_rig) {
  check_bound_args(gamma, alpha, c_rig);
  if (!(mu >= 0.0 && mu <= kChshQuantumValue)) {
    throw ParameterError("mu must lie in [0, omega*]");
  }
  double guess = std::min(1.0, beta_of(alpha) + c_rig * std::pow(mu, 0.25));
  return (1.0 - gamma) * guess + gamma * (kChshQuantumValue - mu);
}

DeltaEstimate derive_delta(double gamma, double alpha, double c_rig) {
  check_bound_args(gamma, alpha, c_rig);
  const double beta = beta_of(alpha);
  const double cap = std::pow((1.0 - beta) / c_rig, 4.0);
  const double stationary = std::pow((1.0 - gamma) * c_rig / (4.0 * gamma), 4.0 / 3.0);
  const double mu = std::min({cap, stationary, kChshQuantumValue});
  DeltaEstimate est{};
  est.argmax_mu = mu;
  est.max_value = clone_value_upper_bound_expr(gamma, alpha, mu, c_rig);
  est.trivial_bound = (1.0 - gamma) + gamma * kChshQuantumValue;
  est.delta = est.trivial_bound - est.max_value;
  return est;
}

}  // namespace divkecm
