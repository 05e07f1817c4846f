#ifndef DIVKECM_GAMES_H
#define DIVKECM_GAMES_H

// CHSH, the single-qubit monogamy game, and the two-round cloning games
// CLONE_gamma / CLONE_{gamma,alpha}: specifications, strategies and exact
// evaluation.

#include <array>
#include <vector>

#include "divkecm/qcore.h"
#include "divkecm/rng.h"

namespace divkecm {

/// Optimal quantum CHSH winning probability (1 + 1/sqrt 2) / 2.
inline constexpr double kChshQuantumValue = 0.85355339059327376220;
inline constexpr double kChshClassicalValue = 0.75;

/// Barlie's third first-round input.
inline constexpr int kKeep = 2;
/// The anchored (withheld) second-round input.
inline constexpr int kBlank = -1;

// -- CHSH --------------------------------------------------------------------

/// Ideal CHSH measurement of Alice for input x: x=0 measures {|0>,|1>},
/// x=1 measures {|π/4>,|−π/4>}.
Povm ideal_alice_measurement(int x);
/// Ideal CHSH measurement of Bob: y=0 {|π/8>,|−3π/8>}, y=1 {|−π/8>,|3π/8>}
/// (outcome 0 listed first).
Povm ideal_bob_measurement(int y);

struct ChshStrategy {
  DensityOp shared_state;  // dims {dA, dB}
  std::array<Povm, 2> alice;
  std::array<Povm, 2> bob;
};

/// Ideal measurements on werner(q); q = 0 is the optimal strategy.
ChshStrategy ideal_chsh_strategy(double q = 0.0);

/// Exact winning probability, Σ_{x,y} ¼ Σ_{a⊕b=xy} tr[(A_{a|x}⊗B_{b|y}) ρ].
double chsh_value(const ChshStrategy& strategy);

struct ClassicalChshResult {
  double value;
  int maximizers;  // number of (Alice, Bob) deterministic function pairs attaining it
};

/// Brute force over all 4 × 4 deterministic response functions per player
/// (each player maps an input bit to an output bit). With `constant_only`,
/// only the two constant functions are considered for each player.
ClassicalChshResult classical_chsh_value(bool constant_only = false);

// -- Monogamy game ---------------------------------------------------------------

/// E_{a,x} tr[(Π^B_{a|x} ⊗ Π^C_{a|x}) Λ(|a^x><a^x|)] for a splitting channel
/// Λ from a qubit to B⊗C and per-basis guessing measurements.
double monogamy_value(const Channel& split, const std::array<Povm, 2>& bob, const std::array<Povm, 2>& charlie);

/// Measure in the basis {|θ>, |θ+π/2>} and copy the classical outcome to
/// both parties: Kraus |kk><θ_k|.
Channel measure_and_broadcast(double theta);

/// Breidbart (π/8) measurement, outcome broadcast, both report it. Attains
/// the optimum (1 + 1/sqrt 2)/2.
double monogamy_broadcast_value();

// -- Two-round cloning game ----------------------------------------------------

struct CloneGameSpec {
  double gamma;  // probability of a CHSH test round
  double alpha;  // anchoring probability; 0 reproduces CLONE_gamma

  void validate() const;
};

struct CloneInputs {
  int x;
  int u;  // 0, 1 or kKeep
  int y;  // 0, 1 or kBlank
  int z;
};

/// Probability of an input tuple under the game distribution.
double clone_input_weight(const CloneGameSpec& spec, const CloneInputs& in);
CloneInputs sample_clone_inputs(const CloneGameSpec& spec, Rng& rng);

struct WinRecord {
  int x = 0, u = 0, y = 0, z = 0;
  int a = 0, s = 0, b = 0, c = 0;
};

/// Overall win condition V1·V2. Throws StructuralError on symbols outside
/// the game alphabet.
bool clone_win_predicate(const WinRecord& rec);

/// A complete two-round strategy.
///
/// The shared state lives on Alice ⊗ Barlie. Barlie's first-round action for
/// each u is an instrument whose outcome is s (the honest keep branch is the
/// identity reporting s = 0); `split[u]` then maps Barlie's register to
/// Bob ⊗ Charlie. Second-round measurements are indexed by Barlie's input u
/// and the party's own input; a blank input is answered with 0 without
/// measuring.
struct CloneStrategy {
  DensityOp shared;
  std::array<Povm, 2> alice;
  std::array<Instrument, 3> barlie;
  std::array<Channel, 3> split;
  std::array<std::array<Povm, 2>, 3> bob;
  std::array<std::array<Povm, 2>, 3> charlie;

  /// Shape checks plus the dimension cap (no stage above 16 = 4 qubits).
  void validate() const;
};

inline constexpr int kMaxStrategyDimension = 16;

/// Exact winning probability for CLONE_{gamma,alpha}.
double clone_game_value(const CloneGameSpec& spec, const CloneStrategy& strategy);

/// One Monte Carlo play; the record carries every input and output.
WinRecord play_clone_game(const CloneGameSpec& spec, const CloneStrategy& strategy, Rng& rng);

/// Ideal CHSH first round; in the keep branch Barlie measures in the
/// Breidbart basis and broadcasts the outcome, which Bob and Charlie report.
CloneStrategy chsh_broadcast_strategy();

/// Keep branch forwards the qubit to Bob (who measures in basis y) while
/// Charlie always answers 0.
CloneStrategy forward_to_bob_strategy();

/// Fully classical strategy on a trivial shared state: a = alice_out[x],
/// s = barlie_out[u], b = bob_out, c = charlie_out.
CloneStrategy deterministic_strategy(std::array<int, 2> alice_out, std::array<int, 3> barlie_out, int bob_out,
                                     int charlie_out);

// -- Bound expression ------------------------------------------------------------

/// (1−γ)·min{1, β + c_rig·μ^{1/4}} + γ(ω* − μ), β = 1 − α̃ + α̃ ω*, α̃ = (1−α)².
/// `c_rig` stands in for the unquantified rigidity constant.
double clone_value_upper_bound_expr(double gamma, double alpha, double mu, double c_rig);

struct DeltaEstimate {
  double delta;          // trivial_bound − max_value
  double argmax_mu;
  double max_value;
  double trivial_bound;  // (1−γ) + γ ω*
};

/// Maximizes the bound expression over μ ∈ [0, ω*] in closed form: the
/// expression is concave below the cap μ₁ = ((1−β)/c)^4 and decreasing above
/// it, so the maximum sits at min(μ₁, μ_c, ω*) with μ_c the stationary point.
DeltaEstimate derive_delta(double gamma, double alpha, double c_rig);

}  // namespace divkecm

#endif  // DIVKECM_GAMES_H
