#ifndef DIVKECM_ATTACKS_H
#define DIVKECM_ATTACKS_H

// Security experiments (distinguishing, cloning, cloning-distinguishing)
// against the protocol, with a catalog of concrete adversaries.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "divkecm/vkecm.h"

namespace divkecm {

enum class Party { kBob, kCharlie };

/// Thrown when a party program reaches for the other party's key.
class CapabilityViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// What one of Bob or Charlie sees in the second phase. The key ring holds
/// both decryption keys sealed; only `own_key` opens, and asking for the other
/// party's key raises CapabilityViolation (the harness aborts the trial).
class PartyView {
 public:
  PartyView(Party self, const Protocol& protocol, const Inputs& u, const Message& c, const DecryptionKey& bob_key,
            const DecryptionKey& charlie_key, LeakageBudget& leakage);

  Party self() const { return self_; }
  const Protocol& protocol() const { return protocol_; }
  const Inputs& u() const { return u_; }
  const Message& c() const { return c_; }
  const DecryptionKey& own_key() const;
  const DecryptionKey& key_of(Party whose) const;
  LeakageBudget& leakage() const { return leakage_; }

 private:
  Party self_;
  const Protocol& protocol_;
  const Inputs& u_;
  const Message& c_;
  const DecryptionKey& bob_key_;
  const DecryptionKey& charlie_key_;
  LeakageBudget& leakage_;
};

struct PartyGuess {
  Message message;
  /// Raw per-instance guesses of A on revealed positions, if the party has them.
  std::optional<Bits> raw;
};

/// Program run by Bob or Charlie after the split.
class PartyProgram {
 public:
  virtual ~PartyProgram() = default;
  virtual PartyGuess guess(const PartyView& view, Rng& rng) = 0;
};

struct SplitResult {
  std::unique_ptr<PartyProgram> bob;
  std::unique_ptr<PartyProgram> charlie;
};

/// One trial's worth of adversary. Created fresh per trial by a factory.
class CloningAdversary {
 public:
  virtual ~CloningAdversary() = default;
  /// Devices handed to the client and receiver.
  virtual DevicePair make_devices(const Protocol& protocol, Rng& rng);
  /// Classical bits the adversary will leak; declared before the run.
  virtual int leak_bits() const { return 0; }
  /// Splits the receiver's ciphertext (device plus classical part) into
  /// Bob's and Charlie's programs.
  virtual SplitResult split(const Protocol& protocol, const Ciphertext& ct, Rng& rng) = 0;
};

using AdversaryFactory = std::function<std::unique_ptr<CloningAdversary>()>;

/// Device pair of a fully classical adversary: each instance has a hidden
/// record (a0, a1). The client outputs a_{x}; the receiver answers 0/1 inputs
/// with a0 and inputs 2/3 with a_{y−2}. These devices may be copied.
DevicePair make_classical_record_devices(int l, Rng& rng);

/// Honest devices except that the receiver measures kept instances in the
/// Breidbart basis during round 1 and later reports that outcome. Copyable.
DevicePair make_broadcast_devices(int l, double q);

/// Program that decrypts honestly with its own key on `device`.
std::unique_ptr<PartyProgram> decrypting_program(std::shared_ptr<ReceiverDevice> device, int leak_prefix = 0);
/// Program that guesses a uniform message.
std::unique_ptr<PartyProgram> uniform_program();

/// Catalog: classical_record, forward_to_bob, broadcast_measure, leaky(k).
std::map<std::string, AdversaryFactory> builtin_adversaries();
AdversaryFactory classical_record_adversary();
AdversaryFactory forward_to_bob_adversary();
AdversaryFactory broadcast_measure_adversary();
/// forward_to_bob plus k scheduled leak bits: Bob sends the first k symbols
/// of his decrypted message (bits for p = 2), Charlie copies what arrives.
AdversaryFactory leaky_adversary(int k);

/// Looks up a catalog name, including "leaky:K".
AdversaryFactory find_adversary(const std::string& name);

// -- Statistics ------------------------------------------------------------------

/// Half-width of the 95% Wald interval for `count` successes in `trials`.
double wald_radius(long count, long trials);

struct AttackStats {
  long trials = 0;
  long accepted = 0;
  long joint_success = 0;  // the experiment's success event
  long bob_success = 0;
  long charlie_success = 0;
  long both_right_or_wrong = 0;
  long aborted = 0;
  long capability_violations = 0;
  long instance_both_right = 0;  // per-instance raw guesses, kept and revealed to both
  long instance_total = 0;

  double rate(long count) const { return trials ? static_cast<double>(count) / trials : 0.0; }
  double ci95(long count) const { return wald_radius(count, trials); }
  double instance_rate() const {
    return instance_total ? static_cast<double>(instance_both_right) / instance_total : 0.0;
  }

  void merge(const AttackStats& other);
};

struct RunOptions {
  long trials = 1000;
  std::uint64_t seed = 1;
  int threads = 0;  // 0 = hardware concurrency
};

/// Runs `trials` cloning experiments. Every trial draws from its own
/// substream of `seed`, so results do not depend on the thread count. Throws
/// ProtocolError before any trial when the leak schedule exceeds floor(ν l).
AttackStats run_cloning_attack(const Protocol& protocol, const AdversaryFactory& adversary, const RunOptions& opt);

/// Honest runs of Enc, KeyRel and Dec on noisy honest devices.
struct PipelineStats {
  long trials = 0;
  long accepted = 0;
  long correct = 0;        // accepted and decrypted to m
  long decoded = 0;        // syndrome decoding succeeded
  long decoded_exact = 0;  // ... and reproduced Ã
  long failures = 0;       // summed test failures
  long support = 0;        // summed decode support size

  double rate(long count) const { return trials ? static_cast<double>(count) / trials : 0.0; }
  double ci95(long count) const { return wald_radius(count, trials); }
  void merge(const PipelineStats& other);
};

PipelineStats run_pipeline(const Protocol& protocol, const RunOptions& opt);

// -- Distinguishing --------------------------------------------------------------

/// Single-party distinguisher: sees the ciphertext and outputs a bit.
class Distinguisher {
 public:
  virtual ~Distinguisher() = default;
  virtual Message target(const Protocol& protocol) const;  // m*, all ones by default
  virtual DevicePair make_devices(const Protocol& protocol, Rng& rng);
  /// Test-only backdoor: the harness passes R when this returns true.
  virtual bool wants_pad() const { return false; }
  virtual int guess(const Protocol& protocol, const Ciphertext& ct, const Message* pad, Rng& rng) = 0;
};

using DistinguisherFactory = std::function<std::unique_ptr<Distinguisher>()>;

/// B̂ = [C == m*].
DistinguisherFactory c_test_distinguisher();
DistinguisherFactory constant_distinguisher(int bit);
DistinguisherFactory pad_oracle_distinguisher();

/// success = F ∧ (B == B̂); bob_success counts B == B̂ regardless of F.
AttackStats run_distinguishing_attack(const Protocol& protocol, const DistinguisherFactory& adversary,
                                      const RunOptions& opt);

/// Two-party distinguisher: after the split each party outputs a bit.
class CloningDistinguisher {
 public:
  virtual ~CloningDistinguisher() = default;
  virtual Message target(const Protocol& protocol) const;
  virtual DevicePair make_devices(const Protocol& protocol, Rng& rng);
  virtual bool wants_pad() const { return false; }
  struct Bits2 {
    int bob;
    int charlie;
  };
  /// `rng` is the same stream a lifted single-party distinguisher would see;
  /// the two views come from independent key releases.
  virtual Bits2 guess(const Protocol& protocol, const Ciphertext& ct, const Message* pad, const PartyView& bob,
                      const PartyView& charlie, Rng& rng) = 0;
};

using CloningDistinguisherFactory = std::function<std::unique_ptr<CloningDistinguisher>()>;

/// Runs the distinguisher once and gives both parties its answer.
CloningDistinguisherFactory lift_distinguisher(DistinguisherFactory inner);
/// Bob decrypts and outputs [m̃ == m*]; Charlie outputs a uniform bit.
CloningDistinguisherFactory forward_to_bob_distinguisher();

/// "c_test", "pad_oracle", "constant:0", "constant:1".
DistinguisherFactory find_distinguisher(const std::string& name);
/// "lifted:<distinguisher>" or "forward_to_bob_distinguisher".
CloningDistinguisherFactory find_cloning_distinguisher(const std::string& name);

/// success = F ∧ (B == B' == B''); both_right_or_wrong counts B' == B''.
AttackStats run_cloning_distinguishing_attack(const Protocol& protocol, const CloningDistinguisherFactory& adversary,
                                              const RunOptions& opt);

}  // namespace divkecm

#endif  // DIVKECM_ATTACKS_H
