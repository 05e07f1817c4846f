#ifndef DIVKECM_VKECM_H
#define DIVKECM_VKECM_H

// The DI-VKECM protocol: parameters, Enc, KeyRel, Dec and the closed-form
// security bound report.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "divkecm/devices.h"
#include "divkecm/ecc.h"
#include "divkecm/games.h"

namespace divkecm {

enum class Variant { kString, kIp2, kIp3 };

std::string to_string(Variant v);
/// "string", "ip2" or "ip3"; throws ParameterError otherwise.
Variant parse_variant(const std::string& name);

enum class Mode { kStrict, kDemo };

std::string to_string(Mode m);
Mode parse_mode(const std::string& name);

/// δ and κ have no value in the underlying analysis (existence only); the
/// defaults here are modelling choices.
struct ProtocolParams {
  int lambda = 512;  // also the number of device instances l
  double gamma = 0.2;
  double alpha = 0.3;
  double q = 0.0;
  double xi = 2.0;
  double delta = 0.03;
  double kappa = 1.0;
  double nu = 0.0;
  Variant variant = Variant::kString;
  std::uint64_t ec_seed = 1;
  int t_max = 4;

  int l() const { return lambda; }
  /// 2 for the string and ip2 variants, 3 for ip3.
  int modulus() const;
  /// λ symbols for the string variant, a single symbol otherwise.
  int message_length() const;
};

/// Every violated constraint, in a fixed order. Empty means valid.
std::vector<std::string> validate_params(const ProtocolParams& p, Mode mode);

/// Symbols mod `ProtocolParams::modulus()`.
using Message = std::vector<int>;

Message random_message(const ProtocolParams& p, Rng& rng);

enum class Flag { kAccept, kReject };

struct PrivateKey {
  Bits x;
  Inputs u;  // 0, 1 or kKeep
  Bits a;
  Message r;
};

struct DecryptionKey {
  Message d;
  Bits syndrome;
  Inputs x_tilde;     // 2, 3 or kBlank
  std::vector<int> r_hat;  // inner-product variants only
};

struct Ciphertext {
  std::shared_ptr<ReceiverDevice> device;
  Inputs u;  // announced to the receiver during Enc
  Message c;
};

/// Classical messages exchanged during Enc, plus the client's test verdict.
struct Transcript {
  Inputs u;
  Bits s;
  int failures = 0;
  int threshold = 0;
  Flag flag = Flag::kReject;
};

/// Output of the device rounds of Enc (everything before the pad is drawn).
struct EncDevicePhase {
  Bits x;
  Inputs u;
  Bits a;
  std::shared_ptr<ReceiverDevice> receiver;
  Transcript transcript;
};

struct EncResult {
  Flag flag;
  PrivateKey key;
  Ciphertext ciphertext;
  Transcript transcript;
};

struct DecOutcome {
  Message message;
  Bits s_tilde;  // receiver's zeroed raw string
  Bits guess;    // reconstructed Ã (equals s_tilde when decoding failed)
  bool decoded = false;
};

/// floor((γ(1−ω*) + δ/2) l).
int accept_threshold(const ProtocolParams& p);

/// One protocol instance with a fixed parity-check code.
class Protocol {
 public:
  /// Throws ParameterError listing all violations for `mode`.
  explicit Protocol(ProtocolParams params, Mode mode = Mode::kDemo);

  const ProtocolParams& params() const { return params_; }
  const LinearCode& code() const { return code_; }

  EncDevicePhase run_devices(ClientDevice& client, std::shared_ptr<ReceiverDevice> receiver, Rng& rng) const;
  /// Draws the pad R and, on reject, the dummy ciphertext M'.
  EncResult finalize(EncDevicePhase phase, const Message& m, Rng& rng) const;
  /// Same with the pad and dummy supplied by the caller.
  EncResult finalize(EncDevicePhase phase, const Message& m, const Message& pad, const Message& dummy) const;
  EncResult enc(const Message& m, DevicePair& devices, Rng& rng) const;

  DecryptionKey key_rel(const PrivateKey& key, Rng& rng) const;

  /// Runs the second device round on `device` with the key's x̃.
  DecOutcome dec_detailed(const Inputs& u, const Message& c, const DecryptionKey& key, ReceiverDevice& device,
                          Rng& rng) const;
  Message dec(const Ciphertext& ct, const DecryptionKey& key, Rng& rng) const;

  /// Ã, the raw key restricted to kept, revealed positions.
  static Bits masked_raw_key(const Bits& a, const Inputs& u, const Inputs& x_tilde);
  static Bits decode_support(const Inputs& u, const Inputs& x_tilde);

 private:
  void check_message(const Message& m) const;

  ProtocolParams params_;
  LinearCode code_;
};

// -- Bounds ----------------------------------------------------------------------

struct BoundsReport {
  double kdaa;                 // κδ³α⁴
  double ec_term;              // 2ξ(1−γ)(1−α)h2(q)
  double t_over_lambda;        // 1 − κδ³α⁴ + 2ξ(1−γ)(1−α)h2(q) + ν
  double t;                    // t(λ)
  double leak_threshold;       // κδ³α⁴ − 2ξ(1−γ)(1−α)h2(q)
  bool nontrivial;             // ν below the threshold, i.e. t(λ) < λ
  double zero_unclone_rhs;     // κδ³α⁴ − 2(1−γ)(1−α)h2(q)
  bool zero_unclone;           // 3ν below it
  double log2_game_bound;      // −κδ³α⁴ l + 2 ℓ_syn
  int syndrome_bits;
  std::vector<std::string> strict_violations;
};

BoundsReport uncloneability_bounds(const ProtocolParams& p);

// -- Canonical serialization -----------------------------------------------------

/// Bit strings become "0101...", U uses 'k' for keep, x̃ uses '_' for ⊥, F_p
/// vectors are digit strings. Field order is fixed.
nlohmann::ordered_json to_json(const PrivateKey& k);
nlohmann::ordered_json to_json(const DecryptionKey& k);
nlohmann::ordered_json to_json(const Transcript& t);
PrivateKey private_key_from_json(const nlohmann::ordered_json& j);
DecryptionKey decryption_key_from_json(const nlohmann::ordered_json& j);
Transcript transcript_from_json(const nlohmann::ordered_json& j);

}  // namespace divkecm

#endif  // DIVKECM_VKECM_H
