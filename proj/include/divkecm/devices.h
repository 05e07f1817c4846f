#ifndef DIVKECM_DEVICES_H
#define DIVKECM_DEVICES_H

// Black-box devices for the client and receiver, the honest i.i.d. Werner
// implementation, and the bounded classical leakage channel.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "divkecm/qcore.h"
#include "divkecm/rng.h"

namespace divkecm {

using Bits = std::vector<std::uint8_t>;
/// Device input string. Entries are 0..3 or kBlank.
using Inputs = std::vector<int>;

/// Client side: one batch of l input bits, one batch of l output bits.
class ClientDevice {
 public:
  virtual ~ClientDevice() = default;
  virtual Bits input(const Inputs& x, Rng& rng) = 0;
};

/// Receiver side: exactly two input batches over {0,1,2,3,⊥}^l.
class ReceiverDevice {
 public:
  virtual ~ReceiverDevice() = default;

  /// First round (encryption). The caller maps keep to ⊥.
  virtual Bits round1(const Inputs& u, Rng& rng) = 0;
  /// Second round (decryption).
  virtual Bits round2(const Inputs& x_tilde, Rng& rng) = 0;

  /// Copy of the current device, if the simulator is allowed to make one.
  /// Only honest devices support this; it exists so one honest ciphertext can
  /// be decrypted under several keys in tests.
  virtual std::shared_ptr<ReceiverDevice> snapshot() const;
};

struct DevicePair {
  std::unique_ptr<ClientDevice> client;
  std::shared_ptr<ReceiverDevice> receiver;
};

/// l independent werner(q) pairs. The client applies Alice's ideal CHSH
/// measurement; the receiver applies Bob's for inputs 0/1 and Alice's (basis
/// y − 2) for inputs 2/3, and answers ⊥ with 0 without touching the state.
DevicePair make_honest_devices(int l, double q);

/// Checks length and alphabet of a device input; throws StructuralError.
void check_inputs(const Inputs& in, std::size_t l, int max_symbol);

// -- Leakage -------------------------------------------------------------------

enum class LeakDirection { kBobToCharlie, kCharlieToBob };

struct LeakEvent {
  LeakDirection direction;
  int bit;
};

/// Classical side channel between Bob's and Charlie's devices, capped at
/// floor(ν l) bits.
///
/// An attack declares up front how many slots it will use; undeclared or
/// unused slots read as 0, so the timing of a leak carries no information.
/// Nothing can be sent until the devices have their inputs (`open`).
class LeakageBudget {
 public:
  explicit LeakageBudget(int max_bits);
  static LeakageBudget from_rate(double nu, int l);

  /// Reserve `slots` bits. Throws ProtocolError beyond the cap.
  void declare_schedule(int slots);
  /// Marks that the current phase's inputs are delivered.
  void open() { open_ = true; }
  void leak(LeakDirection direction, int bit);
  /// Bit in slot `slot` sent in `direction`, 0 if nothing was sent there.
  int read(LeakDirection direction, int slot) const;

  int max_bits() const { return max_bits_; }
  int scheduled() const { return scheduled_; }
  int used_bits() const { return static_cast<int>(log_.size()); }
  const std::vector<LeakEvent>& log() const { return log_; }

 private:
  int max_bits_;
  int scheduled_ = 0;
  bool open_ = false;
  std::vector<LeakEvent> log_;
};

}  // namespace divkecm

#endif  // DIVKECM_DEVICES_H
