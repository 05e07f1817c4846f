#include "divkecm/devices.h"

#include <cmath>

#include "divkecm/games.h"

namespace divkecm {

std::shared_ptr<ReceiverDevice> ReceiverDevice::snapshot() const {
  throw ProtocolError("this receiver device cannot be copied");
}

void check_inputs(const Inputs& in, std::size_t l, int max_symbol) {
  if (in.size() != l) {
    throw StructuralError("device input has length " + std::to_string(in.size()) + ", expected " +
                          std::to_string(l));
  }
  for (int v : in) {
    if (v != kBlank && (v < 0 || v > max_symbol)) {
      throw StructuralError("device input symbol " + std::to_string(v) + " outside the alphabet");
    }
  }
}

namespace {

struct IdealMeasurements {
  std::array<Povm, 2> alice{ideal_alice_measurement(0), ideal_alice_measurement(1)};
  std::array<Povm, 2> bob{ideal_bob_measurement(0), ideal_bob_measurement(1)};
};

const IdealMeasurements& ideal() {
  static const IdealMeasurements m;
  return m;
}

using Pairs = std::vector<DensityOp>;

class HonestClient final : public ClientDevice {
 public:
  explicit HonestClient(std::shared_ptr<Pairs> pairs) : pairs_(std::move(pairs)) {}

  Bits input(const Inputs& x, Rng& rng) override {
    if (used_) throw ProtocolError("client device takes a single input batch");
    check_inputs(x, pairs_->size(), 1);
    used_ = true;
    Bits a(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] == kBlank) throw StructuralError("client input must be a bit");
      Measurement m = measure((*pairs_)[i], ideal().alice[x[i]], 0, rng);
      a[i] = static_cast<std::uint8_t>(m.outcome);
      (*pairs_)[i] = std::move(m.post_state);
    }
    return a;
  }

 private:
  std::shared_ptr<Pairs> pairs_;
  bool used_ = false;
};

class HonestReceiver final : public ReceiverDevice {
 public:
  HonestReceiver(std::shared_ptr<Pairs> pairs, int rounds) : pairs_(std::move(pairs)), rounds_(rounds) {}

  Bits round1(const Inputs& u, Rng& rng) override {
    if (rounds_ != 0) throw ProtocolError("receiver round 1 already played");
    check_inputs(u, pairs_->size(), 3);
    ++rounds_;
    return play(u, rng);
  }

  Bits round2(const Inputs& x_tilde, Rng& rng) override {
    if (rounds_ == 0) throw ProtocolError("receiver round 2 before round 1");
    if (rounds_ >= 2) throw ProtocolError("receiver device takes only two input batches");
    check_inputs(x_tilde, pairs_->size(), 3);
    ++rounds_;
    return play(x_tilde, rng);
  }

  std::shared_ptr<ReceiverDevice> snapshot() const override {
    return std::make_shared<HonestReceiver>(std::make_shared<Pairs>(*pairs_), rounds_);
  }

 private:
  Bits play(const Inputs& in, Rng& rng) {
    Bits out(in.size(), 0);
    for (std::size_t i = 0; i < in.size(); ++i) {
      if (in[i] == kBlank) continue;
      const Povm& povm = in[i] < 2 ? ideal().bob[in[i]] : ideal().alice[in[i] - 2];
      Measurement m = measure((*pairs_)[i], povm, 1, rng);
      out[i] = static_cast<std::uint8_t>(m.outcome);
      (*pairs_)[i] = std::move(m.post_state);
    }
    return out;
  }

  std::shared_ptr<Pairs> pairs_;
  int rounds_;
};

}  // namespace

DevicePair make_honest_devices(int l, double q) {
  if (l <= 0) throw ParameterError("make_honest_devices: l must be positive");
  auto pairs = std::make_shared<Pairs>(static_cast<std::size_t>(l), werner(q));
  return {std::make_unique<HonestClient>(pairs), std::make_shared<HonestReceiver>(pairs, 0)};
}

// -- Leakage ---------------------------------------------------------------------

LeakageBudget::LeakageBudget(int max_bits) : max_bits_(max_bits) {
  if (max_bits < 0) throw ParameterError("leakage budget must be non-negative");
}

LeakageBudget LeakageBudget::from_rate(double nu, int l) {
  if (!(nu >= 0.0)) throw ParameterError("leakage rate must be non-negative");
  return LeakageBudget(static_cast<int>(std::floor(nu * l + 1e-9)));
}

void LeakageBudget::declare_schedule(int slots) {
  if (slots < 0) throw ParameterError("negative leakage schedule");
  if (slots > max_bits_) {
    throw ProtocolError("leakage schedule of " + std::to_string(slots) + " bits exceeds the budget of " +
                        std::to_string(max_bits_));
  }
  scheduled_ = slots;
}

void LeakageBudget::leak(LeakDirection direction, int bit) {
  if (!open_) throw ProtocolError("leakage before the devices received their inputs");
  if (bit != 0 && bit != 1) throw StructuralError("leaked value must be a bit");
  if (used_bits() >= max_bits_) throw ProtocolError("leakage budget exhausted");
  if (used_bits() >= scheduled_) throw ProtocolError("leak outside the declared schedule");
  log_.push_back({direction, bit});
}

int LeakageBudget::read(LeakDirection direction, int slot) const {
  int seen = 0;
  for (const auto& e : log_) {
    if (e.direction != direction) continue;
    if (seen++ == slot) return e.bit;
  }
  return 0;
}

}  // namespace divkecm
