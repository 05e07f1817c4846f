#include "divkecm/attacks.h"

#include <cmath>
#include <exception>
#include <numbers>
#include <thread>

namespace divkecm {

// -- Party views -----------------------------------------------------------------

PartyView::PartyView(Party self, const Protocol& protocol, const Inputs& u, const Message& c,
                     const DecryptionKey& bob_key, const DecryptionKey& charlie_key, LeakageBudget& leakage)
    : self_(self),
      protocol_(protocol),
      u_(u),
      c_(c),
      bob_key_(bob_key),
      charlie_key_(charlie_key),
      leakage_(leakage) {}

const DecryptionKey& PartyView::own_key() const { return key_of(self_); }

const DecryptionKey& PartyView::key_of(Party whose) const {
  if (whose != self_) throw CapabilityViolation("party program opened the other party's decryption key");
  return whose == Party::kBob ? bob_key_ : charlie_key_;
}

// -- Devices used by adversaries ---------------------------------------------------

namespace {

using Record = std::vector<std::array<std::uint8_t, 2>>;

class RecordClient final : public ClientDevice {
 public:
  explicit RecordClient(std::shared_ptr<const Record> rec) : rec_(std::move(rec)) {}
  Bits input(const Inputs& x, Rng&) override {
    if (used_) throw ProtocolError("client device takes a single input batch");
    check_inputs(x, rec_->size(), 1);
    used_ = true;
    Bits a(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] == kBlank) throw StructuralError("client input must be a bit");
      a[i] = (*rec_)[i][x[i]];
    }
    return a;
  }

 private:
  std::shared_ptr<const Record> rec_;
  bool used_ = false;
};

class RecordReceiver final : public ReceiverDevice {
 public:
  RecordReceiver(std::shared_ptr<const Record> rec, int rounds) : rec_(std::move(rec)), rounds_(rounds) {}

  Bits round1(const Inputs& u, Rng&) override {
    if (rounds_ != 0) throw ProtocolError("receiver round 1 already played");
    ++rounds_;
    return answer(u);
  }
  Bits round2(const Inputs& x_tilde, Rng&) override {
    if (rounds_ != 1) throw ProtocolError(rounds_ == 0 ? "receiver round 2 before round 1"
                                                       : "receiver device takes only two input batches");
    ++rounds_;
    return answer(x_tilde);
  }
  std::shared_ptr<ReceiverDevice> snapshot() const override {
    return std::make_shared<RecordReceiver>(rec_, rounds_);
  }

 private:
  Bits answer(const Inputs& in) const {
    check_inputs(in, rec_->size(), 3);
    Bits out(in.size(), 0);
    for (std::size_t i = 0; i < in.size(); ++i) {
      if (in[i] == kBlank) continue;
      out[i] = in[i] < 2 ? (*rec_)[i][0] : (*rec_)[i][in[i] - 2];
    }
    return out;
  }

  std::shared_ptr<const Record> rec_;
  int rounds_;
};

// Honest pairs, but kept instances are measured in the Breidbart basis in
// round 1 and the outcome is replayed in round 2.
class BroadcastReceiver final : public ReceiverDevice {
 public:
  BroadcastReceiver(std::shared_ptr<std::vector<DensityOp>> pairs, Bits record, int rounds)
      : pairs_(std::move(pairs)), record_(std::move(record)), rounds_(rounds) {}

  Bits round1(const Inputs& u, Rng& rng) override {
    if (rounds_ != 0) throw ProtocolError("receiver round 1 already played");
    check_inputs(u, pairs_->size(), 3);
    ++rounds_;
    static const Povm breidbart = angle_basis(std::numbers::pi / 8, std::numbers::pi / 8 + std::numbers::pi / 2);
    static const std::array<Povm, 2> bob{ideal_bob_measurement(0), ideal_bob_measurement(1)};
    static const std::array<Povm, 2> alice{ideal_alice_measurement(0), ideal_alice_measurement(1)};
    Bits out(u.size(), 0);
    record_.assign(u.size(), 0);
    for (std::size_t i = 0; i < u.size(); ++i) {
      const Povm& m = u[i] == kBlank ? breidbart : u[i] < 2 ? bob[u[i]] : alice[u[i] - 2];
      Measurement r = measure((*pairs_)[i], m, 1, rng);
      (*pairs_)[i] = std::move(r.post_state);
      if (u[i] == kBlank) {
        record_[i] = static_cast<std::uint8_t>(r.outcome);
      } else {
        out[i] = static_cast<std::uint8_t>(r.outcome);
      }
    }
    pairs_.reset();  // everything needed later is classical now
    return out;
  }
  Bits round2(const Inputs& x_tilde, Rng&) override {
    if (rounds_ != 1) throw ProtocolError(rounds_ == 0 ? "receiver round 2 before round 1"
                                                       : "receiver device takes only two input batches");
    check_inputs(x_tilde, record_.size(), 3);
    ++rounds_;
    Bits out(x_tilde.size(), 0);
    for (std::size_t i = 0; i < x_tilde.size(); ++i) {
      if (x_tilde[i] == 2 || x_tilde[i] == 3) out[i] = record_[i];
    }
    return out;
  }
  std::shared_ptr<ReceiverDevice> snapshot() const override {
    if (rounds_ == 0) throw ProtocolError("broadcast device can only be copied after round 1");
    return std::make_shared<BroadcastReceiver>(nullptr, record_, rounds_);
  }

 private:
  std::shared_ptr<std::vector<DensityOp>> pairs_;
  Bits record_;
  int rounds_;
};

class HonestClientOnPairs final : public ClientDevice {
 public:
  explicit HonestClientOnPairs(std::shared_ptr<std::vector<DensityOp>> pairs) : pairs_(std::move(pairs)) {}
  Bits input(const Inputs& x, Rng& rng) override {
    if (used_) throw ProtocolError("client device takes a single input batch");
    check_inputs(x, pairs_->size(), 1);
    used_ = true;
    static const std::array<Povm, 2> alice{ideal_alice_measurement(0), ideal_alice_measurement(1)};
    Bits a(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] == kBlank) throw StructuralError("client input must be a bit");
      Measurement r = measure((*pairs_)[i], alice[x[i]], 0, rng);
      a[i] = static_cast<std::uint8_t>(r.outcome);
      (*pairs_)[i] = std::move(r.post_state);
    }
    return a;
  }

 private:
  std::shared_ptr<std::vector<DensityOp>> pairs_;
  bool used_ = false;
};

int bits_per_symbol(int p) { return p == 2 ? 1 : 2; }

class DecryptingProgram final : public PartyProgram {
 public:
  DecryptingProgram(std::shared_ptr<ReceiverDevice> device, int leak_prefix)
      : device_(std::move(device)), leak_prefix_(leak_prefix) {}

  PartyGuess guess(const PartyView& view, Rng& rng) override {
    const Protocol& prot = view.protocol();
    DecOutcome out = prot.dec_detailed(view.u(), view.c(), view.own_key(), *device_, rng);
    const int bps = bits_per_symbol(prot.params().modulus());
    const LeakDirection dir =
        view.self() == Party::kBob ? LeakDirection::kBobToCharlie : LeakDirection::kCharlieToBob;
    int sent = 0;
    for (std::size_t i = 0; i < out.message.size() && sent < leak_prefix_; ++i) {
      for (int b = 0; b < bps && sent < leak_prefix_; ++b, ++sent) view.leakage().leak(dir, (out.message[i] >> b) & 1);
    }
    return {std::move(out.message), std::move(out.s_tilde)};
  }

 private:
  std::shared_ptr<ReceiverDevice> device_;
  int leak_prefix_;
};

// Uniform guess, except for symbols fully covered by the first `listen` slots
// of leakage from the other party.
class ListeningProgram final : public PartyProgram {
 public:
  explicit ListeningProgram(int listen) : listen_(listen) {}

  PartyGuess guess(const PartyView& view, Rng& rng) override {
    const ProtocolParams& p = view.protocol().params();
    const int bps = bits_per_symbol(p.modulus());
    const LeakDirection dir =
        view.self() == Party::kBob ? LeakDirection::kCharlieToBob : LeakDirection::kBobToCharlie;
    Message m = random_message(p, rng);
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (static_cast<int>((i + 1) * bps) > listen_) break;
      int v = 0;
      for (int b = 0; b < bps; ++b) v |= view.leakage().read(dir, static_cast<int>(i) * bps + b) << b;
      if (v < p.modulus()) m[i] = v;
    }
    return {std::move(m), std::nullopt};
  }

 private:
  int listen_;
};

class ClassicalRecordAdversary final : public CloningAdversary {
 public:
  DevicePair make_devices(const Protocol& protocol, Rng& rng) override {
    return make_classical_record_devices(protocol.params().l(), rng);
  }
  SplitResult split(const Protocol&, const Ciphertext& ct, Rng&) override {
    return {decrypting_program(ct.device->snapshot()), decrypting_program(ct.device->snapshot())};
  }
};

class ForwardAdversary final : public CloningAdversary {
 public:
  explicit ForwardAdversary(int leak) : leak_(leak) {}
  int leak_bits() const override { return leak_; }
  SplitResult split(const Protocol&, const Ciphertext& ct, Rng&) override {
    return {decrypting_program(ct.device, leak_), std::make_unique<ListeningProgram>(leak_)};
  }

 private:
  int leak_;
};

class BroadcastAdversary final : public CloningAdversary {
 public:
  DevicePair make_devices(const Protocol& protocol, Rng&) override {
    return make_broadcast_devices(protocol.params().l(), protocol.params().q);
  }
  SplitResult split(const Protocol&, const Ciphertext& ct, Rng&) override {
    return {decrypting_program(ct.device->snapshot()), decrypting_program(ct.device->snapshot())};
  }
};

}  // namespace

DevicePair CloningAdversary::make_devices(const Protocol& protocol, Rng&) {
  return make_honest_devices(protocol.params().l(), protocol.params().q);
}

DevicePair make_classical_record_devices(int l, Rng& rng) {
  if (l <= 0) throw ParameterError("make_classical_record_devices: l must be positive");
  auto rec = std::make_shared<Record>(l);
  for (auto& r : *rec) {
    r[0] = static_cast<std::uint8_t>(rng.bit());
    r[1] = static_cast<std::uint8_t>(rng.bit());
  }
  return {std::make_unique<RecordClient>(rec), std::make_shared<RecordReceiver>(rec, 0)};
}

DevicePair make_broadcast_devices(int l, double q) {
  if (l <= 0) throw ParameterError("make_broadcast_devices: l must be positive");
  auto pairs = std::make_shared<std::vector<DensityOp>>(static_cast<std::size_t>(l), werner(q));
  return {std::make_unique<HonestClientOnPairs>(pairs), std::make_shared<BroadcastReceiver>(pairs, Bits{}, 0)};
}

std::unique_ptr<PartyProgram> decrypting_program(std::shared_ptr<ReceiverDevice> device, int leak_prefix) {
  if (!device) throw StructuralError("decrypting_program: no device");
  return std::make_unique<DecryptingProgram>(std::move(device), leak_prefix);
}

std::unique_ptr<PartyProgram> uniform_program() { return std::make_unique<ListeningProgram>(0); }

AdversaryFactory classical_record_adversary() {
  return [] { return std::make_unique<ClassicalRecordAdversary>(); };
}
AdversaryFactory forward_to_bob_adversary() {
  return [] { return std::make_unique<ForwardAdversary>(0); };
}
AdversaryFactory broadcast_measure_adversary() {
  return [] { return std::make_unique<BroadcastAdversary>(); };
}
AdversaryFactory leaky_adversary(int k) {
  if (k < 0) throw ParameterError("leaky adversary needs k >= 0");
  return [k] { return std::make_unique<ForwardAdversary>(k); };
}

std::map<std::string, AdversaryFactory> builtin_adversaries() {
  return {{"classical_record", classical_record_adversary()},
          {"forward_to_bob", forward_to_bob_adversary()},
          {"broadcast_measure", broadcast_measure_adversary()},
          {"leaky:4", leaky_adversary(4)}};
}

AdversaryFactory find_adversary(const std::string& name) {
  const std::string prefix = "leaky:";
  if (name.rfind(prefix, 0) == 0) {
    try {
      std::size_t used = 0;
      int k = std::stoi(name.substr(prefix.size()), &used);
      if (used == name.size() - prefix.size()) return leaky_adversary(k);
    } catch (const std::logic_error&) {
    }
    throw ParameterError("bad leaky adversary '" + name + "' (expected leaky:K)");
  }
  auto all = builtin_adversaries();
  auto it = all.find(name);
  if (it == all.end()) throw ParameterError("unknown attack '" + name + "'");
  return it->second;
}

// -- Statistics ------------------------------------------------------------------

double wald_radius(long count, long trials) {
  if (trials <= 0) return 0.0;
  double p = static_cast<double>(count) / trials;
  return 1.96 * std::sqrt(p * (1.0 - p) / trials);
}

void AttackStats::merge(const AttackStats& o) {
  trials += o.trials;
  accepted += o.accepted;
  joint_success += o.joint_success;
  bob_success += o.bob_success;
  charlie_success += o.charlie_success;
  both_right_or_wrong += o.both_right_or_wrong;
  aborted += o.aborted;
  capability_violations += o.capability_violations;
  instance_both_right += o.instance_both_right;
  instance_total += o.instance_total;
}

namespace {

// Runs trial(i, stats) for every i, each into its own slot, then merges in
// index order.
template <typename Stats = AttackStats, typename Fn>
Stats run_trials(const RunOptions& opt, Fn trial) {
  if (opt.trials < 0) throw ParameterError("trial count must be non-negative");
  std::vector<Stats> per(static_cast<std::size_t>(opt.trials));
  int workers = opt.threads > 0 ? opt.threads : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min<int>(workers, static_cast<int>(std::max<long>(opt.trials, 1))));
  std::vector<std::exception_ptr> errors(workers);
  auto work = [&](int w) {
    try {
      for (long i = w; i < opt.trials; i += workers) trial(i, per[i]);
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  Stats total;
  for (const auto& s : per) total.merge(s);
  return total;
}

struct TrialStreams {
  Rng message, devices, enc, key_bob, key_charlie, split, bob, charlie, adversary;
  explicit TrialStreams(const Rng& t)
      : message(t.derive("message")),
        devices(t.derive("devices")),
        enc(t.derive("enc")),
        key_bob(t.derive("key", 0)),
        key_charlie(t.derive("key", 1)),
        split(t.derive("split")),
        bob(t.derive("bob")),
        charlie(t.derive("charlie")),
        adversary(t.derive("adversary")) {}
};

Rng trial_root(std::uint64_t seed, long i) { return Rng(seed).derive("trial", static_cast<std::uint64_t>(i)); }

LeakageBudget budget_for(const Protocol& protocol, int bits) {
  LeakageBudget b = LeakageBudget::from_rate(protocol.params().nu, protocol.params().l());
  b.declare_schedule(bits);
  return b;
}

Message zero_message(const Protocol& protocol) { return Message(protocol.params().message_length(), 0); }

Message checked_target(const Protocol& protocol, Message m) {
  if (static_cast<int>(m.size()) != protocol.params().message_length()) {
    throw StructuralError("distinguisher target has the wrong length");
  }
  bool nonzero = false;
  for (int s : m) {
    if (s < 0 || s >= protocol.params().modulus()) throw StructuralError("distinguisher target outside the field");
    nonzero |= s != 0;
  }
  if (!nonzero) throw ParameterError("distinguisher target must differ from the zero message");
  return m;
}

}  // namespace

AttackStats run_cloning_attack(const Protocol& protocol, const AdversaryFactory& factory, const RunOptions& opt) {
  // Reject an over-budget schedule before any trial runs.
  budget_for(protocol, factory()->leak_bits());
  return run_trials(opt, [&](long i, AttackStats& st) {
    TrialStreams r(trial_root(opt.seed, i));
    auto adv = factory();
    st.trials = 1;
    Message m = random_message(protocol.params(), r.message);
    DevicePair devices = adv->make_devices(protocol, r.devices);
    EncResult e = protocol.enc(m, devices, r.enc);
    SplitResult parts = adv->split(protocol, e.ciphertext, r.split);
    DecryptionKey kb = protocol.key_rel(e.key, r.key_bob);
    DecryptionKey kc = protocol.key_rel(e.key, r.key_charlie);
    LeakageBudget budget = budget_for(protocol, adv->leak_bits());
    budget.open();
    PartyView vb(Party::kBob, protocol, e.ciphertext.u, e.ciphertext.c, kb, kc, budget);
    PartyView vc(Party::kCharlie, protocol, e.ciphertext.u, e.ciphertext.c, kb, kc, budget);
    PartyGuess gb, gc;
    try {
      gb = parts.bob->guess(vb, r.bob);
      gc = parts.charlie->guess(vc, r.charlie);
    } catch (const CapabilityViolation&) {
      st = AttackStats{};
      st.aborted = 1;
      st.capability_violations = 1;
      return;
    }
    const bool accept = e.flag == Flag::kAccept;
    const bool bob_ok = gb.message == m;
    const bool charlie_ok = gc.message == m;
    st.accepted = accept;
    st.bob_success = bob_ok;
    st.charlie_success = charlie_ok;
    st.joint_success = accept && bob_ok && charlie_ok;
    st.both_right_or_wrong = bob_ok == charlie_ok;
    if (gb.raw && gc.raw) {
      const auto& a = e.key.a;
      for (int j = 0; j < protocol.params().l(); ++j) {
        if (e.key.u[j] != kKeep || kb.x_tilde[j] == kBlank || kc.x_tilde[j] == kBlank) continue;
        ++st.instance_total;
        st.instance_both_right += ((*gb.raw)[j] == a[j] && (*gc.raw)[j] == a[j]) ? 1 : 0;
      }
    }
  });
}

void PipelineStats::merge(const PipelineStats& o) {
  trials += o.trials;
  accepted += o.accepted;
  correct += o.correct;
  decoded += o.decoded;
  decoded_exact += o.decoded_exact;
  failures += o.failures;
  support += o.support;
}

PipelineStats run_pipeline(const Protocol& protocol, const RunOptions& opt) {
  return run_trials<PipelineStats>(opt, [&](long i, PipelineStats& st) {
    TrialStreams r(trial_root(opt.seed, i));
    const ProtocolParams& p = protocol.params();
    Message m = random_message(p, r.message);
    DevicePair devices = make_honest_devices(p.l(), p.q);
    EncResult e = protocol.enc(m, devices, r.enc);
    DecryptionKey k = protocol.key_rel(e.key, r.key_bob);
    DecOutcome out = protocol.dec_detailed(e.ciphertext.u, e.ciphertext.c, k, *e.ciphertext.device, r.bob);
    Bits support = Protocol::decode_support(e.key.u, k.x_tilde);
    st.trials = 1;
    st.accepted = e.flag == Flag::kAccept;
    st.correct = st.accepted && out.message == m;
    st.decoded = out.decoded;
    st.decoded_exact = out.decoded && out.guess == Protocol::masked_raw_key(e.key.a, e.key.u, k.x_tilde);
    st.failures = e.transcript.failures;
    for (auto b : support) st.support += b;
  });
}

// -- Distinguishing --------------------------------------------------------------

namespace {

Message all_ones(const Protocol& protocol) { return Message(protocol.params().message_length(), 1); }

class CTest final : public Distinguisher {
 public:
  int guess(const Protocol& protocol, const Ciphertext& ct, const Message*, Rng&) override {
    return ct.c == target(protocol) ? 1 : 0;
  }
};

class ConstantGuess final : public Distinguisher {
 public:
  explicit ConstantGuess(int bit) : bit_(bit) {}
  int guess(const Protocol&, const Ciphertext&, const Message*, Rng&) override { return bit_; }

 private:
  int bit_;
};

class PadOracle final : public Distinguisher {
 public:
  bool wants_pad() const override { return true; }
  int guess(const Protocol& protocol, const Ciphertext& ct, const Message* pad, Rng&) override {
    const int p = protocol.params().modulus();
    Message m(ct.c.size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = ((ct.c[i] - (*pad)[i]) % p + p) % p;
    return m == target(protocol) ? 1 : 0;
  }
};

class Lifted final : public CloningDistinguisher {
 public:
  explicit Lifted(std::unique_ptr<Distinguisher> inner) : inner_(std::move(inner)) {}
  Message target(const Protocol& protocol) const override { return inner_->target(protocol); }
  DevicePair make_devices(const Protocol& protocol, Rng& rng) override { return inner_->make_devices(protocol, rng); }
  bool wants_pad() const override { return inner_->wants_pad(); }
  Bits2 guess(const Protocol& protocol, const Ciphertext& ct, const Message* pad, const PartyView&, const PartyView&,
              Rng& rng) override {
    int b = inner_->guess(protocol, ct, pad, rng);
    return {b, b};
  }

 private:
  std::unique_ptr<Distinguisher> inner_;
};

class ForwardDistinguisher final : public CloningDistinguisher {
 public:
  Bits2 guess(const Protocol& protocol, const Ciphertext& ct, const Message*, const PartyView& bob, const PartyView&,
              Rng& rng) override {
    Rng bob_rng = rng.derive("bob");
    Rng charlie_rng = rng.derive("charlie");
    Message m = protocol.dec_detailed(ct.u, ct.c, bob.own_key(), *ct.device, bob_rng).message;
    return {m == target(protocol) ? 1 : 0, charlie_rng.bit()};
  }
};

}  // namespace

Message Distinguisher::target(const Protocol& protocol) const { return all_ones(protocol); }

DevicePair Distinguisher::make_devices(const Protocol& protocol, Rng&) {
  return make_honest_devices(protocol.params().l(), protocol.params().q);
}

Message CloningDistinguisher::target(const Protocol& protocol) const { return all_ones(protocol); }

DevicePair CloningDistinguisher::make_devices(const Protocol& protocol, Rng&) {
  return make_honest_devices(protocol.params().l(), protocol.params().q);
}

DistinguisherFactory c_test_distinguisher() {
  return [] { return std::make_unique<CTest>(); };
}
DistinguisherFactory constant_distinguisher(int bit) {
  if (bit != 0 && bit != 1) throw ParameterError("constant distinguisher needs a bit");
  return [bit] { return std::make_unique<ConstantGuess>(bit); };
}
DistinguisherFactory pad_oracle_distinguisher() {
  return [] { return std::make_unique<PadOracle>(); };
}

CloningDistinguisherFactory lift_distinguisher(DistinguisherFactory inner) {
  return [inner = std::move(inner)] { return std::make_unique<Lifted>(inner()); };
}

CloningDistinguisherFactory forward_to_bob_distinguisher() {
  return [] { return std::make_unique<ForwardDistinguisher>(); };
}

DistinguisherFactory find_distinguisher(const std::string& name) {
  if (name == "c_test") return c_test_distinguisher();
  if (name == "pad_oracle") return pad_oracle_distinguisher();
  if (name == "constant:0") return constant_distinguisher(0);
  if (name == "constant:1") return constant_distinguisher(1);
  throw ParameterError("unknown distinguisher '" + name + "'");
}

CloningDistinguisherFactory find_cloning_distinguisher(const std::string& name) {
  if (name == "forward_to_bob_distinguisher") return forward_to_bob_distinguisher();
  const std::string prefix = "lifted:";
  if (name.rfind(prefix, 0) == 0) return lift_distinguisher(find_distinguisher(name.substr(prefix.size())));
  throw ParameterError("unknown cloning distinguisher '" + name + "'");
}

AttackStats run_distinguishing_attack(const Protocol& protocol, const DistinguisherFactory& factory,
                                      const RunOptions& opt) {
  return run_trials(opt, [&](long i, AttackStats& st) {
    TrialStreams r(trial_root(opt.seed, i));
    auto adv = factory();
    const Message target = checked_target(protocol, adv->target(protocol));
    const int b = r.message.bit();
    const Message m = b ? target : zero_message(protocol);
    DevicePair devices = adv->make_devices(protocol, r.devices);
    EncResult e = protocol.enc(m, devices, r.enc);
    const int guess = adv->guess(protocol, e.ciphertext, adv->wants_pad() ? &e.key.r : nullptr, r.adversary);
    const bool accept = e.flag == Flag::kAccept;
    st.trials = 1;
    st.accepted = accept;
    st.bob_success = guess == b;
    st.joint_success = accept && guess == b;
  });
}

AttackStats run_cloning_distinguishing_attack(const Protocol& protocol, const CloningDistinguisherFactory& factory,
                                              const RunOptions& opt) {
  return run_trials(opt, [&](long i, AttackStats& st) {
    TrialStreams r(trial_root(opt.seed, i));
    auto adv = factory();
    const Message target = checked_target(protocol, adv->target(protocol));
    const int b = r.message.bit();
    const Message m = b ? target : zero_message(protocol);
    DevicePair devices = adv->make_devices(protocol, r.devices);
    EncResult e = protocol.enc(m, devices, r.enc);
    DecryptionKey kb = protocol.key_rel(e.key, r.key_bob);
    DecryptionKey kc = protocol.key_rel(e.key, r.key_charlie);
    LeakageBudget budget = budget_for(protocol, 0);
    budget.open();
    PartyView vb(Party::kBob, protocol, e.ciphertext.u, e.ciphertext.c, kb, kc, budget);
    PartyView vc(Party::kCharlie, protocol, e.ciphertext.u, e.ciphertext.c, kb, kc, budget);
    CloningDistinguisher::Bits2 g{};
    try {
      g = adv->guess(protocol, e.ciphertext, adv->wants_pad() ? &e.key.r : nullptr, vb, vc, r.adversary);
    } catch (const CapabilityViolation&) {
      st = AttackStats{};
      st.aborted = 1;
      st.capability_violations = 1;
      return;
    }
    const bool accept = e.flag == Flag::kAccept;
    st.trials = 1;
    st.accepted = accept;
    st.bob_success = g.bob == b;
    st.charlie_success = g.charlie == b;
    st.both_right_or_wrong = (g.bob == b) == (g.charlie == b);
    st.joint_success = accept && g.bob == b && g.charlie == b;
  });
}

}  // namespace divkecm
