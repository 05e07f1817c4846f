#include <gtest/gtest.h>

#include "divkecm/attacks.h"
#include "divkecm/errors.h"
#include "oracles.h"

using namespace divkecm;

namespace {

ProtocolParams params(int l, Variant v = Variant::kString, double nu = 0.0) {
  ProtocolParams p;
  p.lambda = l;
  p.variant = v;
  p.nu = nu;
  return p;
}

RunOptions opts(long trials, std::uint64_t seed = 1, int threads = 0) {
  RunOptions o;
  o.trials = trials;
  o.seed = seed;
  o.threads = threads;
  return o;
}

// Binomial(n, 1/2) check on a count.
bool near_half(long count, long n) { return n == 0 ? count == 0 : oracle::within_sigma(count, n, 0.5); }

// Bob reaches for Charlie's key.
class GreedyProgram : public PartyProgram {
 public:
  PartyGuess guess(const PartyView& view, Rng&) override {
    view.key_of(Party::kCharlie);
    return {};
  }
};

class GreedyAdversary : public CloningAdversary {
 public:
  SplitResult split(const Protocol&, const Ciphertext&, Rng&) override {
    return {std::make_unique<GreedyProgram>(), uniform_program()};
  }
};

void expect_same(const AttackStats& a, const AttackStats& b) {
  EXPECT_EQ(a.trials, b.trials);
  EXPECT_EQ(a.accepted, b.accepted);
  EXPECT_EQ(a.joint_success, b.joint_success);
  EXPECT_EQ(a.bob_success, b.bob_success);
  EXPECT_EQ(a.charlie_success, b.charlie_success);
  EXPECT_EQ(a.instance_both_right, b.instance_both_right);
}

}  // namespace

TEST(Attacks, Catalog) {
  auto cat = builtin_adversaries();
  for (const char* name : {"classical_record", "forward_to_bob", "broadcast_measure", "leaky:4"}) {
    EXPECT_TRUE(cat.count(name)) << name;
  }
  EXPECT_EQ(find_adversary("leaky:3")()->leak_bits(), 3);
  EXPECT_ANY_THROW(find_adversary("nope"));
  EXPECT_ANY_THROW(find_adversary("leaky:x"));
  EXPECT_ANY_THROW(find_distinguisher("nope"));
  EXPECT_ANY_THROW(find_cloning_distinguisher("lifted:nope"));
}

TEST(Attacks, WaldRadius) {
  EXPECT_NEAR(wald_radius(50, 100), 1.96 * 0.05, 1e-12);
  EXPECT_EQ(wald_radius(0, 0), 0.0);
}

TEST(Attacks, ForwardToBobLeavesCharlieGuessing) {
  Protocol prot(params(32));
  AttackStats s = run_cloning_attack(prot, forward_to_bob_adversary(), opts(400));
  EXPECT_EQ(s.trials, 400);
  EXPECT_EQ(s.joint_success, 0);
  EXPECT_GE(s.bob_success, s.accepted);  // noiseless: every accepted run decrypts
  EXPECT_EQ(s.aborted, 0);
}

TEST(Attacks, ForwardToBobOnSingleBit) {
  Protocol prot(params(64, Variant::kIp2));
  AttackStats s = run_cloning_attack(prot, forward_to_bob_adversary(), opts(2000));
  EXPECT_GT(s.accepted, 0);
  EXPECT_TRUE(near_half(s.joint_success, s.accepted)) << s.joint_success << "/" << s.accepted;
}

TEST(Attacks, ClassicalRecordBounded) {
  Protocol prot(params(64));
  AttackStats s = run_cloning_attack(prot, classical_record_adversary(), opts(500));
  EXPECT_LE(s.joint_success, s.accepted);
  EXPECT_LE(s.accepted, s.trials);
}

TEST(Attacks, BroadcastInstanceRate) {
  Protocol prot(params(128));
  AttackStats s = run_cloning_attack(prot, broadcast_measure_adversary(), opts(200));
  ASSERT_GT(s.instance_total, 1000);
  EXPECT_TRUE(oracle::within_sigma(s.instance_both_right, s.instance_total, oracle::omega_star()))
      << s.instance_rate();
}

TEST(Attacks, CapabilityViolationAborts) {
  Protocol prot(params(16));
  AdversaryFactory f = [] { return std::make_unique<GreedyAdversary>(); };
  AttackStats s = run_cloning_attack(prot, f, opts(20));
  EXPECT_EQ(s.aborted, 20);
  EXPECT_EQ(s.capability_violations, 20);
  EXPECT_EQ(s.trials, 0);
  EXPECT_EQ(s.joint_success, 0);
}

TEST(Attacks, LeakBudgetEnforced) {
  Protocol prot(params(64, Variant::kIp2, 0.125));
  EXPECT_THROW(run_cloning_attack(prot, leaky_adversary(9), opts(10)), ProtocolError);
  EXPECT_NO_THROW(run_cloning_attack(prot, leaky_adversary(8), opts(10)));
  Protocol tight(params(64, Variant::kIp2, 0.0));
  EXPECT_THROW(run_cloning_attack(tight, leaky_adversary(1), opts(10)), ProtocolError);
}

TEST(Attacks, LeakHelpsCharlie) {
  Protocol prot(params(64, Variant::kIp2, 0.125));
  AttackStats none = run_cloning_attack(prot, leaky_adversary(0), opts(2000));
  AttackStats one = run_cloning_attack(prot, leaky_adversary(1), opts(2000));
  EXPECT_EQ(none.accepted, one.accepted);  // same trial streams
  EXPECT_TRUE(near_half(none.joint_success, none.accepted));
  // One bit carries the whole ip2 message.
  EXPECT_EQ(one.joint_success, one.accepted);
}

TEST(Attacks, ThreadCountIndependence) {
  Protocol prot(params(64));
  expect_same(run_cloning_attack(prot, broadcast_measure_adversary(), opts(60, 3, 1)),
              run_cloning_attack(prot, broadcast_measure_adversary(), opts(60, 3, 4)));
  PipelineStats a = run_pipeline(prot, opts(60, 3, 1)), b = run_pipeline(prot, opts(60, 3, 3));
  EXPECT_EQ(a.accepted, b.accepted);
  EXPECT_EQ(a.correct, b.correct);
  EXPECT_EQ(a.failures, b.failures);
}

TEST(Attacks, Pipeline) {
  ProtocolParams p = params(128);
  Protocol prot(p);
  PipelineStats s = run_pipeline(prot, opts(200));
  EXPECT_EQ(s.trials, 200);
  EXPECT_EQ(s.correct, s.accepted);  // noiseless
  EXPECT_EQ(s.decoded_exact, s.trials);
}

TEST(Distinguishing, BaselineRates) {
  Protocol prot(params(64));
  const long n = 4000;
  AttackStats c = run_distinguishing_attack(prot, c_test_distinguisher(), opts(n));
  EXPECT_TRUE(near_half(c.joint_success, c.accepted));
  EXPECT_TRUE(oracle::within_sigma(c.bob_success, n, 0.5));
  AttackStats k0 = run_distinguishing_attack(prot, constant_distinguisher(0), opts(n));
  AttackStats k1 = run_distinguishing_attack(prot, constant_distinguisher(1), opts(n));
  // Same streams: the two constants split the accepted runs between them.
  EXPECT_EQ(k0.accepted, k1.accepted);
  EXPECT_EQ(k0.joint_success + k1.joint_success, k0.accepted);
  AttackStats pad = run_distinguishing_attack(prot, pad_oracle_distinguisher(), opts(n));
  EXPECT_EQ(pad.joint_success, pad.accepted);
}

TEST(Distinguishing, LiftedIsBitIdentical) {
  Protocol prot(params(32));
  for (const char* name : {"c_test", "constant:1", "pad_oracle"}) {
    AttackStats single = run_distinguishing_attack(prot, find_distinguisher(name), opts(300, 9));
    AttackStats lifted =
        run_cloning_distinguishing_attack(prot, find_cloning_distinguisher(std::string("lifted:") + name), opts(300, 9));
    EXPECT_EQ(single.accepted, lifted.accepted) << name;
    EXPECT_EQ(single.joint_success, lifted.joint_success) << name;
    EXPECT_EQ(single.bob_success, lifted.bob_success) << name;
    EXPECT_EQ(lifted.bob_success, lifted.charlie_success) << name;
    EXPECT_EQ(lifted.both_right_or_wrong, lifted.trials) << name;
  }
}

TEST(Distinguishing, ForwardToBob) {
  Protocol prot(params(32));
  AttackStats s = run_cloning_distinguishing_attack(prot, forward_to_bob_distinguisher(), opts(2000));
  // Bob is right on every accepted run; Charlie is a coin.
  EXPECT_TRUE(near_half(s.joint_success, s.accepted));
  EXPECT_TRUE(oracle::within_sigma(s.charlie_success, s.trials, 0.5));
}
