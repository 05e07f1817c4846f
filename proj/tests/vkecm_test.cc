#include <gtest/gtest.h>

#include "divkecm/errors.h"
#include "divkecm/vkecm.h"
#include "oracles.h"

using namespace divkecm;

namespace {

ProtocolParams small_params(int l = 128, double q = 0.0) {
  ProtocolParams p;
  p.lambda = l;
  p.q = q;
  return p;
}

bool contains(const std::vector<std::string>& v, const std::string& needle) {
  for (const auto& s : v) {
    if (s.find(needle) != std::string::npos) return true;
  }
  return false;
}

// Device pair replaying fixed outputs, for exercising the accept test.
class ScriptedClient : public ClientDevice {
 public:
  explicit ScriptedClient(Bits a) : a_(std::move(a)) {}
  Bits input(const Inputs&, Rng&) override { return a_; }

 private:
  Bits a_;
};

class ScriptedReceiver : public ReceiverDevice {
 public:
  explicit ScriptedReceiver(Bits s) : s_(std::move(s)) {}
  Bits round1(const Inputs&, Rng&) override { return s_; }
  Bits round2(const Inputs& x, Rng&) override { return Bits(x.size(), 0); }

 private:
  Bits s_;
};

}  // namespace

TEST(Vkecm, ValidateParams) {
  ProtocolParams p = small_params();
  EXPECT_TRUE(validate_params(p, Mode::kDemo).empty());
  p.q = 0.004;
  EXPECT_TRUE(validate_params(p, Mode::kDemo).empty());
  auto strict = validate_params(p, Mode::kStrict);
  ASSERT_EQ(strict.size(), 1u);
  EXPECT_TRUE(contains(strict, "error-correction cost"));
  p.q = 0.01;
  EXPECT_TRUE(contains(validate_params(p, Mode::kDemo), "delta/4"));
  ProtocolParams bad = small_params();
  bad.gamma = 1.5;
  bad.xi = 0.5;
  auto v = validate_params(bad, Mode::kDemo);
  EXPECT_EQ(v.size(), 2u);
  EXPECT_THROW(Protocol{bad}, ParameterError);
  ProtocolParams zero = small_params();
  EXPECT_TRUE(validate_params(zero, Mode::kStrict).empty());
}

TEST(Vkecm, AcceptThresholdOffByOne) {
  ProtocolParams p = small_params(512);
  const double bound = (0.2 * (1 - oracle::omega_star()) + 0.015) * 512;
  EXPECT_EQ(accept_threshold(p), static_cast<int>(std::floor(bound)));
  EXPECT_EQ(accept_threshold(p), 22);

  // Exactly `threshold` failures accepts, one more rejects.
  Protocol prot(p);
  for (int extra : {0, 1}) {
    const int l = p.l();
    // First run only to learn U and X from the seeded input stream.
    Rng rng(5);
    Rng probe = rng;
    DevicePair honest = make_honest_devices(l, 0.0);
    EncDevicePhase ph = prot.run_devices(*honest.client, honest.receiver, probe);
    Bits a(l, 0), s(l, 0);
    int failures = 0;
    const int want = accept_threshold(p) + extra;
    for (int i = 0; i < l; ++i) {
      if (ph.u[i] == kKeep) continue;
      int target = ph.x[i] & ph.u[i];
      s[i] = failures < want ? static_cast<std::uint8_t>(target ^ 1) : static_cast<std::uint8_t>(target);
      failures += failures < want;
    }
    ScriptedClient c(a);
    auto r = std::make_shared<ScriptedReceiver>(s);
    EncDevicePhase scripted = prot.run_devices(c, r, rng);
    EXPECT_EQ(scripted.transcript.failures, want);
    EXPECT_EQ(scripted.transcript.flag, extra == 0 ? Flag::kAccept : Flag::kReject);
  }
}

TEST(Vkecm, HonestNoiselessRoundTrip) {
  for (Variant var : {Variant::kString, Variant::kIp2, Variant::kIp3}) {
    ProtocolParams p = small_params(128);
    p.variant = var;
    Protocol prot(p);
    for (int t = 0; t < 20; ++t) {
      Rng rng(100 + t);
      Rng mr = rng.derive("m");
      Message m = random_message(p, mr);
      DevicePair d = make_honest_devices(p.l(), 0.0);
      Rng er = rng.derive("enc");
      EncResult e = prot.enc(m, d, er);
      if (e.flag != Flag::kAccept) continue;
      Rng kr = rng.derive("key");
      DecryptionKey k = prot.key_rel(e.key, kr);
      Rng dr = rng.derive("dec");
      EXPECT_EQ(prot.dec(e.ciphertext, k, dr), m);
      if (var != Variant::kString) {
        EXPECT_EQ(k.r_hat.size(), 128u);
        for (int v : k.r_hat) EXPECT_LT(v, p.modulus());
        ASSERT_EQ(k.d.size(), 1u);
        EXPECT_LT(k.d[0], p.modulus());
      } else {
        EXPECT_TRUE(k.r_hat.empty());
      }
    }
  }
}

TEST(Vkecm, KeyRelRevealsOnlyMaskedKey) {
  ProtocolParams p = small_params(128);
  Protocol prot(p);
  Rng rng(3);
  Message m = random_message(p, rng);
  DevicePair d = make_honest_devices(p.l(), 0.0);
  EncResult e = prot.enc(m, d, rng);
  for (int t = 0; t < 10; ++t) {
    DecryptionKey k = prot.key_rel(e.key, rng);
    for (int i = 0; i < p.l(); ++i) {
      const int a_tilde = k.d[i] ^ e.key.r[i];
      const bool revealed = e.key.u[i] == kKeep && k.x_tilde[i] != kBlank;
      EXPECT_EQ(a_tilde, revealed ? e.key.a[i] : 0);
      if (k.x_tilde[i] != kBlank) EXPECT_EQ(k.x_tilde[i], e.key.x[i] + 2);
    }
  }
  ProtocolParams p0 = p;
  p0.alpha = 1e-12;
  Protocol prot0(p0);
  DecryptionKey k0 = prot0.key_rel(e.key, rng);
  for (int v : k0.x_tilde) EXPECT_NE(v, kBlank);
}

TEST(Vkecm, RejectBranchIsIndependentOfMessage) {
  // At l = 64 the threshold is 2 failures, so honest runs reject often.
  ProtocolParams p = small_params(64);
  Protocol prot(p);
  int rejects = 0;
  for (int t = 0; t < 200; ++t) {
    Rng rng(t);
    Message m(64, 1), zero(64, 0);
    Rng r1 = rng, r2 = rng;
    DevicePair d1 = make_honest_devices(64, 0.0);
    DevicePair d2 = make_honest_devices(64, 0.0);
    EncResult e1 = prot.enc(m, d1, r1);
    EncResult e2 = prot.enc(zero, d2, r2);
    ASSERT_EQ(e1.flag, e2.flag);
    if (e1.flag == Flag::kReject) {
      ++rejects;
      EXPECT_EQ(e1.ciphertext.c, e2.ciphertext.c);
    } else {
      // Same pad: C differs exactly by m.
      for (int i = 0; i < 64; ++i) EXPECT_EQ(e1.ciphertext.c[i] ^ e2.ciphertext.c[i], 1);
    }
  }
  SUCCEED() << rejects << " rejects";
}

TEST(Vkecm, FinalizeWithSuppliedPad) {
  ProtocolParams p = small_params(16);
  Protocol prot(p);
  Rng rng(1);
  DevicePair d = make_honest_devices(16, 0.0);
  EncDevicePhase ph = prot.run_devices(*d.client, d.receiver, rng);
  Message m(16, 1), pad(16, 0), dummy(16, 1);
  pad[3] = 1;
  EncResult e = prot.finalize(ph, m, pad, dummy);
  if (e.flag == Flag::kAccept) {
    EXPECT_EQ(e.ciphertext.c[3], 0);
    EXPECT_EQ(e.ciphertext.c[4], 1);
  } else {
    EXPECT_EQ(e.ciphertext.c, dummy);
  }
  EXPECT_THROW(prot.finalize(ph, Message(3, 0), pad, dummy), StructuralError);
}

TEST(Vkecm, Bounds) {
  ProtocolParams p = small_params(512);
  BoundsReport b = uncloneability_bounds(p);
  auto o = oracle::bounds_row(512, 0.2, 0.3, 0.0, 2, 0.03, 1, 0);
  EXPECT_NEAR(b.t, o.t, 1e-9);
  EXPECT_LT(b.t, 512);
  EXPECT_TRUE(b.nontrivial);
  EXPECT_NEAR(b.t_over_lambda, 1 - 2.187e-7, 1e-15);

  // ν exactly at the threshold is not nontrivial.
  ProtocolParams edge = p;
  edge.nu = b.leak_threshold;
  EXPECT_FALSE(uncloneability_bounds(edge).nontrivial);

  // Linearity in ξ.
  ProtocolParams a = small_params(512, 0.004), c = a;
  c.xi = 3;
  double dt = uncloneability_bounds(c).t - uncloneability_bounds(a).t;
  EXPECT_NEAR(dt, 2 * 1.0 * 0.8 * 0.7 * oracle::h2(0.004) * 512, 1e-9);
}

TEST(Vkecm, JsonRoundTrip) {
  for (Variant var : {Variant::kString, Variant::kIp3}) {
    ProtocolParams p = small_params(32);
    p.variant = var;
    Protocol prot(p);
    Rng rng(7);
    Message m = random_message(p, rng);
    DevicePair d = make_honest_devices(32, 0.0);
    EncResult e = prot.enc(m, d, rng);
    DecryptionKey k = prot.key_rel(e.key, rng);
    auto jk = to_json(e.key);
    auto jd = to_json(k);
    auto jt = to_json(e.transcript);
    EXPECT_EQ(to_json(private_key_from_json(jk)).dump(), jk.dump());
    EXPECT_EQ(to_json(decryption_key_from_json(jd)).dump(), jd.dump());
    EXPECT_EQ(to_json(transcript_from_json(jt)).dump(), jt.dump());
    // Field order is fixed.
    std::vector<std::string> keys;
    for (auto& [key, _] : jk.items()) keys.push_back(key);
    EXPECT_EQ(keys, (std::vector<std::string>{"X", "U", "A", "R"}));
    EXPECT_TRUE(jk["X"].is_string());
  }
}
