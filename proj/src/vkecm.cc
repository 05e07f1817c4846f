#include "divkecm/vkecm.h"

#include <cmath>
#include <sstream>

namespace divkecm {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::kString: return "string";
    case Variant::kIp2: return "ip2";
    case Variant::kIp3: return "ip3";
  }
  return "?";
}

Variant parse_variant(const std::string& name) {
  if (name == "string") return Variant::kString;
  if (name == "ip2") return Variant::kIp2;
  if (name == "ip3") return Variant::kIp3;
  throw ParameterError("unknown variant '" + name + "' (expected string, ip2 or ip3)");
}

std::string to_string(Mode m) { return m == Mode::kStrict ? "strict" : "demo"; }

Mode parse_mode(const std::string& name) {
  if (name == "strict") return Mode::kStrict;
  if (name == "demo") return Mode::kDemo;
  throw ParameterError("unknown mode '" + name + "' (expected strict or demo)");
}

int ProtocolParams::modulus() const { return variant == Variant::kIp3 ? 3 : 2; }

int ProtocolParams::message_length() const { return variant == Variant::kString ? lambda : 1; }

std::vector<std::string> validate_params(const ProtocolParams& p, Mode mode) {
  std::vector<std::string> v;
  auto fmt = [](double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
  };
  if (p.lambda < 1) v.push_back("lambda must be at least 1");
  if (!(p.gamma > 0.0 && p.gamma < 1.0)) v.push_back("gamma must lie in (0, 1)");
  if (!(p.alpha > 0.0 && p.alpha < 1.0)) v.push_back("alpha must lie in (0, 1)");
  if (!(p.q >= 0.0 && p.q <= 0.5)) v.push_back("q must lie in [0, 0.5]");
  if (!(p.xi > 1.0)) v.push_back("xi must exceed 1");
  if (!(p.delta > 0.0)) v.push_back("delta must be positive");
  if (!(p.kappa > 0.0)) v.push_back("kappa must be positive");
  if (!(p.nu >= 0.0)) v.push_back("nu must be non-negative");
  if (p.t_max < 0 || p.t_max > LinearCode::kMaxSearchWeight) v.push_back("t_max must lie in [0, 4]");
  if (!v.empty()) return v;

  if (!(p.q < p.delta / 4.0)) {
    v.push_back("noise q = " + fmt(p.q) + " is not below delta/4 = " + fmt(p.delta / 4.0));
  }
  if (mode == Mode::kStrict) {
    double lhs = 2.0 * p.xi * (1.0 - p.gamma) * (1.0 - p.alpha) * binary_entropy(p.q);
    double rhs = p.kappa * std::pow(p.delta, 3) * std::pow(p.alpha, 4);
    if (!(lhs < rhs)) {
      v.push_back("error-correction cost 2*xi*(1-gamma)*(1-alpha)*h2(q) = " + fmt(lhs) +
                  " is not below kappa*delta^3*alpha^4 = " + fmt(rhs));
    }
  }
  return v;
}

Message random_message(const ProtocolParams& p, Rng& rng) {
  Message m(p.message_length());
  for (auto& s : m) s = static_cast<int>(rng.below(p.modulus()));
  return m;
}

int accept_threshold(const ProtocolParams& p) {
  double bound = (p.gamma * (1.0 - kChshQuantumValue) + p.delta / 2.0) * p.lambda;
  return static_cast<int>(std::floor(bound + 1e-9));
}

namespace {
std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += "; ";
    out += s;
  }
  return out;
}

LinearCode make_code(const ProtocolParams& p) {
  return LinearCode(p.l(), syndrome_length(p.xi, p.gamma, p.alpha, p.q, p.l()), p.ec_seed, p.t_max);
}

const ProtocolParams& checked(const ProtocolParams& p, Mode mode) {
  auto v = validate_params(p, mode);
  if (!v.empty()) throw ParameterError("invalid protocol parameters: " + join(v));
  return p;
}

void check_bits(const Bits& b, std::size_t l, const char* what) {
  if (b.size() != l) throw StructuralError(std::string(what) + " has the wrong length");
  for (auto v : b) {
    if (v > 1) throw StructuralError(std::string(what) + " is not a bit string");
  }
}
}  // namespace

Protocol::Protocol(ProtocolParams params, Mode mode)
    : params_(checked(params, mode)), code_(make_code(params_)) {}

void Protocol::check_message(const Message& m) const {
  if (static_cast<int>(m.size()) != params_.message_length()) {
    throw StructuralError("message has the wrong length for the variant");
  }
  for (int s : m) {
    if (s < 0 || s >= params_.modulus()) throw StructuralError("message symbol outside the field");
  }
}

Bits Protocol::decode_support(const Inputs& u, const Inputs& x_tilde) {
  Bits mask(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) mask[i] = (u[i] == kKeep && x_tilde[i] != kBlank) ? 1 : 0;
  return mask;
}

Bits Protocol::masked_raw_key(const Bits& a, const Inputs& u, const Inputs& x_tilde) {
  Bits out = decode_support(u, x_tilde);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] &= a[i];
  return out;
}

EncDevicePhase Protocol::run_devices(ClientDevice& client, std::shared_ptr<ReceiverDevice> receiver,
                                     Rng& rng) const {
  const int l = params_.l();
  EncDevicePhase ph;
  Rng choose = rng.derive("inputs");
  ph.x.resize(l);
  ph.u.resize(l);
  for (int i = 0; i < l; ++i) {
    ph.x[i] = static_cast<std::uint8_t>(choose.bit());
    ph.u[i] = choose.bernoulli(1.0 - params_.gamma) ? kKeep : choose.bit();
  }
  Rng client_rng = rng.derive("client");
  Inputs x_in(ph.x.begin(), ph.x.end());
  ph.a = client.input(x_in, client_rng);
  check_bits(ph.a, l, "client output");

  Inputs u_in = ph.u;
  for (int& v : u_in) {
    if (v == kKeep) v = kBlank;
  }
  Rng receiver_rng = rng.derive("receiver");
  Bits s = receiver->round1(u_in, receiver_rng);
  check_bits(s, l, "receiver output");

  int failures = 0;
  for (int i = 0; i < l; ++i) {
    if (ph.u[i] != kKeep && (ph.a[i] ^ s[i]) != (ph.x[i] & ph.u[i])) ++failures;
  }
  ph.transcript.u = ph.u;
  ph.transcript.s = std::move(s);
  ph.transcript.failures = failures;
  ph.transcript.threshold = accept_threshold(params_);
  ph.transcript.flag = failures <= ph.transcript.threshold ? Flag::kAccept : Flag::kReject;
  ph.receiver = std::move(receiver);
  return ph;
}

EncResult Protocol::finalize(EncDevicePhase phase, const Message& m, Rng& rng) const {
  Rng pad_rng = rng.derive("pad");
  Rng dummy_rng = rng.derive("dummy");
  Message pad = random_message(params_, pad_rng);
  Message dummy = random_message(params_, dummy_rng);
  return finalize(std::move(phase), m, pad, dummy);
}

EncResult Protocol::finalize(EncDevicePhase phase, const Message& m, const Message& pad,
                             const Message& dummy) const {
  check_message(m);
  check_message(pad);
  check_message(dummy);
  const int p = params_.modulus();
  EncResult out;
  out.flag = phase.transcript.flag;
  Message c(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    c[i] = out.flag == Flag::kAccept ? (m[i] + pad[i]) % p : dummy[i];
  }
  out.key = PrivateKey{phase.x, phase.u, phase.a, pad};
  out.ciphertext = Ciphertext{std::move(phase.receiver), phase.u, std::move(c)};
  out.transcript = std::move(phase.transcript);
  return out;
}

EncResult Protocol::enc(const Message& m, DevicePair& devices, Rng& rng) const {
  check_message(m);
  if (!devices.client || !devices.receiver) throw StructuralError("enc: missing device");
  return finalize(run_devices(*devices.client, devices.receiver, rng), m, rng);
}

DecryptionKey Protocol::key_rel(const PrivateKey& key, Rng& rng) const {
  const int l = params_.l();
  check_bits(key.x, l, "private key X");
  check_bits(key.a, l, "private key A");
  check_inputs(key.u, l, kKeep);
  check_message(key.r);
  DecryptionKey dk;
  dk.x_tilde.resize(l);
  for (int i = 0; i < l; ++i) dk.x_tilde[i] = rng.bernoulli(params_.alpha) ? kBlank : key.x[i] + 2;
  Bits a_tilde = masked_raw_key(key.a, key.u, dk.x_tilde);
  dk.syndrome = code_.syndrome(a_tilde);
  if (params_.variant == Variant::kString) {
    dk.d.resize(l);
    for (int i = 0; i < l; ++i) dk.d[i] = key.r[i] ^ a_tilde[i];
  } else {
    const int p = params_.modulus();
    dk.r_hat.resize(l);
    int ip = 0;
    for (int i = 0; i < l; ++i) {
      dk.r_hat[i] = static_cast<int>(rng.below(p));
      ip = (ip + a_tilde[i] * dk.r_hat[i]) % p;
    }
    dk.d = {(key.r[0] + ip) % p};
  }
  return dk;
}

DecOutcome Protocol::dec_detailed(const Inputs& u, const Message& c, const DecryptionKey& key,
                                  ReceiverDevice& device, Rng& rng) const {
  const int l = params_.l();
  check_inputs(u, l, kKeep);
  check_message(c);
  check_message(key.d);
  check_inputs(key.x_tilde, l, 3);
  const bool ip = params_.variant != Variant::kString;
  if (ip && static_cast<int>(key.r_hat.size()) != l) throw StructuralError("decryption key lacks r_hat");

  Bits raw = device.round2(key.x_tilde, rng);
  check_bits(raw, l, "receiver output");
  DecOutcome out;
  out.s_tilde = masked_raw_key(raw, u, key.x_tilde);
  Bits support = decode_support(u, key.x_tilde);
  auto guess = decode_guess(code_, out.s_tilde, key.syndrome, &support);
  out.decoded = guess.has_value();
  out.guess = guess ? *guess : out.s_tilde;

  const int p = params_.modulus();
  if (!ip) {
    out.message.resize(l);
    for (int i = 0; i < l; ++i) out.message[i] = c[i] ^ key.d[i] ^ out.guess[i];
  } else {
    int g = 0;
    for (int i = 0; i < l; ++i) g = (g + out.guess[i] * key.r_hat[i]) % p;
    out.message = {((c[0] - key.d[0] + g) % p + p) % p};
  }
  return out;
}

Message Protocol::dec(const Ciphertext& ct, const DecryptionKey& key, Rng& rng) const {
  if (!ct.device) throw StructuralError("dec: ciphertext has no device");
  return dec_detailed(ct.u, ct.c, key, *ct.device, rng).message;
}

// -- Bounds ----------------------------------------------------------------------

BoundsReport uncloneability_bounds(const ProtocolParams& p) {
  BoundsReport r{};
  const double h = binary_entropy(p.q);
  const double keep_reveal = (1.0 - p.gamma) * (1.0 - p.alpha);
  r.kdaa = p.kappa * std::pow(p.delta, 3) * std::pow(p.alpha, 4);
  r.ec_term = 2.0 * p.xi * keep_reveal * h;
  r.t_over_lambda = 1.0 - r.kdaa + r.ec_term + p.nu;
  r.t = r.t_over_lambda * p.lambda;
  r.leak_threshold = r.kdaa - r.ec_term;
  r.nontrivial = p.nu < r.leak_threshold;
  r.zero_unclone_rhs = r.kdaa - 2.0 * keep_reveal * h;
  r.zero_unclone = 3.0 * p.nu < r.zero_unclone_rhs;
  r.syndrome_bits = syndrome_length(p.xi, p.gamma, p.alpha, p.q, p.lambda);
  r.log2_game_bound = -r.kdaa * p.lambda + 2.0 * r.syndrome_bits;
  r.strict_violations = validate_params(p, Mode::kStrict);
  return r;
}

// -- Serialization ---------------------------------------------------------------

namespace {

std::string symbols_to_string(const std::vector<int>& v) {
  std::string s;
  s.reserve(v.size());
  for (int x : v) s += static_cast<char>('0' + x);
  return s;
}

std::string bits_to_string(const Bits& b) {
  std::string s;
  for (auto v : b) s += static_cast<char>('0' + v);
  return s;
}

Bits bits_from_string(const std::string& s) {
  Bits b;
  for (char ch : s) {
    if (ch != '0' && ch != '1') throw StructuralError("bit string contains '" + std::string(1, ch) + "'");
    b.push_back(static_cast<std::uint8_t>(ch - '0'));
  }
  return b;
}

std::vector<int> digits_from_string(const std::string& s) {
  std::vector<int> v;
  for (char ch : s) {
    if (ch < '0' || ch > '9') throw StructuralError("digit string contains '" + std::string(1, ch) + "'");
    v.push_back(ch - '0');
  }
  return v;
}

std::string u_to_string(const Inputs& u) {
  std::string s;
  for (int v : u) s += v == kKeep ? 'k' : static_cast<char>('0' + v);
  return s;
}

Inputs u_from_string(const std::string& s) {
  Inputs u;
  for (char ch : s) {
    if (ch == 'k') u.push_back(kKeep);
    else if (ch == '0' || ch == '1') u.push_back(ch - '0');
    else throw StructuralError("U string contains '" + std::string(1, ch) + "'");
  }
  return u;
}

std::string xt_to_string(const Inputs& x) {
  std::string s;
  for (int v : x) s += v == kBlank ? '_' : static_cast<char>('0' + v);
  return s;
}

Inputs xt_from_string(const std::string& s) {
  Inputs x;
  for (char ch : s) {
    if (ch == '_') x.push_back(kBlank);
    else if (ch >= '0' && ch <= '3') x.push_back(ch - '0');
    else throw StructuralError("x-tilde string contains '" + std::string(1, ch) + "'");
  }
  return x;
}

}  // namespace

nlohmann::ordered_json to_json(const PrivateKey& k) {
  nlohmann::ordered_json j;
  j["X"] = bits_to_string(k.x);
  j["U"] = u_to_string(k.u);
  j["A"] = bits_to_string(k.a);
  j["R"] = symbols_to_string(k.r);
  return j;
}

nlohmann::ordered_json to_json(const DecryptionKey& k) {
  nlohmann::ordered_json j;
  j["D"] = symbols_to_string(k.d);
  j["syndrome"] = bits_to_string(k.syndrome);
  j["x_tilde"] = xt_to_string(k.x_tilde);
  j["r_hat"] = symbols_to_string(k.r_hat);
  return j;
}

nlohmann::ordered_json to_json(const Transcript& t) {
  nlohmann::ordered_json j;
  j["U"] = u_to_string(t.u);
  j["S"] = bits_to_string(t.s);
  j["failures"] = t.failures;
  j["threshold"] = t.threshold;
  j["flag"] = t.flag == Flag::kAccept ? "accept" : "reject";
  return j;
}

PrivateKey private_key_from_json(const nlohmann::ordered_json& j) {
  return PrivateKey{bits_from_string(j.at("X").get<std::string>()), u_from_string(j.at("U").get<std::string>()),
                    bits_from_string(j.at("A").get<std::string>()),
                    digits_from_string(j.at("R").get<std::string>())};
}

DecryptionKey decryption_key_from_json(const nlohmann::ordered_json& j) {
  return DecryptionKey{digits_from_string(j.at("D").get<std::string>()),
                       bits_from_string(j.at("syndrome").get<std::string>()),
                       xt_from_string(j.at("x_tilde").get<std::string>()),
                       digits_from_string(j.at("r_hat").get<std::string>())};
}

Transcript transcript_from_json(const nlohmann::ordered_json& j) {
  Transcript t;
  t.u = u_from_string(j.at("U").get<std::string>());
  t.s = bits_from_string(j.at("S").get<std::string>());
  t.failures = j.at("failures").get<int>();
  t.threshold = j.at("threshold").get<int>();
  const std::string flag = j.at("flag").get<std::string>();
  if (flag != "accept" && flag != "reject") throw StructuralError("flag must be accept or reject");
  t.flag = flag == "accept" ? Flag::kAccept : Flag::kReject;
  return t;
}

}  // namespace divkecm
