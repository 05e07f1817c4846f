#include "divkecm/config.h"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <sstream>

#include "divkecm/attacks.h"
#include "divkecm/extract.h"

namespace divkecm {

namespace {

const std::vector<std::string> kSubcommands = {"pipeline", "attack", "game-value", "extract", "bounds"};
const std::vector<std::string> kGames = {"all", "chsh", "chsh-classical", "chsh-noisy", "monogamy", "clone", "delta"};

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
bool parse_number(const std::string& text, T& out) {
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && !text.empty();
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string to_string(Subcommand s) { return kSubcommands[static_cast<int>(s)]; }

std::string to_string(Format f) { return f == Format::kCsv ? "csv" : "json"; }

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::runtime_error([&] {
        std::string msg = "invalid configuration";
        for (const auto& v : violations) msg += "\n  " + v;
        return msg;
      }()),
      violations_(std::move(violations)) {}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "subcommand", "mode",    "lambda", "gamma",   "alpha",  "q",    "xi",   "delta", "kappa", "nu",     "variant",
      "ec_seed",    "t_max",   "trials", "seed",    "attack", "game", "p",    "l",     "format", "threads"};
  return keys;
}

void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& raw,
                   std::vector<std::string>& violations) {
  const std::string value = trim(raw);
  auto bad = [&](const std::string& what) { violations.push_back(key + ": " + what + " (got '" + value + "')"); };
  auto real = [&](double& field) {
    double v = 0;
    if (parse_number(value, v)) {
      field = v;
    } else {
      bad("expected a number");
    }
  };
  auto integer = [&](auto& field) {
    std::remove_reference_t<decltype(field)> v{};
    if (parse_number(value, v)) {
      field = v;
    } else {
      bad("expected an integer");
    }
  };

  ProtocolParams& p = cfg.params;
  if (key == "subcommand") {
    auto it = std::find(kSubcommands.begin(), kSubcommands.end(), value);
    if (it == kSubcommands.end()) return bad("unknown subcommand");
    cfg.subcommand = static_cast<Subcommand>(it - kSubcommands.begin());
  } else if (key == "mode") {
    try {
      cfg.mode = parse_mode(value);
    } catch (const ParameterError&) {
      bad("expected strict or demo");
    }
  } else if (key == "variant") {
    try {
      p.variant = parse_variant(value);
    } catch (const ParameterError&) {
      bad("expected string, ip2 or ip3");
    }
  } else if (key == "format") {
    if (value == "csv") {
      cfg.format = Format::kCsv;
    } else if (value == "json") {
      cfg.format = Format::kJson;
    } else {
      bad("expected csv or json");
    }
  } else if (key == "lambda") {
    integer(p.lambda);
  } else if (key == "gamma") {
    real(p.gamma);
  } else if (key == "alpha") {
    real(p.alpha);
  } else if (key == "q") {
    real(p.q);
  } else if (key == "xi") {
    real(p.xi);
  } else if (key == "delta") {
    real(p.delta);
  } else if (key == "kappa") {
    real(p.kappa);
  } else if (key == "nu") {
    real(p.nu);
  } else if (key == "ec_seed") {
    integer(p.ec_seed);
  } else if (key == "t_max") {
    integer(p.t_max);
  } else if (key == "trials") {
    integer(cfg.trials);
  } else if (key == "seed") {
    integer(cfg.seed);
  } else if (key == "attack") {
    cfg.attack = value;
  } else if (key == "game") {
    cfg.game = value;
  } else if (key == "p") {
    integer(cfg.p);
  } else if (key == "l") {
    integer(cfg.l);
  } else if (key == "out") {
    cfg.out = value;
  } else if (key == "threads") {
    integer(cfg.threads);
  } else {
    violations.push_back("unknown key '" + key + "'");
  }
}

void apply_config_text(ExperimentConfig& cfg, const std::string& text, std::vector<std::string>& violations) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      violations.push_back("line " + std::to_string(lineno) + ": expected key = value");
      continue;
    }
    apply_setting(cfg, trim(line.substr(0, eq)), line.substr(eq + 1), violations);
  }
}

std::vector<std::string> validate_config(const ExperimentConfig& cfg) {
  std::vector<std::string> v;
  if (cfg.trials < 0) v.push_back("trials must be non-negative");
  if (cfg.threads < 0) v.push_back("threads must be non-negative");
  switch (cfg.subcommand) {
    case Subcommand::kPipeline:
    case Subcommand::kAttack:
      for (auto& s : validate_params(cfg.params, cfg.mode)) v.push_back(s);
      break;
    case Subcommand::kBounds:
      // Bounds are echoed for any parameters; only the ranges must make sense.
      for (auto& s : validate_params(cfg.params, Mode::kDemo)) v.push_back(s);
      if (cfg.mode == Mode::kStrict) {
        for (auto& s : validate_params(cfg.params, Mode::kStrict)) {
          if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
        }
      }
      break;
    case Subcommand::kGameValue:
      if (std::find(kGames.begin(), kGames.end(), cfg.game) == kGames.end()) {
        v.push_back("game: unknown game '" + cfg.game + "'");
      }
      if (!(cfg.params.q >= 0 && cfg.params.q <= 0.25)) v.push_back("q must lie in [0, 1/4]");
      if (!(cfg.params.gamma > 0 && cfg.params.gamma < 1)) v.push_back("gamma must lie in (0, 1)");
      if (!(cfg.params.alpha >= 0 && cfg.params.alpha < 1)) v.push_back("alpha must lie in [0, 1)");
      break;
    case Subcommand::kExtract:
      if (cfg.p != 2 && cfg.p != 3) {
        v.push_back("p must be 2 or 3");
      } else if (cfg.l < 1 || cfg.l > (cfg.p == 2 ? 5 : 3)) {
        v.push_back("l outside the supported range for p = " + std::to_string(cfg.p));
      }
      break;
  }
  if (cfg.subcommand == Subcommand::kAttack) {
    bool known = false;
    for (auto lookup : {+[](const std::string& n) { find_adversary(n); },
                        +[](const std::string& n) { find_distinguisher(n); },
                        +[](const std::string& n) { find_cloning_distinguisher(n); }}) {
      try {
        lookup(cfg.attack);
        known = true;
        break;
      } catch (const ParameterError&) {
      }
    }
    if (!known) v.push_back("attack: unknown attack '" + cfg.attack + "'");
    try {
      const int scheduled = find_adversary(cfg.attack)()->leak_bits();
      const int budget = LeakageBudget::from_rate(cfg.params.nu, cfg.params.l()).max_bits();
      if (scheduled > budget) {
        v.push_back("attack: schedules " + std::to_string(scheduled) + " leak bits but the budget is " +
                    std::to_string(budget));
      }
    } catch (const std::invalid_argument&) {
      // not a cloning attack, or parameters already reported
    }
  }
  return v;
}

std::string setting_text(const ExperimentConfig& cfg, const std::string& key) {
  const ProtocolParams& p = cfg.params;
  if (key == "subcommand") return to_string(cfg.subcommand);
  if (key == "mode") return to_string(cfg.mode);
  if (key == "variant") return to_string(p.variant);
  if (key == "format") return to_string(cfg.format);
  if (key == "lambda") return std::to_string(p.lambda);
  if (key == "gamma") return format_double(p.gamma);
  if (key == "alpha") return format_double(p.alpha);
  if (key == "q") return format_double(p.q);
  if (key == "xi") return format_double(p.xi);
  if (key == "delta") return format_double(p.delta);
  if (key == "kappa") return format_double(p.kappa);
  if (key == "nu") return format_double(p.nu);
  if (key == "ec_seed") return std::to_string(p.ec_seed);
  if (key == "t_max") return std::to_string(p.t_max);
  if (key == "trials") return std::to_string(cfg.trials);
  if (key == "seed") return std::to_string(cfg.seed);
  if (key == "attack") return cfg.attack;
  if (key == "game") return cfg.game;
  if (key == "p") return std::to_string(cfg.p);
  if (key == "l") return std::to_string(cfg.l);
  if (key == "out") return cfg.out;
  if (key == "threads") return std::to_string(cfg.threads);
  throw ParameterError("unknown key '" + key + "'");
}

std::string config_to_text(const ExperimentConfig& cfg) {
  std::string out;
  for (const auto& k : config_keys()) out += k + " = " + setting_text(cfg, k) + "\n";
  return out;
}

nlohmann::ordered_json config_echo(const ExperimentConfig& cfg) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& k : config_keys()) j[k] = setting_text(cfg, k);
  return j;
}

ExperimentConfig config_from_echo(const nlohmann::ordered_json& echo) {
  ExperimentConfig cfg;
  std::vector<std::string> violations;
  if (!echo.is_object()) throw ConfigError({"config echo must be an object"});
  for (const auto& [k, v] : echo.items()) {
    if (!v.is_string()) {
      violations.push_back(k + ": expected a string value");
      continue;
    }
    apply_setting(cfg, k, v.get<std::string>(), violations);
  }
  for (auto& s : validate_config(cfg)) violations.push_back(s);
  if (!violations.empty()) throw ConfigError(std::move(violations));
  return cfg;
}

}  // namespace divkecm
