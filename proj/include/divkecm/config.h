#ifndef DIVKECM_CONFIG_H
#define DIVKECM_CONFIG_H

// Experiment configuration: a flat `key = value` text format, overridable
// by command-line flags.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "divkecm/vkecm.h"

namespace divkecm {

enum class Subcommand { kPipeline, kAttack, kGameValue, kExtract, kBounds };
enum class Format { kCsv, kJson };

std::string to_string(Subcommand s);
std::string to_string(Format f);

struct ExperimentConfig {
  Subcommand subcommand = Subcommand::kPipeline;
  ProtocolParams params;
  Mode mode = Mode::kDemo;
  long trials = 1000;
  std::uint64_t seed = 1;
  std::string attack = "classical_record";
  std::string game = "all";
  int p = 2;  // extract: field size
  int l = 2;  // extract: seed length
  std::string out;  // empty = stdout
  Format format = Format::kCsv;
  int threads = 0;
};

/// Carries every violation found, not just the first.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

/// Keys accepted by `apply_setting`, in echo order.
const std::vector<std::string>& config_keys();

/// Sets one key from its text form. Problems are appended to `violations`.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value,
                   std::vector<std::string>& violations);

/// Parses `key = value` lines onto `cfg`. Blank lines and '#' comments are
/// skipped.
void apply_config_text(ExperimentConfig& cfg, const std::string& text, std::vector<std::string>& violations);

/// Everything wrong with a complete config, parameter checks included.
std::vector<std::string> validate_config(const ExperimentConfig& cfg);

/// Text form of one key's current value (round-trips through apply_setting).
std::string setting_text(const ExperimentConfig& cfg, const std::string& key);

/// Canonical `key = value` text for every key.
std::string config_to_text(const ExperimentConfig& cfg);

/// Object of key -> text value, in `config_keys` order.
nlohmann::ordered_json config_echo(const ExperimentConfig& cfg);
/// Rebuilds a config from an echo; throws ConfigError.
ExperimentConfig config_from_echo(const nlohmann::ordered_json& echo);

}  // namespace divkecm

#endif  // DIVKECM_CONFIG_H
