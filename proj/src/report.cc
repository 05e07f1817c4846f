#include "divkecm/report.h"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "divkecm/rng.h"

namespace divkecm {

std::string to_string(MetricKind k) {
  switch (k) {
    case MetricKind::kExact:
      return "exact";
    case MetricKind::kMonteCarlo:
      return "monte_carlo";
    case MetricKind::kFormulaEcho:
      return "formula_echo";
  }
  return "?";
}

Metric exact_metric(std::string experiment, std::string metric, double value) {
  return {std::move(experiment), std::move(metric), value, MetricKind::kExact, std::nullopt};
}

Metric formula_metric(std::string experiment, std::string metric, double value) {
  return {std::move(experiment), std::move(metric), value, MetricKind::kFormulaEcho, std::nullopt};
}

Metric mc_metric(std::string experiment, std::string metric, double value, double ci95) {
  return {std::move(experiment), std::move(metric), value, MetricKind::kMonteCarlo, ci95};
}

std::string format_value(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

void check_metric(const Metric& m) {
  const bool mc = m.kind == MetricKind::kMonteCarlo;
  if (mc != m.ci95.has_value()) {
    throw StructuralError("metric " + m.experiment + "/" + m.metric +
                          (mc ? ": Monte Carlo value without interval" : ": interval on a non-sampled value"));
  }
}

// Short hex digest of the canonical config text, so two reports can be
// matched to the run that produced them.
std::string config_digest(const ExperimentConfig& cfg) {
  std::uint64_t h = 0x6a09e667f3bcc908ULL;
  for (unsigned char ch : config_to_text(cfg)) h = mix64(h ^ ch);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

std::string emit_csv(const Report& r) {
  std::string out = "experiment,metric,value,kind,ci95\n";
  for (const auto& m : r.metrics) {
    check_metric(m);
    out += m.experiment + "," + m.metric + "," + format_value(m.value) + "," + to_string(m.kind) + "," +
           (m.ci95 ? format_value(*m.ci95) : "") + "\n";
  }
  return out;
}

std::string emit_json(const Report& r) {
  nlohmann::ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["config"] = config_echo(r.config);
  char seed_hex[17];
  std::snprintf(seed_hex, sizeof seed_hex, "%016llx", static_cast<unsigned long long>(r.config.seed));
  j["provenance"] = {{"seed", r.config.seed},
                     {"seed_hex", seed_hex},
                     {"config_digest", config_digest(r.config)},
                     {"trial_streams", "seed/trial/<index>"}};
  j["strict_valid"] = r.strict_violations.empty();
  j["strict_violations"] = r.strict_violations;
  nlohmann::ordered_json metrics = nlohmann::ordered_json::array();
  for (const auto& m : r.metrics) {
    check_metric(m);
    nlohmann::ordered_json e;
    e["experiment"] = m.experiment;
    e["metric"] = m.metric;
    e["value"] = m.value;
    e["kind"] = to_string(m.kind);
    e["ci95"] = m.ci95 ? nlohmann::ordered_json(*m.ci95) : nlohmann::ordered_json(nullptr);
    metrics.push_back(std::move(e));
  }
  j["metrics"] = std::move(metrics);
  return j.dump(2) + "\n";
}

std::string emit_report(const Report& r, Format f) { return f == Format::kCsv ? emit_csv(r) : emit_json(r); }

void write_file_atomically(const std::string& path, const std::string& bytes) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + path);
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    f.close();
    if (!f) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::runtime_error("cannot write " + path);
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw std::runtime_error("cannot move report into place at " + path);
  }
}

}  // namespace divkecm
