#ifndef DIVKECM_REPORT_H
#define DIVKECM_REPORT_H

// Report rows and their CSV / JSON serializations.

#include <optional>
#include <string>
#include <vector>

#include "divkecm/config.h"

namespace divkecm {

/// exact: computed without sampling. monte_carlo: an estimate, always with a
/// 95% interval. formula_echo: a bound expression evaluated, not measured.
enum class MetricKind { kExact, kMonteCarlo, kFormulaEcho };

std::string to_string(MetricKind k);

struct Metric {
  std::string experiment;
  std::string metric;
  double value = 0.0;
  MetricKind kind = MetricKind::kExact;
  std::optional<double> ci95;
};

Metric exact_metric(std::string experiment, std::string metric, double value);
Metric formula_metric(std::string experiment, std::string metric, double value);
Metric mc_metric(std::string experiment, std::string metric, double value, double ci95);

struct Report {
  ExperimentConfig config;
  std::vector<Metric> metrics;
  std::vector<std::string> strict_violations;
};

inline constexpr int kReportSchemaVersion = 1;

/// Shortest text that reads back to the same double.
std::string format_value(double v);

/// Header plus one line per metric. Throws StructuralError when a Monte Carlo
/// metric lacks its interval or an exact one carries one.
std::string emit_csv(const Report& r);
std::string emit_json(const Report& r);
std::string emit_report(const Report& r, Format f);

/// Writes to a temporary sibling and renames it into place. Throws
/// std::runtime_error when the path is not writable.
void write_file_atomically(const std::string& path, const std::string& bytes);

}  // namespace divkecm

#endif  // DIVKECM_REPORT_H
