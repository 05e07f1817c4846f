#ifndef DIVKECM_RUNNER_H
#define DIVKECM_RUNNER_H

#include <iosfwd>

#include "divkecm/report.h"

namespace divkecm {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

/// Runs one configured experiment. Throws ConfigError before doing any work
/// when the config does not validate.
Report run_experiment(const ExperimentConfig& cfg);

/// Full command line: parse, run, write. Returns the process exit status.
/// The report goes to `--out` (atomically) or to `out`; diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace divkecm

#endif  // DIVKECM_RUNNER_H
