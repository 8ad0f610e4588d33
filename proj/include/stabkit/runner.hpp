#pragma once

#include <optional>
#include <string>

#include "stabkit/config.hpp"

namespace stabkit {

// Process exit classes shared by the CLI and the pipeline runners.
enum ExitCode : int {
  kExitOk = 0,
  kExitObstruction = 1,  // synthesis obstruction or incomplete table
  kExitUsage = 2,        // config or usage error
  kExitNumeric = 3,      // solver / integrator failure
};

// Each runner writes its artifacts and returns the exit class. Numeric
// failures are reported on stderr and map to kExitNumeric.

// Linearization, unstable spectrum, PBH verdict, row-rank verdict, openness
// probe. Findings are data: returns kExitOk whenever the analysis completes.
int run_analyze(const RunConfig& cfg, const std::string& report_path);

int run_section(const RunConfig& cfg, const std::string& csv_path,
                const std::string& report_path);

int run_synthesize(const RunConfig& cfg, const std::string& csv_path,
                   const std::string& report_path);

int run_simulate(const RunConfig& cfg, const Vector& x0, std::optional<double> t_final,
                 const std::string& csv_path);

}  // namespace stabkit
