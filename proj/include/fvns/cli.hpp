#ifndef FVNS_CLI_HPP
#define FVNS_CLI_HPP

#include "fvns/config.hpp"
#include "fvns/diagnostics.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fvns {

struct RunSummary {
  Index steps = 0;
  double final_time = 0.0;
  double initial_mass = 0.0;
  /// |M(T) - M(0)| / M(0)
  double mass_drift = 0.0;
  /// Minimum density over all levels.
  double min_rho = 0.0;
  double wall_seconds = 0.0;
};

/// Runs the configured case and writes diagnostics.csv, snapshot_<step>.csv
/// and summary.csv into config.output_dir. Throws ConfigError or
/// StepFailure.
RunSummary execute_run(const RunConfig& config);

void write_summary_csv(std::ostream& os, const RunSummary& summary);
RunSummary read_summary_csv(std::istream& is);

enum class Reference { exact, finest };

/// Errors of the case at each level. In finest mode the last level is the
/// reference run and produces no row.
std::vector<ErrorReport> convergence_study(const RunConfig& base, const std::vector<Index>& levels,
                                           Reference reference);

/// Levels must be strictly increasing powers of two.
std::vector<std::string> level_violations(const std::vector<Index>& levels);

/// Subcommand bodies; return the process exit status. Failures print one
/// `error: <kind>: <message>` line to err.
int cmd_run(const std::string& config_path, const std::vector<std::string>& overrides,
            const std::optional<std::string>& output_dir, std::ostream& out, std::ostream& err);
int cmd_eoc(const std::string& case_name, const std::vector<Index>& levels, const std::optional<std::string>& reference,
            const std::string& config_path, const std::vector<std::string>& overrides,
            const std::optional<std::string>& output_dir, std::ostream& out, std::ostream& err);

}  // namespace fvns

#endif  // FVNS_CLI_HPP
