#ifndef FVNS_CONFIG_HPP
#define FVNS_CONFIG_HPP

#include "fvns/flux.hpp"
#include "fvns/model.hpp"
#include "fvns/solver.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fvns {

/// Settings of one run. Text form: `key = value` lines with dotted keys;
/// a `[section]` header prefixes the keys that follow it. `#` starts a
/// comment.
///
///   case.name            manufactured | gresho (aliases experiment1/2)
///   case.final_time      T; defaults to the case's own final time
///   grid.dim             1, 2 or 3; defaults to the case dimension
///   grid.cells           one count for every axis or a comma list
///   model.a, model.gamma, model.mu, model.lambda
///   flux.epsilon
///   solver.cfl, solver.dt_cap, solver.picard_tol, solver.picard_max_iter,
///   solver.linear_tol, solver.linear_max_iter, solver.max_retries
///   output.dir           directory for CSV output
///   output.snapshot_stride  steps between snapshots; 0 picks ~10 per run
struct RunConfig {
  std::string case_name = "gresho";
  std::optional<double> final_time;
  std::optional<int> dim;
  std::vector<Index> cells{32};
  GasModeld model;
  double epsilon = 0.6;
  SolverConfig solver;
  std::string output_dir = "output";
  Index snapshot_stride = 0;

  /// Cell counts expanded to one entry per axis of a dim-dimensional grid.
  std::vector<Index> cells_per_axis(int d) const;

  /// Every violated invariant; empty when the configuration can run.
  std::vector<std::string> violations() const;
  /// Advisory notes that do not block a run.
  std::vector<std::string> warnings() const;
};

class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// Applies one `key=value` assignment. Throws ConfigError on unknown keys
/// or malformed values.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

/// Splits "key=value" and applies it.
void apply_override(RunConfig& config, const std::string& assignment);

RunConfig parse_config(std::istream& is, const std::string& source = "<stream>");
RunConfig load_config(const std::string& path);

/// Writes every key in canonical form; parse_config reads it back.
void write_config(std::ostream& os, const RunConfig& config);

/// Throws ConfigError listing all violations.
void validate(const RunConfig& config);

}  // namespace fvns

#endif  // FVNS_CONFIG_HPP
