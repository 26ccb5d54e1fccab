#include "fvns/cli.hpp"

#include "fvns/cases.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace fvns {

namespace {

constexpr const char* kSummaryHeader = "steps,final_time,initial_mass,mass_drift,min_rho,wall_seconds";

struct Prepared {
  BenchmarkCase benchmark;
  Grid grid;
  double final_time;
  FluxParamsd params;
};

Prepared prepare(const RunConfig& config) {
  validate(config);
  BenchmarkCase benchmark = make_case(config.case_name, config.model);
  const int d = config.dim.value_or(benchmark.dim);
  Grid grid(d, config.cells_per_axis(d));
  FluxParamsd params;
  params.epsilon = config.epsilon;
  params.h = grid.h();
  const double final_time = config.final_time.value_or(benchmark.final_time);
  return {std::move(benchmark), std::move(grid), final_time, params};
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write '" + path.string() + "'");
  return os;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

int report_error(std::ostream& err, const std::string& kind, const std::string& message) {
  err << "error: " << kind << ": " << message << "\n";
  return kind == "config" ? 2 : 1;
}

}  // namespace

RunSummary execute_run(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const Prepared p = prepare(config);
  const State initial = initial_state(p.grid, p.benchmark);

  const std::filesystem::path dir(config.output_dir);
  std::filesystem::create_directories(dir);

  Index stride = config.snapshot_stride;
  if (stride == 0) {
    const double dt0 = compute_dt(p.grid, initial, config.model, config.solver);
    const auto estimated = static_cast<Index>(std::ceil(p.final_time / dt0));
    stride = std::max<Index>(1, estimated / 10);
  }

  std::ofstream diagnostics = open_output(dir / "diagnostics.csv");
  write_diagnostics_header(diagnostics);

  RunSummary summary;
  summary.min_rho = initial.rho.minCoeff();
  Index last_snapshot = -1;
  auto snapshot = [&](const State& s, Index step) {
    write_snapshot((dir / ("snapshot_" + std::to_string(step) + ".csv")).string(), p.grid, s.rho, s.u);
    last_snapshot = step;
  };

  const RunResult result = run(p.grid, initial, p.final_time, config.model, p.benchmark.forcing, config.solver,
                               p.params, [&](const State& s, const StepReport& r) {
                                 write_diagnostics_row(diagnostics, r);
                                 summary.min_rho = std::min(summary.min_rho, r.min_rho);
                                 if (r.step % stride == 0) snapshot(s, r.step);
                               });
  const Index steps = result.reports.back().step;
  if (last_snapshot != steps) snapshot(result.final_state, steps);

  summary.steps = steps;
  summary.final_time = result.final_state.time;
  summary.initial_mass = result.reports.front().mass;
  summary.mass_drift = std::abs(result.reports.back().mass - summary.initial_mass) / summary.initial_mass;
  summary.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::ofstream summary_os = open_output(dir / "summary.csv");
  write_summary_csv(summary_os, summary);
  return summary;
}

void write_summary_csv(std::ostream& os, const RunSummary& s) {
  os << kSummaryHeader << "\n"
     << s.steps << "," << format_real(s.final_time) << "," << format_real(s.initial_mass) << ","
     << format_real(s.mass_drift) << "," << format_real(s.min_rho) << "," << format_real(s.wall_seconds) << "\n";
}

RunSummary read_summary_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kSummaryHeader) throw std::runtime_error("summary csv: bad header");
  if (!std::getline(is, line)) throw std::runtime_error("summary csv: missing row");
  const auto p = split_csv(line);
  if (p.size() != 6) throw std::runtime_error("summary csv: bad row '" + line + "'");
  RunSummary s;
  s.steps = std::stoll(p[0]);
  s.final_time = std::stod(p[1]);
  s.initial_mass = std::stod(p[2]);
  s.mass_drift = std::stod(p[3]);
  s.min_rho = std::stod(p[4]);
  s.wall_seconds = std::stod(p[5]);
  return s;
}

std::vector<std::string> level_violations(const std::vector<Index>& levels) {
  std::vector<std::string> out;
  if (levels.empty()) out.push_back("levels: at least one level is required");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const Index n = levels[i];
    if (n < 2 || (n & (n - 1)) != 0) out.push_back("levels: " + std::to_string(n) + " is not a power of two >= 2");
    if (i > 0 && n <= levels[i - 1]) out.push_back("levels: must be strictly increasing");
  }
  return out;
}

std::vector<ErrorReport> convergence_study(const RunConfig& base, const std::vector<Index>& levels,
                                           Reference reference) {
  if (auto v = level_violations(levels); !v.empty()) throw ConfigError(std::move(v));
  if (reference == Reference::finest && levels.size() < 2) {
    throw ConfigError({"levels: the finest-level reference needs at least two levels"});
  }

  auto at_level = [&](Index n) {
    RunConfig c = base;
    c.cells = {n};
    return prepare(c);
  };

  std::vector<ErrorReport> reports;
  if (reference == Reference::exact) {
    for (Index n : levels) {
      const Prepared p = at_level(n);
      if (!p.benchmark.exact) throw ConfigError({"case '" + p.benchmark.name + "' has no exact solution"});
      ExactErrorObserver observer(p.grid, *p.benchmark.exact, base.model.gamma);
      run(p.grid, initial_state(p.grid, p.benchmark), p.final_time, base.model, p.benchmark.forcing, base.solver,
          p.params, std::ref(observer));
      reports.push_back(observer.report());
    }
    return reports;
  }

  std::vector<RunHistory> histories;
  histories.reserve(levels.size() - 1);
  for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
    const Prepared p = at_level(levels[i]);
    RunHistory& h = histories.emplace_back(p.grid);
    run(p.grid, initial_state(p.grid, p.benchmark), p.final_time, base.model, p.benchmark.forcing, base.solver,
        p.params, [&h](const State& s, const StepReport&) { h.levels.push_back(s); });
  }
  const Prepared ref = at_level(levels.back());
  std::vector<const RunHistory*> coarse;
  for (const auto& h : histories) coarse.push_back(&h);
  ReferenceComparison comparison(ref.grid, coarse, base.model.gamma);
  run(ref.grid, initial_state(ref.grid, ref.benchmark), ref.final_time, base.model, ref.benchmark.forcing,
      base.solver, ref.params, std::ref(comparison));
  return comparison.reports();
}

int cmd_run(const std::string& config_path, const std::vector<std::string>& overrides,
            const std::optional<std::string>& output_dir, std::ostream& out, std::ostream& err) {
  try {
    RunConfig config = load_config(config_path);
    for (const auto& o : overrides) apply_override(config, o);
    if (output_dir) config.output_dir = *output_dir;
    validate(config);
    for (const auto& w : config.warnings()) err << "warning: " << w << "\n";
    const RunSummary s = execute_run(config);
    out << "steps " << s.steps << ", T " << format_real(s.final_time) << ", mass drift " << s.mass_drift
        << ", min rho " << s.min_rho << ", wall " << s.wall_seconds << " s\n";
    return 0;
  } catch (const ConfigError& e) {
    return report_error(err, "config", e.what());
  } catch (const StepFailure& e) {
    return report_error(err, "step_failure", e.what());
  } catch (const std::exception& e) {
    return report_error(err, "runtime", e.what());
  }
}

int cmd_eoc(const std::string& case_name, const std::vector<Index>& levels, const std::optional<std::string>& reference,
            const std::string& config_path, const std::vector<std::string>& overrides,
            const std::optional<std::string>& output_dir, std::ostream& out, std::ostream& err) {
  try {
    RunConfig config = load_config(config_path);
    for (const auto& o : overrides) apply_override(config, o);
    config.case_name = case_name;
    if (output_dir) config.output_dir = *output_dir;
    validate(config);
    for (const auto& w : config.warnings()) err << "warning: " << w << "\n";

    Reference mode = make_case(case_name, config.model).exact ? Reference::exact : Reference::finest;
    if (reference) {
      if (*reference == "exact") {
        mode = Reference::exact;
      } else if (*reference == "finest") {
        mode = Reference::finest;
      } else {
        throw ConfigError({"--reference must be 'exact' or 'finest', got '" + *reference + "'"});
      }
    }

    const auto rows = eoc_table(convergence_study(config, levels, mode));
    const std::filesystem::path dir(config.output_dir);
    std::filesystem::create_directories(dir);
    std::ofstream os = open_output(dir / "eoc.csv");
    write_eoc_csv(os, rows);
    write_eoc_csv(out, rows);
    return 0;
  } catch (const ConfigError& e) {
    return report_error(err, "config", e.what());
  } catch (const StepFailure& e) {
    return report_error(err, "step_failure", e.what());
  } catch (const std::exception& e) {
    return report_error(err, "runtime", e.what());
  }
}

}  // namespace fvns
