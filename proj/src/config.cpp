#include "fvns/config.hpp"

#include "fvns/cases.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace fvns {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : sep) + p;
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  const std::string v = trim(text);
  T value{};
  const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), value);
  if (v.empty() || ec != std::errc{} || end != v.data() + v.size()) {
    throw ConfigError({key + ": cannot parse '" + v + "' as a number"});
  }
  return value;
}

std::vector<Index> parse_cells(const std::string& key, const std::string& text) {
  std::vector<Index> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number<Index>(key, item));
  if (out.empty()) throw ConfigError({key + ": expected at least one cell count"});
  return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::invalid_argument("invalid configuration: " + join(problems, "; ")), problems_(std::move(problems)) {}

std::vector<Index> RunConfig::cells_per_axis(int d) const {
  if (cells.size() == 1) return std::vector<Index>(static_cast<std::size_t>(d), cells.front());
  return cells;
}

std::vector<std::string> RunConfig::violations() const {
  std::vector<std::string> out;
  std::optional<BenchmarkCase> benchmark;
  try {
    benchmark = make_case(case_name, model);
  } catch (const std::invalid_argument& e) {
    out.emplace_back(std::string("case.name: ") + e.what());
  }

  const int d = dim.value_or(benchmark ? benchmark->dim : 2);
  if (d < 1 || d > 3) out.push_back("grid.dim must be 1, 2 or 3");
  if (benchmark && d != benchmark->dim) {
    out.push_back("grid.dim = " + std::to_string(d) + " but case '" + case_name + "' is " +
                  std::to_string(benchmark->dim) + "-dimensional");
  }
  if (cells.size() != 1 && static_cast<int>(cells.size()) != d) {
    out.push_back("grid.cells must list one count or one per axis");
  }
  const bool cells_ok = std::all_of(cells.begin(), cells.end(), [](Index n) { return n >= 2; });
  if (!cells_ok) out.push_back("grid.cells must be >= 2 on every axis");
  if (final_time && !(*final_time > 0)) out.push_back("case.final_time must be > 0");
  if (snapshot_stride < 0) out.push_back("output.snapshot_stride must be >= 0");
  if (output_dir.empty()) out.push_back("output.dir must not be empty");

  for (auto& v : model.violations()) out.push_back(std::move(v));
  FluxParamsd params;
  params.epsilon = epsilon;
  params.h = cells_ok && !cells.empty() ? 1.0 / static_cast<double>(*std::min_element(cells.begin(), cells.end()))
                                        : 0.5;
  for (auto& v : params.violations(model.gamma)) out.push_back(std::move(v));
  for (auto& v : solver.violations()) out.push_back(std::move(v));
  return out;
}

std::vector<std::string> RunConfig::warnings() const {
  std::vector<std::string> out;
  if (!model.in_convergence_range()) {
    std::ostringstream msg;
    msg << "model.gamma = " << model.gamma << " lies outside (1, 2); convergence is not guaranteed";
    out.push_back(msg.str());
  }
  return out;
}

void apply_setting(RunConfig& c, const std::string& raw_key, const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string value = trim(raw_value);
  if (key == "case.name") {
    c.case_name = value;
  } else if (key == "case.final_time") {
    c.final_time = parse_number<double>(key, value);
  } else if (key == "grid.dim") {
    c.dim = parse_number<int>(key, value);
  } else if (key == "grid.cells") {
    c.cells = parse_cells(key, value);
  } else if (key == "model.a") {
    c.model.a = parse_number<double>(key, value);
  } else if (key == "model.gamma") {
    c.model.gamma = parse_number<double>(key, value);
  } else if (key == "model.mu") {
    c.model.mu = parse_number<double>(key, value);
  } else if (key == "model.lambda") {
    c.model.lambda = parse_number<double>(key, value);
  } else if (key == "flux.epsilon") {
    c.epsilon = parse_number<double>(key, value);
  } else if (key == "solver.cfl") {
    c.solver.cfl = parse_number<double>(key, value);
  } else if (key == "solver.dt_cap") {
    if (value.empty() || value == "none") {
      c.solver.dt_cap.reset();
    } else {
      c.solver.dt_cap = parse_number<double>(key, value);
    }
  } else if (key == "solver.picard_tol") {
    c.solver.picard_tol = parse_number<double>(key, value);
  } else if (key == "solver.picard_max_iter") {
    c.solver.picard_max_iter = parse_number<int>(key, value);
  } else if (key == "solver.linear_tol") {
    c.solver.linear_tol = parse_number<double>(key, value);
  } else if (key == "solver.linear_max_iter") {
    c.solver.linear_max_iter = parse_number<int>(key, value);
  } else if (key == "solver.max_retries") {
    c.solver.max_retries = parse_number<int>(key, value);
  } else if (key == "output.dir") {
    c.output_dir = value;
  } else if (key == "output.snapshot_stride") {
    c.snapshot_stride = parse_number<Index>(key, value);
  } else {
    throw ConfigError({"unknown key '" + key + "'"});
  }
}

void apply_override(RunConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError({"override '" + assignment + "' is not of the form key=value"});
  apply_setting(config, assignment.substr(0, eq), assignment.substr(eq + 1));
}

RunConfig parse_config(std::istream& is, const std::string& source) {
  RunConfig config;
  std::vector<std::string> problems;
  std::string section;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') {
        problems.push_back(where + "unterminated section header");
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      problems.push_back(where + "expected key = value");
      continue;
    }
    std::string key = trim(line.substr(0, eq));
    if (!section.empty()) key = section + "." + key;
    try {
      apply_setting(config, key, line.substr(eq + 1));
    } catch (const ConfigError& e) {
      for (const auto& p : e.problems()) problems.push_back(where + p);
    }
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file '" + path + "'"});
  return parse_config(in, path);
}

void write_config(std::ostream& os, const RunConfig& c) {
  auto cells = std::string{};
  for (Index n : c.cells) cells += (cells.empty() ? "" : ",") + std::to_string(n);
  os << "[case]\nname = " << c.case_name << "\n";
  if (c.final_time) os << "final_time = " << format_real(*c.final_time) << "\n";
  os << "\n[grid]\n";
  if (c.dim) os << "dim = " << *c.dim << "\n";
  os << "cells = " << cells << "\n";
  os << "\n[model]\na = " << format_real(c.model.a) << "\ngamma = " << format_real(c.model.gamma)
     << "\nmu = " << format_real(c.model.mu) << "\nlambda = " << format_real(c.model.lambda) << "\n";
  os << "\n[flux]\nepsilon = " << format_real(c.epsilon) << "\n";
  os << "\n[solver]\ncfl = " << format_real(c.solver.cfl) << "\n";
  if (c.solver.dt_cap) os << "dt_cap = " << format_real(*c.solver.dt_cap) << "\n";
  os << "picard_tol = " << format_real(c.solver.picard_tol) << "\npicard_max_iter = " << c.solver.picard_max_iter
     << "\nlinear_tol = " << format_real(c.solver.linear_tol) << "\nlinear_max_iter = " << c.solver.linear_max_iter
     << "\nmax_retries = " << c.solver.max_retries << "\n";
  os << "\n[output]\ndir = " << c.output_dir << "\nsnapshot_stride = " << c.snapshot_stride << "\n";
}

void validate(const RunConfig& config) {
  auto problems = config.violations();
  if (!problems.empty()) throw ConfigError(std::move(problems));
}

}  // namespace fvns
