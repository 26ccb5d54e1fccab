#include "fvns/diagnostics.hpp"

#include "fvns/operators.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace fvns {

double total_mass(const Grid& grid, const ScalarFieldd& rho) { return integrate_cells(grid, rho); }

double total_energy(const Grid& grid, const State& state, const GasModeld& model) {
  double sum = 0.0;
  for (Index k = 0; k < grid.cell_count(); ++k) {
    sum += 0.5 * state.rho(k) * state.u.row(k).squaredNorm() + model.pressure_potential(state.rho(k));
  }
  return grid.cell_volume() * sum;
}

Eigen::MatrixXd velocity_edge_gradient(const Grid& grid, const VectorFieldd& u) {
  const int d = grid.dim();
  Eigen::MatrixXd grad(grid.cell_count(), d * d);
  for (int j = 0; j < d; ++j) {
    const DualFieldd g = grad_edge(grid, u.col(j));
    for (int i = 0; i < d; ++i) grad.col(j * d + i) = g.col(i);
  }
  return grad;
}

double edge_gradient_norm_sq(const Grid& grid, const VectorFieldd& u) {
  return grid.dual_volume() * velocity_edge_gradient(grid, u).squaredNorm();
}

double lgamma_norm(const Grid& grid, const ScalarFieldd& rho, double gamma) {
  return std::pow(grid.cell_volume() * rho.array().abs().pow(gamma).sum(), 1.0 / gamma);
}

double eps_jump_dissipation(const Grid& grid, const State& state, const FluxParamsd& params) {
  double jump_sum = 0.0;
  for (int i = 0; i < grid.dim(); ++i) {
    const FaceFieldd rho_avg = face_average(grid, state.rho, i);
    double axis_sum = 0.0;
    for (int j = 0; j < grid.dim(); ++j) {
      axis_sum += rho_avg.dot(face_jump(grid, state.u.col(j), i).cwiseAbs2());
    }
    jump_sum += grid.face_area(i) * axis_sum;
  }
  return params.diffusion() * jump_sum;
}

EnergyBudget energy_budget(const Grid& grid, const State& prev, const State& next, double dt, const GasModeld& model,
                           const FluxParamsd& params, const Forcing& forcing) {
  EnergyBudget b;
  b.previous_energy = total_energy(grid, prev, model);
  b.total_energy = total_energy(grid, next, model);

  b.eps_dissipation = eps_jump_dissipation(grid, next, params);
  b.viscous_grad = model.mu * edge_gradient_norm_sq(grid, next.u);
  b.viscous_div = (model.mu + model.lambda) * integrate_cells(grid, div_h(grid, next.u).cwiseAbs2());

  if (!forcing.is_zero()) {
    double power = 0.0;
    for (Index k = 0; k < grid.cell_count(); ++k) {
      const Point f = forcing(next.time, grid.cell_center({k}));
      for (int j = 0; j < grid.dim(); ++j) power += f[j] * next.u(k, j);
    }
    b.forcing_power = grid.cell_volume() * power;
  }
  b.balance_slack =
      (b.total_energy - b.previous_energy) / dt + b.eps_dissipation + b.viscous_grad + b.viscous_div - b.forcing_power;
  return b;
}

ErrorAccumulator::ErrorAccumulator(const Grid& grid, double gamma) : grid_(&grid), gamma_(gamma) {}

void ErrorAccumulator::add_interval(double weight, const ScalarFieldd& rho, const VectorFieldd& u,
                                    const Eigen::MatrixXd& grad_u, const ScalarFieldd& rho_ref,
                                    const VectorFieldd& u_ref, const Eigen::MatrixXd& grad_u_ref) {
  const double vol = grid_->cell_volume();
  grad_err_ += weight * grid_->dual_volume() * (grad_u - grad_u_ref).squaredNorm();
  grad_ref_ += weight * grid_->dual_volume() * grad_u_ref.squaredNorm();
  u_err_ += weight * vol * (u - u_ref).squaredNorm();
  u_ref_ += weight * vol * u_ref.squaredNorm();
  rho_l1_err_ += weight * vol * (rho - rho_ref).cwiseAbs().sum();
  rho_l1_ref_ += weight * vol * rho_ref.cwiseAbs().sum();
  rho_lg_err_ = std::max(rho_lg_err_, lgamma_norm(*grid_, rho - rho_ref, gamma_));
  rho_lg_ref_ = std::max(rho_lg_ref_, lgamma_norm(*grid_, rho_ref, gamma_));
  ++intervals_;
}

ErrorReport ErrorAccumulator::report() const {
  auto ratio = [](double num, double den, const char* what) {
    if (!(den > 0)) throw std::domain_error(std::string("error_norms: reference norm of ") + what + " vanishes");
    return num / den;
  };
  ErrorReport r;
  r.h = grid_->h();
  r.grad_u = std::sqrt(ratio(grad_err_, grad_ref_, "grad u"));
  r.u = std::sqrt(ratio(u_err_, u_ref_, "u"));
  r.rho_l1 = ratio(rho_l1_err_, rho_l1_ref_, "rho (L1)");
  r.rho_linf_lgamma = ratio(rho_lg_err_, rho_lg_ref_, "rho (Lgamma)");
  return r;
}

Eigen::MatrixXd sample_exact_gradient(const Grid& grid, const ExactSolution& exact, double t) {
  const int d = grid.dim();
  Eigen::MatrixXd grad(grid.cell_count(), d * d);
  for (int i = 0; i < d; ++i) {
    for (Index k = 0; k < grid.cell_count(); ++k) {
      const Eigen::Matrix3d g = exact.grad_u(t, grid.face_center({i, k}));
      for (int j = 0; j < d; ++j) grad(k, j * d + i) = g(j, i);
    }
  }
  return grad;
}

ExactErrorObserver::ExactErrorObserver(const Grid& grid, ExactSolution exact, double gamma, int refinement)
    : grid_(&grid), exact_(std::move(exact)), refinement_(refinement), acc_(grid, gamma) {}

void ExactErrorObserver::operator()(const State& state, const StepReport& report) {
  if (report.step == 0) return;
  const double t = state.time;
  const ScalarFieldd rho_ref = project_cell(*grid_, [&](const Point& x) { return exact_.rho(t, x); }, refinement_);
  const VectorFieldd u_ref = project_cell_vector(*grid_, [&](const Point& x) { return exact_.u(t, x); }, refinement_);
  acc_.add_interval(report.dt, state.rho, state.u, velocity_edge_gradient(*grid_, state.u), rho_ref, u_ref,
                    sample_exact_gradient(*grid_, exact_, t));
}

ErrorReport ExactErrorObserver::report() const { return acc_.report(); }

Eigen::MatrixXd restrict_to(const Grid& fine, const Grid& coarse, const Eigen::MatrixXd& values) {
  if (fine.dim() != coarse.dim()) throw std::invalid_argument("restrict_to: dimension mismatch");
  std::array<Index, 3> ratio{1, 1, 1};
  Index block = 1;
  for (int i = 0; i < fine.dim(); ++i) {
    if (fine.cells(i) % coarse.cells(i) != 0) {
      throw std::invalid_argument("restrict_to: grids are not nested (" + std::to_string(fine.cells(i)) + " vs " +
                                  std::to_string(coarse.cells(i)) + " cells on axis " + std::to_string(i) + ")");
    }
    ratio[i] = fine.cells(i) / coarse.cells(i);
    block *= ratio[i];
  }
  if (values.rows() != fine.cell_count()) throw std::invalid_argument("restrict_to: field size mismatch");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(coarse.cell_count(), values.cols());
  for (Index k = 0; k < fine.cell_count(); ++k) {
    auto idx = fine.multi_index({k});
    for (int i = 0; i < fine.dim(); ++i) idx[i] /= ratio[i];
    out.row(coarse.cell_at(idx).value) += values.row(k);
  }
  return out / static_cast<double>(block);
}

ReferenceComparison::ReferenceComparison(const Grid& reference_grid, std::vector<const RunHistory*> coarse,
                                         double gamma)
    : reference_grid_(&reference_grid), coarse_(std::move(coarse)), cursor_(coarse_.size(), 1) {
  acc_.reserve(coarse_.size());
  for (const auto* history : coarse_) {
    if (history->levels.empty()) throw std::invalid_argument("ReferenceComparison: empty coarse history");
    // fails early on non-nested grids
    restrict_to(reference_grid, history->grid, Eigen::MatrixXd::Zero(reference_grid.cell_count(), 1));
    acc_.emplace_back(history->grid, gamma);
  }
}

void ReferenceComparison::operator()(const State& state, const StepReport& report) {
  if (report.step == 0) {
    previous_time_ = state.time;
    return;
  }
  const double t0 = previous_time_;
  const double t1 = state.time;
  for (std::size_t c = 0; c < coarse_.size(); ++c) {
    const RunHistory& history = *coarse_[c];
    const Grid& grid = history.grid;
    const auto& levels = history.levels;
    std::size_t& k = cursor_[c];
    bool restricted = false;
    ScalarFieldd rho_ref;
    VectorFieldd u_ref;
    Eigen::MatrixXd grad_ref;
    // coarse level k lives on (levels[k-1].time, levels[k].time]
    while (k < levels.size()) {
      const double lo = std::max(t0, levels[k - 1].time);
      const double hi = std::min(t1, levels[k].time);
      if (hi > lo) {
        if (!restricted) {
          rho_ref = restrict_to(*reference_grid_, grid, state.rho);
          u_ref = restrict_to(*reference_grid_, grid, state.u);
          grad_ref = velocity_edge_gradient(grid, u_ref);
          restricted = true;
        }
        acc_[c].add_interval(hi - lo, levels[k].rho, levels[k].u, velocity_edge_gradient(grid, levels[k].u), rho_ref,
                             u_ref, grad_ref);
      }
      if (levels[k].time > t1) break;
      ++k;
    }
  }
  previous_time_ = t1;
}

std::vector<ErrorReport> ReferenceComparison::reports() const {
  std::vector<ErrorReport> out;
  for (const auto& acc : acc_) out.push_back(acc.report());
  return out;
}

double eoc(double e_coarse, double e_fine) {
  if (!(e_coarse > 0) || !(e_fine > 0)) throw std::domain_error("eoc: errors must be positive");
  return std::log2(e_coarse / e_fine);
}

std::vector<EocRow> eoc_table(const std::vector<ErrorReport>& reports) {
  std::vector<EocRow> rows;
  for (std::size_t n = 0; n < reports.size(); ++n) {
    EocRow row{reports[n], std::nullopt};
    if (n > 0) {
      const ErrorReport& c = reports[n - 1];
      const ErrorReport& f = reports[n];
      ErrorReport o;
      o.h = f.h;
      o.grad_u = eoc(c.grad_u, f.grad_u);
      o.u = eoc(c.u, f.u);
      o.rho_l1 = eoc(c.rho_l1, f.rho_l1);
      o.rho_linf_lgamma = eoc(c.rho_linf_lgamma, f.rho_linf_lgamma);
      row.orders = o;
    }
    rows.push_back(row);
  }
  return rows;
}

namespace {

constexpr const char* kEocHeader =
    "h,e_grad_u,eoc_grad_u,e_u,eoc_u,e_rho_l1,eoc_rho_l1,e_rho_linf_lgamma,eoc_rho_linf_lgamma";
constexpr const char* kDiagnosticsHeader = "step,t,dt,picard_iters,mass,energy,energy_slack,min_rho,max_u";

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    parts.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return parts;
}

double to_real(const std::string& text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw std::runtime_error("csv: bad number '" + text + "'");
  return v;
}

}  // namespace

void write_eoc_csv(std::ostream& os, const std::vector<EocRow>& rows) {
  os << kEocHeader << '\n';
  for (const auto& row : rows) {
    const ErrorReport& e = row.errors;
    auto order = [&](double ErrorReport::*field) { return row.orders ? format_real((*row.orders).*field) : ""; };
    os << format_real(e.h) << ',' << format_real(e.grad_u) << ',' << order(&ErrorReport::grad_u) << ','
       << format_real(e.u) << ',' << order(&ErrorReport::u) << ',' << format_real(e.rho_l1) << ','
       << order(&ErrorReport::rho_l1) << ',' << format_real(e.rho_linf_lgamma) << ','
       << order(&ErrorReport::rho_linf_lgamma) << '\n';
  }
}

std::vector<EocRow> read_eoc_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kEocHeader) throw std::runtime_error("eoc csv: unexpected header");
  std::vector<EocRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto p = split(line);
    if (p.size() != 9) throw std::runtime_error("eoc csv: bad row '" + line + "'");
    EocRow row;
    row.errors = {to_real(p[0]), to_real(p[1]), to_real(p[3]), to_real(p[5]), to_real(p[7])};
    if (!p[2].empty()) row.orders = ErrorReport{to_real(p[0]), to_real(p[2]), to_real(p[4]), to_real(p[6]), to_real(p[8])};
    rows.push_back(row);
  }
  return rows;
}

void write_diagnostics_header(std::ostream& os) { os << kDiagnosticsHeader << '\n'; }

void write_diagnostics_row(std::ostream& os, const StepReport& r) {
  os << r.step << ',' << format_real(r.time) << ',' << format_real(r.dt) << ',' << r.picard_iterations << ','
     << format_real(r.mass) << ',' << format_real(r.energy) << ',' << format_real(r.energy_slack) << ','
     << format_real(r.min_rho) << ',' << format_real(r.max_u) << '\n';
}

std::vector<StepReport> read_diagnostics_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kDiagnosticsHeader) throw std::runtime_error("diagnostics csv: bad header");
  std::vector<StepReport> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto p = split(line);
    if (p.size() != 9) throw std::runtime_error("diagnostics csv: bad row '" + line + "'");
    StepReport r;
    r.step = std::stoll(p[0]);
    r.time = to_real(p[1]);
    r.dt = to_real(p[2]);
    r.picard_iterations = std::stoi(p[3]);
    r.mass = to_real(p[4]);
    r.energy = to_real(p[5]);
    r.energy_slack = to_real(p[6]);
    r.min_rho = to_real(p[7]);
    r.max_u = to_real(p[8]);
    out.push_back(r);
  }
  return out;
}

void BoundsMonitor::add_level(const Grid& grid, const State& state, double dt, const GasModeld& model,
                              const FluxParamsd& params) {
  rho_linf_lgamma = std::max(rho_linf_lgamma, lgamma_norm(grid, state.rho, model.gamma));
  double kinetic = 0.0;
  for (Index k = 0; k < grid.cell_count(); ++k) kinetic += state.rho(k) * state.u.row(k).squaredNorm();
  kinetic_linf_l1 = std::max(kinetic_linf_l1, grid.cell_volume() * kinetic);
  if (dt <= 0) return;
  grad_u_l2l2_sq += dt * edge_gradient_norm_sq(grid, state.u);
  div_u_l2l2_sq += dt * integrate_cells(grid, div_h(grid, state.u).cwiseAbs2());
  eps_jump_sum += dt * eps_jump_dissipation(grid, state, params);
}

}  // namespace fvns
