// Acceptance checks. Usage: fvns_acceptance [criterion]; without an argument
// every criterion runs. Each prints one PASS/FAIL line; the exit status is
// non-zero when any selected criterion fails.

#include "fvns/cases.hpp"
#include "fvns/cli.hpp"
#include "fvns/config.hpp"
#include "fvns/diagnostics.hpp"
#include "fvns/fields.hpp"
#include "fvns/flux.hpp"
#include "fvns/grid.hpp"
#include "fvns/operators.hpp"
#include "fvns/solver.hpp"

#include "../support.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace fvns;
using fvns::testing::FieldSampler;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

// Tracks the worst relative defect |lhs - rhs| / scale of a family of identities.
struct Worst {
  double value = 0.0;
  std::string where;
  void add(double defect, double scale, const std::string& name) {
    const double rel = defect / std::max(scale, 1e-300);
    if (rel > value) {
      value = rel;
      where = name;
    }
  }
};

// 1. Operator and face-algebra identities on random fields.
Outcome identities() {
  constexpr double tol = 1e-12;
  constexpr int samples = 100;
  const std::vector<std::vector<Index>> meshes{{8, 8}, {16, 16}, {32, 32}, {8, 8, 8}};
  Worst worst;
  FieldSampler rng(20240601);
  for (const auto& n : meshes) {
    const Grid g(static_cast<int>(n.size()), n);
    for (int s = 0; s < samples; ++s) {
      const ScalarFieldd r = rng.scalar(g, 0.5, 2.0), phi = rng.scalar(g), w = rng.scalar(g);
      const VectorFieldd v = rng.vector(g);
      const DualFieldd q = rng.dual(g);
      const ScalarFieldd v2 = v.rowwise().squaredNorm();

      // Face algebra: products of averages and jumps.
      for (int i = 0; i < g.dim(); ++i) {
        const FaceFieldd ar = face_average(g, r, i), jr = face_jump(g, r, i);
        const FaceFieldd aw = face_average(g, w, i), jw = face_jump(g, w, i);
        const FaceFieldd prod = face_average(g, r.cwiseProduct(w), i);
        worst.add((ar.cwiseProduct(aw) + 0.25 * jr.cwiseProduct(jw) - prod).cwiseAbs().maxCoeff(),
                  (ar.cwiseProduct(aw).cwiseAbs() + 0.25 * jr.cwiseProduct(jw).cwiseAbs()).maxCoeff(),
                  "average of products");
        const FaceFieldd jprod = face_jump(g, r.cwiseProduct(w), i);
        worst.add((ar.cwiseProduct(jw) + jr.cwiseProduct(aw) - jprod).cwiseAbs().maxCoeff(),
                  (ar.cwiseProduct(jw).cwiseAbs() + jr.cwiseProduct(aw).cwiseAbs()).maxCoeff(), "jump of products");

        FaceFieldd lhs = -0.5 * jr.cwiseProduct(face_jump(g, v2, i));
        FaceFieldd rhs = FaceFieldd::Zero(g.cell_count());
        double scale = lhs.cwiseAbs().maxCoeff();
        for (int j = 0; j < g.dim(); ++j) {
          const FaceFieldd jv = face_jump(g, v.col(j), i);
          const FaceFieldd t = face_jump(g, r.cwiseProduct(v.col(j)), i).cwiseProduct(jv);
          lhs += t;
          rhs += ar.cwiseProduct(jv.cwiseAbs2());
          scale = std::max(scale, t.cwiseAbs().maxCoeff());
        }
        worst.add((lhs - rhs).cwiseAbs().maxCoeff(), scale, "kinetic jump identity");
      }

      double total = 0.0, total_scale = 0.0;
      for (int i = 0; i < g.dim(); ++i) {
        const FaceFieldd term = face_average(g, r, i).cwiseProduct(face_jump(g, v.col(i), i)) +
                                face_average(g, v.col(i), i).cwiseProduct(face_jump(g, r, i));
        total += g.face_area(i) * term.sum();
        total_scale += g.face_area(i) * term.cwiseAbs().sum();
      }
      worst.add(std::abs(total), total_scale, "face sum of averages and jumps");

      // Divergence: face-sum form equals the dual-difference form.
      const ScalarFieldd div = div_h(g, v);
      worst.add((div - div_h_dual_form(g, v)).cwiseAbs().maxCoeff(), div.cwiseAbs().maxCoeff(), "divergence forms");

      // Summation by parts for the Laplacian and the edge/dual pair.
      const double a = integrate_cells(g, laplace_h(g, r).cwiseProduct(phi));
      const double b = -integrate_dual(g, grad_edge(g, r).cwiseProduct(grad_edge(g, phi)));
      const double c = integrate_cells(g, r.cwiseProduct(laplace_h(g, phi)));
      const double lap_scale = integrate_cells(g, laplace_h(g, r).cwiseAbs().cwiseProduct(phi.cwiseAbs()));
      worst.add(std::max(std::abs(a - b), std::abs(a - c)), lap_scale, "Laplacian summation by parts");

      const DualFieldd ge = grad_edge(g, r);
      for (int i = 0; i < g.dim(); ++i) {
        const double lhs = g.dual_volume() * q.col(i).dot(ge.col(i));
        const double rhs = -integrate_cells(g, r.cwiseProduct(grad_dual_axis(g, q.col(i), i)));
        worst.add(std::abs(lhs - rhs), g.dual_volume() * q.col(i).cwiseAbs().dot(ge.col(i).cwiseAbs()),
                  "dual summation by parts");

        const ScalarFieldd lap = laplace_axis(g, r, i);
        worst.add((lap - grad_dual_axis(g, ge.col(i), i)).cwiseAbs().maxCoeff(), lap.cwiseAbs().maxCoeff(),
                  "axis Laplacian factorisation");
      }
    }
  }
  Outcome o;
  o.pass = worst.value <= tol;
  o.detail = "operator identities on 100 random fields per mesh (8^2, 16^2, 32^2, 8^3): worst relative defect " +
             fmt(worst.value) + (worst.where.empty() ? "" : " (" + worst.where + ")") + ", tolerance 1e-12";
  return o;
}

RunConfig profile(const std::string& name) { return load_config(std::string(FVNS_PROFILE_DIR) + "/" + name); }

struct Setup {
  Grid grid;
  BenchmarkCase benchmark;
  FluxParamsd params;
  double final_time;
};

Setup setup(const RunConfig& config, Index n) {
  const BenchmarkCase c = make_case(config.case_name, config.model);
  Setup s{Grid(c.dim, std::vector<Index>(static_cast<std::size_t>(c.dim), n)), c, {}, config.final_time.value_or(c.final_time)};
  s.params.epsilon = config.epsilon;
  s.params.h = 1.0 / static_cast<double>(n);
  return s;
}

// 2. Mass conservation and positivity on both shipped benchmarks.
Outcome conservation() {
  Outcome o;
  std::ostringstream detail;
  detail << "mass drift <= 1e-10 relative and min rho > 0 at every step:";
  for (const char* file : {"experiment1.cfg", "experiment2.cfg"}) {
    const RunConfig config = profile(file);
    for (Index n : {32, 64}) {
      const Setup s = setup(config, n);
      const State init = initial_state(s.grid, s.benchmark);
      const double m0 = total_mass(s.grid, init);
      double drift = 0.0, min_rho = init.rho.minCoeff();
      run(s.grid, init, s.final_time, config.model, s.benchmark.forcing, config.solver, s.params,
          [&](const State& st, const StepReport&) {
            drift = std::max(drift, std::abs(total_mass(s.grid, st) - m0) / m0);
            min_rho = std::min(min_rho, st.rho.minCoeff());
          });
      const bool ok = drift <= 1e-10 && min_rho > 0.0;
      o.pass = o.pass && ok;
      detail << " " << config.case_name << "@" << n << "^2 drift " << fmt(drift) << " min_rho " << fmt(min_rho)
             << (ok ? "" : " [violated]") << ";";
    }
  }
  o.detail = detail.str();
  return o;
}

// 3. Discrete energy balance on the unforced Gresho vortex.
Outcome energy() {
  const RunConfig config = profile("experiment2.cfg");
  Setup s = setup(config, 64);
  s.final_time = 0.2;
  const State init = initial_state(s.grid, s.benchmark);
  const double e0 = total_energy(s.grid, init, config.model);
  const double tol = 1e-8 * e0;
  double worst_slack = -INFINITY, worst_increase = -INFINITY, previous = e0;
  Index steps = 0;
  run(s.grid, init, s.final_time, config.model, Forcing{}, config.solver, s.params,
      [&](const State&, const StepReport& rep) {
        if (rep.step == 0) return;
        ++steps;
        worst_slack = std::max(worst_slack, rep.energy_slack);
        worst_increase = std::max(worst_increase, rep.energy - previous);
        previous = rep.energy;
      });
  Outcome o;
  o.pass = steps > 0 && worst_slack <= tol && worst_increase <= tol;
  o.detail = "gresho 64^2 to T=0.2, " + std::to_string(steps) + " steps: max balance slack " + fmt(worst_slack) +
             ", max energy increase " + fmt(worst_increase) + ", tolerance 1e-8*E0 = " + fmt(tol);
  return o;
}

// 4. Manufactured solution errors against reference values.
Outcome accuracy() {
  // Rows h = 1/32, 1/64: grad u, u, rho L1L1, rho LinfLgamma.
  constexpr std::array<std::array<double, 4>, 2> reference{{{4.21e-2, 3.43e-3, 1.24e-3, 4.28e-2},
                                                            {1.78e-2, 1.39e-3, 4.95e-4, 1.81e-2}}};
  const std::array<const char*, 4> names{"grad_u", "u", "rho_l1", "rho_linf_lgamma"};
  const auto reports = convergence_study(profile("experiment1.cfg"), {32, 64}, Reference::exact);
  auto values = [](const ErrorReport& r) { return std::array<double, 4>{r.grad_u, r.u, r.rho_l1, r.rho_linf_lgamma}; };

  Outcome o;
  std::ostringstream detail;
  detail << "manufactured 32/64, errors within factor 2 of the reference values and EOC in [0.9, 1.5]:";
  for (std::size_t q = 0; q < 4; ++q) {
    detail << " " << names[q];
    for (std::size_t l = 0; l < 2; ++l) {
      const double e = values(reports[l])[q];
      const double ratio = e / reference[l][q];
      const bool ok = ratio >= 0.5 && ratio <= 2.0;
      o.pass = o.pass && ok;
      detail << " " << fmt(e) << "(x" << fmt(ratio) << (ok ? ")" : ",out)");
    }
    const double order = eoc(values(reports[0])[q], values(reports[1])[q]);
    const bool ok = order >= 0.9 && order <= 1.5;
    o.pass = o.pass && ok;
    detail << " eoc " << fmt(order) << (ok ? ";" : "(out);");
  }
  o.detail = detail.str();
  return o;
}

// 5. Gresho refinement study against a finer reference run.
Outcome convergence() {
  const auto reports = convergence_study(profile("experiment2.cfg"), {32, 64, 128, 256}, Reference::finest);
  const auto table = eoc_table(reports);
  Outcome o;
  std::ostringstream detail;
  detail << "gresho 32/64/128 against 256, every EOC >= 0.8:";
  for (const auto& row : table) {
    if (!row.orders) continue;
    const auto& e = *row.orders;
    const double lowest = std::min({e.grad_u, e.u, e.rho_l1, e.rho_linf_lgamma});
    o.pass = o.pass && lowest >= 0.8;
    detail << " h=" << fmt(row.errors.h) << " [" << fmt(e.grad_u) << ", " << fmt(e.u) << ", " << fmt(e.rho_l1)
           << ", " << fmt(e.rho_linf_lgamma) << "]";
  }
  o.detail = detail.str();
  return o;
}

// 6. A uniform state is a fixed point of the scheme.
Outcome constant_state() {
  const Grid g(2, {32, 32});
  const GasModeld model;
  State s;
  s.rho = ScalarFieldd::Constant(g.cell_count(), 1.3);
  s.u = VectorFieldd(g.cell_count(), 2);
  s.u.col(0).setConstant(0.4);
  s.u.col(1).setConstant(-0.25);
  FluxParamsd params;
  params.h = 1.0 / 32.0;
  const SolverConfig config;
  const double dt = compute_dt(g, s, model, config);
  State current = s;
  for (int k = 0; k < 100; ++k) current = picard_step(g, current, dt, model, Forcing{}, config, params).first;
  const double dev = std::max((current.rho - s.rho).cwiseAbs().maxCoeff(), (current.u - s.u).cwiseAbs().maxCoeff());
  Outcome o;
  o.pass = dev <= 1e-9;
  o.detail = "uniform state, 100 steps at 32^2: max deviation " + fmt(dev) + ", tolerance 1e-9";
  return o;
}

// 7. Flux kernel forms and the diffusive hand value.
Outcome flux_kernels() {
  FieldSampler rng(7);
  double worst = 0.0;
  for (int n = 0; n < 100000; ++n) {
    const double a = rng.uniform(-1, 1), b = rng.uniform(-1, 1), v = rng.uniform(-1, 1);
    const double ref = upwind(a, b, v);
    worst = std::max({worst, std::abs(upwind_central_form(a, b, v) - ref), std::abs(upwind_split_form(a, b, v) - ref)});
  }
  const FluxParamsd p{0.6, 0.1};
  const double hand = std::abs(diffusive_flux(2.0, 4.0, 3.0, p) - (6.0 - 2.0 * std::pow(0.1, 0.6)));
  Outcome o;
  o.pass = worst <= 1e-14 && hand <= 1e-12;
  o.detail = "upwind forms on 1e5 random triples: max disagreement " + fmt(worst) +
             " (tolerance 1e-14); diffusive hand case error " + fmt(hand) + " (tolerance 1e-12)";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> criteria{identities, conservation, energy,       accuracy,
                                                       convergence, constant_state, flux_kernels};
  std::vector<int> selected;
  if (argc > 1) {
    int n = 0;
    const std::string arg = argv[1];
    const auto [end, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), n);
    if (ec != std::errc{} || end != arg.data() + arg.size() || n < 1 || n > static_cast<int>(criteria.size())) {
      std::cerr << "usage: " << argv[0] << " [1-" << criteria.size() << "]\n";
      return 2;
    }
    selected.push_back(n);
  } else {
    for (int n = 1; n <= static_cast<int>(criteria.size()); ++n) selected.push_back(n);
  }

  bool all = true;
  for (int n : selected) {
    Outcome o;
    try {
      o = criteria[static_cast<std::size_t>(n - 1)]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all = all && o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << n << ": " << o.detail << std::endl;
  }
  return all ? 0 : 1;
}
