// Acceptance suite: runs every contract criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exits nonzero if any
// criterion fails.

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tbhiv/analysis.hpp"
#include "tbhiv/integrate.hpp"
#include "tbhiv/model.hpp"
#include "tbhiv/ocp.hpp"
#include "tbhiv/scenario.hpp"

using namespace tbhiv;

namespace {

int g_failures = 0;

void report(int number, const std::string& name, bool pass,
            const std::string& detail) {
  std::printf("[%2d] %-58s %s  (%s)\n", number, name.c_str(),
              pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

void note(const std::string& text) {
  std::printf("     note: %s\n", text.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof(buf), f, args);
  va_end(args);
  return buf;
}

StateVec table_initial_state() {
  return default_initial_state(30000.0);
}

struct BaselineSolve {
  SweepResult sweep;
  Trajectory constant_arm;
  ControlPath constant_u;
  double cost_constant = 0.0;
};

// Shared solve for criteria 8, 9 and 11: T = 50, h = 1/120, variant J.
const BaselineSolve& baseline_solve(double W1) {
  static std::map<double, BaselineSolve> cache;
  auto it = cache.find(W1);
  if (it != cache.end()) return it->second;

  Params pr;
  CostSpec cost;
  cost.W1 = W1;
  const TimeGrid grid(0.0, 50.0, 6000);
  BaselineSolve run;
  run.sweep = fbsm_solve(table_initial_state(), pr, cost, grid);
  run.constant_u = ControlPath::constant(grid.n_nodes(), pr.p, pr.q);
  run.constant_arm = integrate_forward(
      make_state_rhs(pr, run.constant_u, grid),
      std::span<const double>(table_initial_state().c), grid);
  run.cost_constant = evaluate_cost(run.constant_arm, run.constant_u, cost);
  return cache.emplace(W1, std::move(run)).first->second;
}

double control_mean(const std::vector<double>& u, const TimeGrid& grid,
                    double t_lo, double t_hi) {
  double acc = 0.0;
  int count = 0;
  for (int i = 0; i < grid.n_nodes(); ++i) {
    const double t = grid.time_at(i);
    if (t < t_lo || t > t_hi) continue;
    acc += u[i];
    ++count;
  }
  return acc / count;
}

// --------------------------------------------------------------------------

void criterion_1_r1_reproduction() {
  Params pr;
  const double v = r1(pr, 30000.0);
  const double err = std::fabs(v - 4.91159);
  report(1, "reproduction number r1 at the baseline table", err <= 1e-3,
         fmt("r1 = %.6f, |r1 - 4.91159| = %.2e <= 1e-3", v, err));
}

void criterion_2_r2_formula_fidelity() {
  Params pr;
  const double v = r2(pr, 30000.0);
  const oracle::RatParams t;
  const oracle::Rat exact = oracle::r2_exact(t, oracle::Rat{30000});
  const double rel = std::fabs(v - exact.value()) / exact.value();
  report(2, "r2 matches the exact-arithmetic closed form", rel <= 1e-12,
         fmt("r2 = %.12g = %lld/%lld, rel err %.2e", v, exact.num, exact.den,
             rel));
  note("the closed form gives 0.10744 for this table; the 10x-larger figure "
       "sometimes quoted for the same inputs does not satisfy it and is not "
       "asserted");
}

void criterion_3_equilibrium_residuals() {
  Params pr;
  const StateVec dfe = dfe_full(pr);
  const DerivVec resid = rhs_uncontrolled(dfe, pr);
  double dfe_max = 0.0;
  for (int i = 0; i < kCompartments; ++i)
    dfe_max = std::fmax(dfe_max, std::fabs(resid[i]));

  const Vec4 eq = endemic_equilibrium_hiv(pr);
  const Vec4 r4 = rhs_hiv_only(eq, pr);
  const double en_norm =
      std::sqrt(r4[0] * r4[0] + r4[1] * r4[1] + r4[2] * r4[2] + r4[3] * r4[3]);

  const bool pass = dfe_max < 1e-10 && en_norm < 1e-8 * pr.Lambda;
  report(3, "equilibrium residuals (DFE and endemic HIV point)", pass,
         fmt("DFE max |rhs| = %.2e, endemic ||rhs|| = %.2e < %.2e", dfe_max,
             en_norm, 1e-8 * pr.Lambda));
}

void criterion_4_stability_threshold() {
  std::mt19937_64 rng(20240817);
  int accepted = 0;
  int agree = 0;
  while (accepted < 50) {
    const Params pr = oracle::random_params_near_table(rng);
    const double n_dfe = pr.Lambda / pr.mu;
    const double r0v = reproduction_numbers(pr, n_dfe).r0;
    if (std::fabs(r0v - 1.0) < 0.02) continue;
    const StateVec dfe = dfe_full(pr);
    const StabilityReport rep =
        classify_stability(full_model_field(pr), std::span<const double>(dfe.c));
    const bool match = r0v < 1.0 ? rep.classification == Stability::Stable
                                 : rep.classification == Stability::Unstable;
    ++accepted;
    if (match) ++agree;
  }
  report(4, "DFE stability classification tracks sign(r0 - 1)", agree == 50,
         fmt("%d/50 randomized draws agree (marginal band |r0-1| < 0.02 "
             "excluded)",
             agree));
}

void criterion_5_conservation() {
  const StateVec x0 = table_initial_state();
  const TimeGrid grid(0.0, 10.0, 1200);  // h = 1/120

  Params no_death;
  no_death.d_T = no_death.d_A = no_death.d_TA = 0.0;
  const ControlPath u = ControlPath::constant(grid.n_nodes(), no_death.p, no_death.q);
  const Trajectory free_traj = integrate_forward(
      make_state_rhs(no_death, u, grid), std::span<const double>(x0.c), grid);
  const double n_inf = no_death.Lambda / no_death.mu;
  double worst = 0.0;
  for (int i = 0; i < grid.n_nodes(); ++i) {
    const double n = StateVec::from_span(free_traj.values[i]).total();
    const double expected =
        n_inf + (x0.total() - n_inf) * std::exp(-no_death.mu * grid.time_at(i));
    worst = std::fmax(worst, std::fabs(n - expected) / expected);
  }

  Params pr;
  const Trajectory mortal = integrate_forward(
      make_state_rhs(pr, u, grid), std::span<const double>(x0.c), grid);
  const double cap = pr.Lambda / pr.mu * (1.0 + 1e-6);
  bool bounded = true;
  for (const auto& node : mortal.values)
    bounded = bounded && StateVec::from_span(node).total() <= cap;

  report(5, "population conservation and invariant region", worst <= 1e-6 && bounded,
         fmt("d=0 drift error %.2e <= 1e-6; N(t) <= Lambda/mu bound %s", worst,
             bounded ? "holds" : "violated"));
}

void criterion_6_adjoint_correctness() {
  Params pr;
  std::mt19937_64 rng(6060);
  const CostSpec variants[4] = {
      {CostVariant::J, 50.0, 50.0, 0.0, 0.0},
      {CostVariant::J1, 50.0, 50.0, 0.0, 0.0},
      {CostVariant::J2, 50.0, 50.0, 0.0, 0.2},
      {CostVariant::J3, 50.0, 50.0, 0.2, 0.0},
  };
  double worst = 0.0;
  bool pass = true;
  for (const CostSpec& cost : variants) {
    for (int trial = 0; trial < 100; ++trial) {
      const StateVec x = oracle::random_interior_state(rng);
      const AdjointVec lam = oracle::random_adjoint(rng);
      const auto [u1, u2] = oracle::random_feasible_controls(rng);
      const AdjointVec got = adjoint_rhs(x, lam, u1, u2, cost, pr);
      for (int j = 0; j < kCompartments; ++j) {
        const double step = 1e-6 * std::fmax(1.0, std::fabs(x[j]));
        StateVec xp = x, xm = x;
        xp[j] += step;
        xm[j] -= step;
        const double fd = -(hamiltonian(xp, lam, u1, u2, cost, pr) -
                            hamiltonian(xm, lam, u1, u2, cost, pr)) /
                          (2.0 * step);
        const double err = std::fabs(got[j] - fd) /
                           std::fmax(1.0, std::fmax(std::fabs(got[j]), std::fabs(fd)));
        worst = std::fmax(worst, err);
        pass = pass && err <= 1e-5;
      }
    }
  }
  report(6, "costate derivatives match finite differences of H", pass,
         fmt("400 randomized interior points, all variants, worst rel err "
             "%.2e <= 1e-5",
             worst));
}

void criterion_7_pointwise_minimizer() {
  Params pr;
  std::mt19937_64 rng(7070);
  std::uniform_real_distribution<double> ith(0.0, 400.0);
  CostSpec cost;  // variant J, W1 = W2 = 50
  double worst_gap = 0.0;
  bool pass = true;
  for (int trial = 0; trial < 1000; ++trial) {
    StateVec x = oracle::random_interior_state(rng);
    x.I_TH() = ith(rng);
    const AdjointVec lam = oracle::random_adjoint(rng, 2.0);
    const auto [u1, u2] = pointwise_minimizer(x, lam, cost, pr);
    const oracle::GridMin grid = oracle::grid_search_minimizer(x, lam, cost, pr);
    const double h_closed = hamiltonian(x, lam, u1, u2, cost, pr);
    const bool ok = std::fabs(u1 - grid.u1) <= 1e-3 + 1e-12 &&
                    std::fabs(u2 - grid.u2) <= 1e-3 + 1e-12 &&
                    h_closed <= grid.h + 1e-9 * std::fmax(1.0, std::fabs(grid.h));
    worst_gap = std::fmax(
        worst_gap, std::fmax(std::fabs(u1 - grid.u1), std::fabs(u2 - grid.u2)));
    pass = pass && ok;
  }
  report(7, "closed-form minimizer matches 1e-3 grid search", pass,
         fmt("1000 randomized (x, lam) pairs, worst coordinate gap %.2e <= "
             "1e-3, H never above the grid optimum",
             worst_gap));
}

void criterion_8_baseline_control_scenario() {
  const BaselineSolve& run = baseline_solve(50.0);
  const TimeGrid& grid = run.sweep.state.grid;

  const bool converged = run.sweep.converged;
  const bool cost_improves = run.sweep.cost < run.cost_constant;
  const double at_opt = run.sweep.state.values.back()[cAT];
  const double at_const = run.constant_arm.values.back()[cAT];
  const bool at_below = at_opt < at_const;
  const double u1_mean = control_mean(run.sweep.controls.u1, grid, 5.0, 40.0);
  const double u2_mean = control_mean(run.sweep.controls.u2, grid, 5.0, 40.0);
  const bool plateau_ok =
      std::fabs(u1_mean - 0.5) <= 0.15 && std::fabs(u2_mean - 0.46) <= 0.15;

  report(8, "baseline sweep: convergence, cost, A_T(T), plateaus",
         converged && cost_improves && at_below && plateau_ok,
         fmt("converged=%s its=%d; J*=%.4g %s J0=%.4g; A_T(T) %.3g %s %.3g; "
             "mean u1[5,40]=%.3f (want 0.5+-0.15), mean u2=%.3f (want "
             "0.46+-0.15)",
             converged ? "yes" : "no", run.sweep.iterations, run.sweep.cost,
             cost_improves ? "<" : ">=", run.cost_constant, at_opt,
             at_below ? "<" : ">=", at_const, u1_mean, u2_mean));
  if (!(at_below && plateau_ok))
    note("with the implemented r2 closed form the baseline has r2 = 0.107 < 1, "
         "so the coinfected pool I_TH decays to ~1e-4 by year 30 and the "
         "extremal controls wind down after ~10 years; a 40-year plateau "
         "requires a persistent pool (see the r2 > 1 regression in the unit "
         "suite, which holds 0.5/0.46 on [5,40])");
}

void criterion_9_weight_asymmetry() {
  const BaselineSolve& even = baseline_solve(50.0);
  const BaselineSolve& costly = baseline_solve(500.0);
  const TimeGrid& grid = even.sweep.state.grid;

  const double u1_even = control_mean(even.sweep.controls.u1, grid, 0.0, 50.0);
  const double u2_even = control_mean(even.sweep.controls.u2, grid, 0.0, 50.0);
  const double u1_costly = control_mean(costly.sweep.controls.u1, grid, 0.0, 50.0);
  const double u2_costly = control_mean(costly.sweep.controls.u2, grid, 0.0, 50.0);

  const bool pass = costly.sweep.converged && u1_costly < u1_even &&
                    u2_costly > u2_even;
  report(9, "weight asymmetry W1=500 reorders the controls", pass,
         fmt("avg u1: %.4f < %.4f and avg u2: %.4f > %.4f", u1_costly, u1_even,
             u2_costly, u2_even));
}

void criterion_10_j1_saturation() {
  Params pr;
  pr.d_T = pr.d_A = pr.d_TA = 0.0;
  CostSpec cost;
  cost.variant = CostVariant::J1;
  const TimeGrid grid(0.0, 10.0, 1200);
  const SweepResult res = fbsm_solve(table_initial_state(), pr, cost, grid);

  int sat = 0, idle = 0;
  for (int i = 0; i < grid.n_nodes(); ++i) {
    if (res.controls.u1[i] >= 0.93) ++sat;
    if (res.controls.u2[i] <= 0.02) ++idle;
  }
  const double sat_frac = static_cast<double>(sat) / grid.n_nodes();
  const double idle_frac = static_cast<double>(idle) / grid.n_nodes();
  const bool pass = res.converged && sat_frac >= 0.70 && idle_frac >= 0.70;
  report(10, "J1 scenario saturation: u1 at the bound, u2 idle", pass,
         fmt("converged=%s; u1 >= 0.93 on %.1f%% (want >= 70%%), u2 <= 0.02 "
             "on %.1f%%",
             res.converged ? "yes" : "no", 100 * sat_frac, 100 * idle_frac));
  if (!pass)
    note("same root cause as criterion 8: with r2 = 0.107 < 1 the coinfected "
         "pool empties in ~5 years, capping the saturated stretch at ~44%; "
         "the r2 > 1 regime sustains it past 70% (unit suite)");
}

void criterion_11_deaths_comparison() {
  Params pr;
  const BaselineSolve& run = baseline_solve(50.0);
  const double deaths_const = cumulative_disease_deaths(run.constant_arm, pr);
  const double deaths_opt = cumulative_disease_deaths(run.sweep.state, pr);
  const double reduction = 100.0 * (deaths_const - deaths_opt) / deaths_const;
  const bool pass = reduction >= 2.0 && reduction <= 9.0;
  report(11, "disease-induced deaths drop 2-9% under optimal control", pass,
         fmt("deaths: constant %.1f, optimal %.1f, reduction %.2f%%",
             deaths_const, deaths_opt, reduction));
}

void criterion_12_integrator_order() {
  Params pr;
  const StateVec x0 = table_initial_state();
  auto final_state = [&](int n_steps) {
    const TimeGrid grid(0.0, 10.0, n_steps);
    const ControlPath u = ControlPath::constant(grid.n_nodes(), pr.p, pr.q);
    return integrate_forward(make_state_rhs(pr, u, grid),
                             std::span<const double>(x0.c), grid)
        .values.back();
  };
  const auto ref = final_state(2560);
  auto err = [&](const std::vector<double>& v) {
    double e = 0.0;
    for (int i = 0; i < kCompartments; ++i)
      e += (v[i] - ref[i]) * (v[i] - ref[i]);
    return std::sqrt(e);
  };
  const double e1 = err(final_state(160));
  const double e2 = err(final_state(320));
  const double ratio = e1 / e2;
  report(12, "RK4 error contracts ~16x under step halving", ratio >= 12.0 && ratio <= 20.0,
         fmt("error ratio %.2f in [12, 20]", ratio));
}

void criterion_13_reduction_property() {
  Params pr;
  const StateVec x0 = table_initial_state();
  const TimeGrid grid(0.0, 50.0, 6000);

  SweepOptions opt;
  opt.freeze_controls = true;
  const SweepResult frozen = fbsm_solve(x0, pr, CostSpec{}, grid, opt);

  const ControlPath u = ControlPath::constant(grid.n_nodes(), pr.p, pr.q);
  const Trajectory direct = integrate_forward(
      make_state_rhs(pr, u, grid), std::span<const double>(x0.c), grid);

  bool identical = frozen.state.values.size() == direct.values.size();
  for (size_t i = 0; identical && i < direct.values.size(); ++i)
    identical = std::memcmp(frozen.state.values[i].data(),
                            direct.values[i].data(),
                            sizeof(double) * kCompartments) == 0;
  report(13, "frozen sweep reproduces the fixed-fraction run bit for bit",
         identical, identical ? "6001 nodes, all bits equal" : "mismatch");
}

}  // namespace

int main() {
  std::printf("acceptance suite\n----------------\n");
  criterion_1_r1_reproduction();
  criterion_2_r2_formula_fidelity();
  criterion_3_equilibrium_residuals();
  criterion_4_stability_threshold();
  criterion_5_conservation();
  criterion_6_adjoint_correctness();
  criterion_7_pointwise_minimizer();
  criterion_8_baseline_control_scenario();
  criterion_9_weight_asymmetry();
  criterion_10_j1_saturation();
  criterion_11_deaths_comparison();
  criterion_12_integrator_order();
  criterion_13_reduction_property();
  std::printf("----------------\n%d/13 criteria passed\n", 13 - g_failures);
  return g_failures == 0 ? 0 : 1;
}
