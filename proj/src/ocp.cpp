#include "tbhiv/ocp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace tbhiv {

const char* to_string(CostVariant v) {
  switch (v) {
    case CostVariant::J:
      return "J";
    case CostVariant::J1:
      return "J1";
    case CostVariant::J2:
      return "J2";
    case CostVariant::J3:
      return "J3";
  }
  return "?";
}

CostVariant cost_variant_from_string(const std::string& s) {
  if (s == "J") return CostVariant::J;
  if (s == "J1") return CostVariant::J1;
  if (s == "J2") return CostVariant::J2;
  if (s == "J3") return CostVariant::J3;
  throw std::invalid_argument("unknown cost variant '" + s +
                              "' (expected J, J1, J2 or J3)");
}

ControlPath ControlPath::constant(int n_nodes, double u1v, double u2v) {
  ControlPath u;
  u.u1.assign(n_nodes, u1v);
  u.u2.assign(n_nodes, u2v);
  return u;
}

std::pair<double, double> control_at(const ControlPath& u, const TimeGrid& grid,
                                     double t) {
  // Right-open zero-order hold; the nudge keeps exact node times in their
  // own interval under floating-point division.
  const double s = (t - grid.t0) / grid.step() + 1e-9;
  int idx = static_cast<int>(std::floor(s));
  idx = std::clamp(idx, 0, grid.n_steps - 1);
  return {u.u1[idx], u.u2[idx]};
}

double cost_integrand(const StateVec& x, double u1, double u2,
                      const CostSpec& cost) {
  switch (cost.variant) {
    case CostVariant::J:
      return x.A_T() + 0.5 * cost.W1 * u1 * u1 + 0.5 * cost.W2 * u2 * u2;
    case CostVariant::J1:
      return x.A() + x.A_T() + 0.5 * cost.W1 * u1 * u1 +
             0.5 * cost.W2 * u2 * u2;
    case CostVariant::J2:
      return x.A() + x.A_T() + 0.5 * cost.W1 * u1 * u1;
    case CostVariant::J3:
      return x.A() + x.A_T() + 0.5 * cost.W2 * u2 * u2;
  }
  return 0.0;
}

double hamiltonian(const StateVec& x, const AdjointVec& lam, double u1,
                   double u2, const CostSpec& cost, const Params& pr) {
  const DerivVec f = rhs_controlled(x, u1, u2, pr);
  double dot = 0.0;
  for (int i = 0; i < kCompartments; ++i) dot += lam[i] * f[i];
  return cost_integrand(x, u1, u2, cost) + dot;
}

AdjointVec adjoint_rhs(const StateVec& x, const AdjointVec& lam, double u1,
                       double u2, const CostSpec& cost, const Params& pr) {
  const double N = x.total();
  if (!(N > 0.0))
    throw std::domain_error("adjoint_rhs: total population must be positive");
  if (!(u1 >= 0.0) || !(u2 >= 0.0) || !(u1 + u2 <= 1.0))
    throw std::domain_error("adjoint_rhs: inadmissible controls");

  const double foiT = force_of_infection_tb(x, pr);
  const double foiH = force_of_infection_hiv(x, pr);

  // d(lambda_T)/dx_j and d(lambda_H)/dx_j. Every component is nonzero
  // because both forces of infection divide by N.
  const double tb_sel[kCompartments] = {0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 1};
  const double hiv_w[kCompartments] = {0,        0, 0, 0, 1, pr.eta_A,
                                       pr.eta_C, 1, 1, 1, pr.eta_A};
  double gT[kCompartments], gH[kCompartments];
  for (int j = 0; j < kCompartments; ++j) {
    gT[j] = (pr.beta1 * tb_sel[j] - foiT) / N;
    gH[j] = (pr.beta2 * hiv_w[j] - foiH) / N;
  }

  const double C4 = pr.k1 + pr.tau1 + pr.mu;
  const double C5 = pr.tau2 + pr.mu + pr.d_T;
  const double C1 = pr.rho1 + pr.phi + pr.mu;
  const double C6 = pr.k2 + pr.tau3 + pr.mu;
  const double C7 = pr.rho2 + pr.mu + pr.d_T;

  // Jacobian dF_i/dx_j of the controlled system.
  double J[kCompartments][kCompartments] = {};
  for (int j = 0; j < kCompartments; ++j) {
    J[cS][j] = -x.S() * (gT[j] + gH[j]);
    J[cLT][j] = gT[j] * (x.S() + pr.beta1_prime * x.R());
    J[cIT][j] = -pr.delta * x.I_T() * gH[j];
    J[cR][j] = -x.R() * (pr.beta1_prime * gT[j] + gH[j]);
    J[cIH][j] = gH[j] * (x.S() + x.R()) - pr.psi * x.I_H() * gT[j];
    J[cLTH][j] = pr.beta2_prime * gT[j] * x.R_H();
    J[cITH][j] = pr.delta * gH[j] * x.I_T() + pr.psi * gT[j] * x.I_H();
    J[cRH][j] = -pr.beta2_prime * gT[j] * x.R_H();
  }
  J[cS][cS] += -(foiT + foiH + pr.mu);
  J[cLT][cS] += foiT;
  J[cLT][cR] += pr.beta1_prime * foiT;
  J[cLT][cLT] += -C4;
  J[cIT][cLT] += pr.k1;
  J[cIT][cIT] += -(C5 + pr.delta * foiH);
  J[cR][cLT] += pr.tau1;
  J[cR][cIT] += pr.tau2;
  J[cR][cR] += -(pr.beta1_prime * foiT + foiH + pr.mu);
  J[cIH][cS] += foiH;
  J[cIH][cR] += foiH;
  J[cIH][cIH] += -(C1 + pr.psi * foiT);
  J[cIH][cA] += pr.alpha1;
  J[cIH][cCH] += pr.omega1;
  J[cA][cIH] = pr.rho1;
  J[cA][cRH] = pr.omega2;
  J[cA][cA] = -(pr.alpha1 + pr.mu + pr.d_A);
  J[cCH][cIH] = pr.phi;
  J[cCH][cITH] = u1 * pr.rho2;
  J[cCH][cLTH] = pr.r * pr.tau3;
  J[cCH][cCH] = -(pr.omega1 + pr.mu);
  J[cLTH][cRH] += pr.beta2_prime * foiT;
  J[cLTH][cLTH] += -C6;
  J[cITH][cIT] += pr.delta * foiH;
  J[cITH][cIH] += pr.psi * foiT;
  J[cITH][cAT] += pr.alpha2;
  J[cITH][cLTH] += pr.k2;
  J[cITH][cITH] += -C7;
  J[cRH][cITH] += u2 * pr.rho2;
  J[cRH][cLTH] += (1.0 - pr.r) * pr.tau3;
  J[cRH][cRH] += -(pr.beta2_prime * foiT + pr.omega2 + pr.mu);
  J[cAT][cITH] = (1.0 - (u1 + u2)) * pr.rho2;
  J[cAT][cAT] = -(pr.alpha2 + pr.mu + pr.d_TA);

  // Gradient of the running cost in x.
  double gx[kCompartments] = {};
  gx[cAT] = 1.0;
  if (cost.variant != CostVariant::J) gx[cA] = 1.0;

  AdjointVec dlam;
  for (int j = 0; j < kCompartments; ++j) {
    double acc = gx[j];
    for (int i = 0; i < kCompartments; ++i) acc += lam[i] * J[i][j];
    dlam[j] = -acc;
  }
  return dlam;
}

namespace {

// Clamp onto the admissible triangle, nudging away the last ulp if the sum
// still exceeds the cap after rounding.
void enforce_feasible(double& u1, double& u2) {
  constexpr double cap = AdmissibleSet::u_max;
  u1 = std::clamp(u1, 0.0, cap);
  u2 = std::clamp(u2, 0.0, cap);
  if (u1 + u2 > cap) u2 = cap - u1;
  while (u1 + u2 > cap) u2 = std::nextafter(u2, 0.0);
}

void require_weight(double w, const char* name) {
  if (!(w > 0.0))
    throw std::invalid_argument(std::string("pointwise_minimizer: ") + name +
                                " must be positive (quadratic cost)");
}

}  // namespace

std::pair<double, double> pointwise_minimizer(const StateVec& x,
                                              const AdjointVec& lam,
                                              const CostSpec& cost,
                                              const Params& pr) {
  constexpr double cap = AdmissibleSet::u_max;
  const double s = pr.rho2 * x.I_TH();
  const double a = (lam.C_H() - lam.A_T()) * s;  // dH/du1 = W1*u1 + a
  const double b = (lam.R_H() - lam.A_T()) * s;  // dH/du2 = W2*u2 + b

  switch (cost.variant) {
    case CostVariant::J:
    case CostVariant::J1: {
      require_weight(cost.W1, "W1");
      require_weight(cost.W2, "W2");
      double u1 = std::clamp(-a / cost.W1, 0.0, cap);
      double u2 = std::clamp(-b / cost.W2, 0.0, cap);
      if (u1 + u2 > cap) {
        // Weighted projection of the unconstrained point onto the sum face.
        u1 = std::clamp((cap * cost.W2 + b - a) / (cost.W1 + cost.W2), 0.0, cap);
        u2 = cap - u1;
      }
      enforce_feasible(u1, u2);
      return {u1, u2};
    }
    case CostVariant::J2: {
      require_weight(cost.W1, "W1");
      const double u2 = cost.u2_frozen;
      double u1 = std::clamp(-a / cost.W1, 0.0, cap - u2);
      return {u1, u2};
    }
    case CostVariant::J3: {
      require_weight(cost.W2, "W2");
      const double u1 = cost.u1_frozen;
      double u2 = std::clamp(-b / cost.W2, 0.0, cap - u1);
      return {u1, u2};
    }
  }
  return {0.0, 0.0};
}

double evaluate_cost(const Trajectory& state, const ControlPath& u,
                     const CostSpec& cost) {
  const int n_nodes = state.grid.n_nodes();
  if (static_cast<int>(state.values.size()) != n_nodes ||
      u.n_nodes() != n_nodes)
    throw std::invalid_argument("evaluate_cost: grid mismatch");
  const double h = state.grid.step();
  double acc = 0.0;
  for (int i = 0; i < n_nodes; ++i) {
    const StateVec x = StateVec::from_span(state.values[i]);
    const double g = cost_integrand(x, u.u1[i], u.u2[i], cost);
    acc += (i == 0 || i == n_nodes - 1) ? 0.5 * g : g;
  }
  return acc * h;
}

OdeRhs make_state_rhs(const Params& pr, const ControlPath& u,
                      const TimeGrid& grid) {
  return [pr, u, grid](double t, std::span<const double> x,
                       std::span<double> dxdt) {
    const StateVec s = sanitize_state(StateVec::from_span(x));
    const auto [u1, u2] = control_at(u, grid, t);
    const DerivVec d = rhs_controlled(s, u1, u2, pr);
    for (int i = 0; i < kCompartments; ++i) dxdt[i] = d[i];
  };
}

AdjointOdeRhs make_adjoint_rhs(const Params& pr, const ControlPath& u,
                               const TimeGrid& grid, const CostSpec& cost) {
  return [pr, u, grid, cost](double t, std::span<const double> lam,
                             std::span<const double> x, std::span<double> dlam) {
    const StateVec s = sanitize_state(StateVec::from_span(x));
    const AdjointVec l = AdjointVec::from_span(lam);
    const auto [u1, u2] = control_at(u, grid, t);
    const AdjointVec d = adjoint_rhs(s, l, u1, u2, cost, pr);
    for (int i = 0; i < kCompartments; ++i) dlam[i] = d[i];
  };
}

namespace {

double rel_change(const std::vector<double>& now, const std::vector<double>& prev,
                  double floor) {
  double diff = 0.0;
  double scale = floor;
  for (size_t i = 0; i < now.size(); ++i) {
    diff = std::max(diff, std::fabs(now[i] - prev[i]));
    scale = std::max(scale, std::fabs(now[i]));
  }
  return diff / scale;
}

ControlPath initial_controls(const Params& pr, const CostSpec& cost,
                             int n_nodes) {
  constexpr double cap = AdmissibleSet::u_max;
  double u1 = pr.p;
  double u2 = pr.q;
  if (cost.variant == CostVariant::J2) {
    u2 = cost.u2_frozen;
    u1 = std::clamp(u1, 0.0, cap - u2);
  } else if (cost.variant == CostVariant::J3) {
    u1 = cost.u1_frozen;
    u2 = std::clamp(u2, 0.0, cap - u1);
  } else if (u1 + u2 > cap) {
    // The table fractions live in the model simplex u1+u2 <= 1; scale onto
    // the control cap if a caller hands in something larger.
    const double shrink = cap / (u1 + u2);
    u1 *= shrink;
    u2 *= shrink;
  }
  return ControlPath::constant(n_nodes, u1, u2);
}

}  // namespace

SweepResult fbsm_solve(const StateVec& x0, const Params& pr,
                       const CostSpec& cost, const TimeGrid& grid,
                       const SweepOptions& options) {
  if (!x0.all_finite() || !(x0.total() > 0.0))
    throw std::invalid_argument("fbsm_solve: invalid initial state");
  if (cost.u1_frozen < 0.0 || cost.u1_frozen > AdmissibleSet::u_max ||
      cost.u2_frozen < 0.0 || cost.u2_frozen > AdmissibleSet::u_max)
    throw std::invalid_argument("fbsm_solve: frozen control outside [0, 0.95]");
  if (!(options.damping > 0.0) || options.damping > 1.0 || !(options.tol > 0.0) ||
      (!options.freeze_controls && options.max_iterations < 1))
    throw std::invalid_argument("fbsm_solve: invalid sweep options");

  const int n_nodes = grid.n_nodes();
  ControlPath u = initial_controls(pr, cost, n_nodes);

  const std::vector<double> lam_end(kCompartments, 0.0);  // transversality

  struct Pass {
    Trajectory state;
    Trajectory adjoint;
    double cost;
  };
  auto run_pass = [&](const ControlPath& ctrl) {
    Pass pass;
    pass.state = integrate_forward(make_state_rhs(pr, ctrl, grid),
                                   std::span<const double>(x0.c), grid);
    pass.adjoint = integrate_backward(make_adjoint_rhs(pr, ctrl, grid, cost),
                                      lam_end, pass.state, grid);
    pass.cost = evaluate_cost(pass.state, ctrl, cost);
    return pass;
  };

  SweepResult best;
  best.cost = std::numeric_limits<double>::infinity();
  auto keep_if_better = [&](const ControlPath& ctrl, Pass& pass) {
    if (pass.cost < best.cost) {
      best.controls = ctrl;
      best.state = std::move(pass.state);
      best.adjoint = std::move(pass.adjoint);
      best.cost = pass.cost;
    }
  };

  if (options.freeze_controls) {
    Pass pass = run_pass(u);
    keep_if_better(u, pass);
    best.iterations = 0;
    best.converged = true;
    best.final_rel_change = 0.0;
    return best;
  }

  const bool u1_active =
      cost.variant != CostVariant::J3;  // J3 freezes u1
  const bool u2_active =
      cost.variant != CostVariant::J2;  // J2 freezes u2

  int it = 0;
  double rel = std::numeric_limits<double>::infinity();
  bool converged = false;
  ControlPath next = u;

  while (it < options.max_iterations) {
    ++it;
    Pass pass = run_pass(u);

    for (int i = 0; i < n_nodes; ++i) {
      const StateVec xi = StateVec::from_span(pass.state.values[i]);
      const AdjointVec li = AdjointVec::from_span(pass.adjoint.values[i]);
      const auto [c1, c2] = pointwise_minimizer(xi, li, cost, pr);
      double u1n = u1_active
                       ? (1.0 - options.damping) * u.u1[i] + options.damping * c1
                       : u.u1[i];
      double u2n = u2_active
                       ? (1.0 - options.damping) * u.u2[i] + options.damping * c2
                       : u.u2[i];
      if (!u2_active) {
        u1n = std::clamp(u1n, 0.0, AdmissibleSet::u_max - u2n);
        while (u1n + u2n > AdmissibleSet::u_max) u1n = std::nextafter(u1n, 0.0);
      } else if (!u1_active) {
        u2n = std::clamp(u2n, 0.0, AdmissibleSet::u_max - u1n);
        while (u1n + u2n > AdmissibleSet::u_max) u2n = std::nextafter(u2n, 0.0);
      } else {
        enforce_feasible(u1n, u2n);
      }
      next.u1[i] = u1n;
      next.u2[i] = u2n;
    }

    keep_if_better(u, pass);

    rel = std::max(rel_change(next.u1, u.u1, options.change_floor),
                   rel_change(next.u2, u.u2, options.change_floor));
    std::swap(u, next);

    if (rel < options.tol) {
      converged = true;
      Pass last = run_pass(u);
      keep_if_better(u, last);
      break;
    }
  }

  best.iterations = it;
  best.converged = converged;
  best.final_rel_change = rel;
  return best;
}

}  // namespace tbhiv
