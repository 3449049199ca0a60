#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tbhiv/integrate.hpp"
#include "tbhiv/model.hpp"
#include "tbhiv/params.hpp"
#include "tbhiv/state.hpp"

// Optimal treatment allocation via the first-order necessary conditions:
// Hamiltonian assembly, hand-derived costate system, closed-form pointwise
// minimization over the admissible triangle, and a damped forward-backward
// sweep.

namespace tbhiv {

enum class CostVariant { J, J1, J2, J3 };

const char* to_string(CostVariant v);
CostVariant cost_variant_from_string(const std::string& s);

// Running-cost specification. Integrands:
//   J  : A_T + W1/2 u1^2 + W2/2 u2^2
//   J1 : A + A_T + W1/2 u1^2 + W2/2 u2^2
//   J2 : A + A_T + W1/2 u1^2          (u2 frozen at u2_frozen)
//   J3 : A + A_T + W2/2 u2^2          (u1 frozen at u1_frozen)
struct CostSpec {
  CostVariant variant = CostVariant::J;
  double W1 = 50.0;
  double W2 = 50.0;
  double u1_frozen = 0.0;  // used by J3 only
  double u2_frozen = 0.0;  // used by J2 only
};

// Admissible control set: u1 >= 0, u2 >= 0, u1 + u2 <= u_max. The
// per-control cap coincides with the sum cap.
struct AdmissibleSet {
  static constexpr double u_max = 0.95;
  static bool feasible(double u1, double u2) {
    return u1 >= 0.0 && u2 >= 0.0 && u1 + u2 <= u_max;
  }
};

// Node values of (u1, u2) on a time grid; between nodes the integrators use
// a zero-order hold (the value on [t_i, t_{i+1}) is the node-i value).
struct ControlPath {
  std::vector<double> u1;
  std::vector<double> u2;

  static ControlPath constant(int n_nodes, double u1v, double u2v);
  int n_nodes() const { return static_cast<int>(u1.size()); }
};

// Zero-order-hold lookup of the control at time t.
std::pair<double, double> control_at(const ControlPath& u, const TimeGrid& grid,
                                     double t);

// Running cost at one point.
double cost_integrand(const StateVec& x, double u1, double u2,
                      const CostSpec& cost);

// H = integrand + <lam, F(x, u1, u2)>.
double hamiltonian(const StateVec& x, const AdjointVec& lam, double u1,
                   double u2, const CostSpec& cost, const Params& pr);

// Costate derivative: component j is -dH/dx_j, including the dependence of
// both forces of infection on every compartment through N.
AdjointVec adjoint_rhs(const StateVec& x, const AdjointVec& lam, double u1,
                       double u2, const CostSpec& cost, const Params& pr);

// Exact minimizer of the control-quadratic Hamiltonian over the admissible
// triangle. With s = rho2 * I_TH, the stationarity conditions are
// W1*u1 + (lam_CH - lam_AT)*s = 0 and W2*u2 + (lam_RH - lam_AT)*s = 0; the
// unconstrained point is box-clamped, and if it violates the sum cap it is
// projected onto u1 + u2 = u_max under the diag(W1, W2) norm and re-clamped.
// For J2/J3 the frozen control is returned unchanged and the active one is
// minimized on its remaining interval. Throws std::invalid_argument when an
// active weight is not positive (the minimizer degenerates).
std::pair<double, double> pointwise_minimizer(const StateVec& x,
                                              const AdjointVec& lam,
                                              const CostSpec& cost,
                                              const Params& pr);

// Composite-trapezoid value of the running cost along a state trajectory
// (11-dimensional) and control path on the same grid.
double evaluate_cost(const Trajectory& state, const ControlPath& u,
                     const CostSpec& cost);

// State dynamics under a zero-order-hold control path, with round-off
// clamping of tiny negative components. Shared by the sweep and the
// scenario driver so constant-control runs agree bit for bit.
OdeRhs make_state_rhs(const Params& pr, const ControlPath& u,
                      const TimeGrid& grid);

AdjointOdeRhs make_adjoint_rhs(const Params& pr, const ControlPath& u,
                               const TimeGrid& grid, const CostSpec& cost);

struct SweepOptions {
  double damping = 0.5;      // u <- (1-damping)*u + damping*candidate
  double tol = 1e-4;         // max-norm relative control change
  int max_iterations = 500;
  // Scale floor for the relative-change denominator, so near-zero control
  // paths can converge.
  double change_floor = 1e-2;
  // Skip control updates entirely: integrate once under the initial
  // controls and return. Used to reproduce the fixed-fraction model.
  bool freeze_controls = false;
};

struct SweepResult {
  ControlPath controls;
  Trajectory state;
  Trajectory adjoint;
  double cost = 0.0;
  int iterations = 0;
  bool converged = false;
  double final_rel_change = 0.0;
};

// Forward-backward sweep: state forward under the current controls, costate
// backward from lam(T) = 0, pointwise minimization at every node, damped
// update, until the relative control change drops below tol or the
// iteration cap is reached. Controls start at (p, q) from the parameter
// table (frozen components at their CostSpec values). Keeps the best
// (lowest-cost) iterate seen and returns it. Non-convergence is reported
// through the flag, never an exception; integration blow-up still throws.
SweepResult fbsm_solve(const StateVec& x0, const Params& pr,
                       const CostSpec& cost, const TimeGrid& grid,
                       const SweepOptions& options = {});

}  // namespace tbhiv
