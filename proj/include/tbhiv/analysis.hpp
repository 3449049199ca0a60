#pragma once

#include <complex>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "tbhiv/model.hpp"
#include "tbhiv/params.hpp"
#include "tbhiv/state.hpp"

// Reproduction numbers, equilibria and local stability of the model.

namespace tbhiv {

struct ReproductionNumbers {
  double r1 = 0.0;  // HIV branch
  double r2 = 0.0;  // TB branch
  double r0 = 0.0;  // max(r1, r2)
};

// Basic reproduction number of the HIV-only sub-model, evaluated at
// population N. Throws std::domain_error on nonpositive N, mu or a zero
// denominator.
double r1(const Params& pr, double N);

// Basic reproduction number of the TB-only sub-model:
// (Lambda / (mu N)) * (beta1 / (mu + d_T + tau2)) * (k1 / (mu + k1 + tau1)).
double r2(const Params& pr, double N);

ReproductionNumbers reproduction_numbers(const Params& pr, double N);

// Disease-free equilibrium of the full model: (Lambda/mu, 0, ..., 0).
StateVec dfe_full(const Params& pr);

struct NoEndemicEquilibrium : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Endemic equilibrium (S*, I_H*, A*, C_H*) of the HIV-only sub-model.
// Exists iff r1 evaluated at the disease-free population Lambda/mu exceeds 1
// (throws NoEndemicEquilibrium otherwise). The equilibrium force of
// infection solves the scalar consistency equation, which equals
// mu*(R1 - 1) with R1 taken at the endemic population itself, so
// rhs_hiv_only vanishes at the returned point to round-off.
Vec4 endemic_equilibrium_hiv(const Params& pr);

// HIV transmission rate at which r1 crosses 1 (at the disease-free
// population): substituting beta2 = beta_star makes r1(pr, Lambda/mu) = 1.
double beta_star(const Params& pr);

using Matrix4 = std::array<std::array<double, 4>, 4>;

// The analytic HIV-only Jacobian at the disease-free equilibrium, in the
// published closed form, rows/columns ordered (S, I_H, A, C_H). Note: the
// closed form carries (3,3) = C2 and (4,4) = C3 with positive sign, whereas
// differentiating the system yields -C2 and -C3 there; stability
// classification therefore always uses the numerically differentiated
// Jacobian (classify_stability), never this matrix.
Matrix4 jacobian_hiv_dfe(const Params& pr, double N);
// Same, at the disease-free population N = Lambda/mu.
Matrix4 jacobian_hiv_dfe(const Params& pr);

enum class Stability { Stable, Unstable, Marginal };

const char* to_string(Stability s);

struct StabilityReport {
  std::vector<double> point;
  std::vector<std::complex<double>> eigenvalues;
  double max_real_part = 0.0;
  Stability classification = Stability::Marginal;
};

// Autonomous vector field of arbitrary (fixed) dimension.
using AutonomousRhs =
    std::function<void(std::span<const double> x, std::span<double> dxdt)>;

// Central-difference Jacobian with per-coordinate step 1e-6*max(1, |x_i|).
// Throws std::runtime_error if an evaluation produces non-finite entries.
std::vector<std::vector<double>> numerical_jacobian(const AutonomousRhs& rhs,
                                                    std::span<const double> point);

// Eigenvalues of the numerical Jacobian at `point`. Classification: Unstable
// if some Re > tol, Stable if every Re < -tol, Marginal otherwise.
StabilityReport classify_stability(const AutonomousRhs& rhs,
                                   std::span<const double> point,
                                   double tol = 1e-7);

// rhs_uncontrolled as an 11-dimensional autonomous field (no round-off
// clamping, suitable for finite differencing).
AutonomousRhs full_model_field(const Params& pr);

// rhs_hiv_only / rhs_tb_only as 4-dimensional autonomous fields.
AutonomousRhs hiv_only_field(const Params& pr);
AutonomousRhs tb_only_field(const Params& pr);

}  // namespace tbhiv
