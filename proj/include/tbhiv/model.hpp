#pragma once

#include <array>

#include "tbhiv/params.hpp"
#include "tbhiv/state.hpp"

// Right-hand sides of the TB-HIV/AIDS transmission model.
//
// All functions here are pure: no shared state, safe to call concurrently.
// They evaluate the smooth model equations as written, for any real
// components as long as the total population is positive; trajectory drivers
// are responsible for clamping integration round-off (see sanitize_state).

namespace tbhiv {

// Per-susceptible TB infection rate: beta1 * (I_T + I_TH + A_T) / N.
// Throws std::domain_error when N <= 0.
double force_of_infection_tb(const StateVec& x, const Params& pr);

// Per-susceptible HIV infection rate:
// beta2 * (I_H + I_TH + L_TH + R_H + eta_C*C_H + eta_A*(A + A_T)) / N.
// Throws std::domain_error when N <= 0.
double force_of_infection_hiv(const StateVec& x, const Params& pr);

// Derivatives of the controlled system. u1 and u2 are the fractions of I_TH
// individuals entering combined TB+HIV treatment and TB-only treatment.
// Requires u1 >= 0, u2 >= 0, u1 + u2 <= 1 (the model is well posed on the
// full simplex; the optimal-control layer restricts to u1 + u2 <= 0.95).
// Throws std::domain_error on N <= 0 or inadmissible controls.
DerivVec rhs_controlled(const StateVec& x, double u1, double u2,
                        const Params& pr);

// The fixed-fraction model: identical to rhs_controlled with u1 = pr.p,
// u2 = pr.q.
DerivVec rhs_uncontrolled(const StateVec& x, const Params& pr);

using Vec4 = std::array<double, 4>;

// HIV-only sub-model on (S, I_H, A, C_H), with the force of infection
// restricted to beta2 * (I_H + eta_C*C_H + eta_A*A) / N.
// Embedding the 4-vector into a StateVec (other compartments zero) and
// evaluating rhs_uncontrolled reproduces these components exactly.
Vec4 rhs_hiv_only(const Vec4& x, const Params& pr);

// TB-only sub-model on (S, L_T, I_T, R), with lambda_T = beta1 * I_T / N.
Vec4 rhs_tb_only(const Vec4& x, const Params& pr);

// Clamps components in (-tol_rel*N, 0) -- integration round-off -- to zero
// and throws std::domain_error for anything more negative, which indicates
// solver failure rather than round-off.
StateVec sanitize_state(StateVec x, double tol_rel = 1e-9);

// Disease-induced death rate at state x:
// d_T*I_T + d_A*A + d_T*I_TH + d_TA*A_T (individuals/year). The sum of the
// rhs components equals Lambda - mu*N minus this quantity.
double disease_death_rate(const StateVec& x, const Params& pr);

}  // namespace tbhiv
