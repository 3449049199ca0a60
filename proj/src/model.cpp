#include "tbhiv/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace tbhiv {

namespace {

double total_or_throw(const StateVec& x) {
  const double N = x.total();
  if (!(N > 0.0))
    throw std::domain_error("model: total population must be positive, got N = " +
                            std::to_string(N));
  return N;
}

void check_controls(double u1, double u2) {
  if (!(u1 >= 0.0) || !(u2 >= 0.0) || !(u1 + u2 <= 1.0))
    throw std::domain_error("model: controls must satisfy u1, u2 >= 0 and u1 + u2 <= 1 (got u1 = " +
                            std::to_string(u1) + ", u2 = " + std::to_string(u2) + ")");
}

}  // namespace

double force_of_infection_tb(const StateVec& x, const Params& pr) {
  const double N = total_or_throw(x);
  return pr.beta1 * (x.I_T() + x.I_TH() + x.A_T()) / N;
}

double force_of_infection_hiv(const StateVec& x, const Params& pr) {
  const double N = total_or_throw(x);
  return pr.beta2 *
         (x.I_H() + x.I_TH() + x.L_TH() + x.R_H() + pr.eta_C * x.C_H() +
          pr.eta_A * (x.A() + x.A_T())) /
         N;
}

DerivVec rhs_controlled(const StateVec& x, double u1, double u2,
                        const Params& pr) {
  check_controls(u1, u2);
  const double lamT = force_of_infection_tb(x, pr);
  const double lamH = force_of_infection_hiv(x, pr);

  DerivVec d;
  d.S() = pr.Lambda - lamT * x.S() - lamH * x.S() - pr.mu * x.S();
  d.L_T() = lamT * x.S() + pr.beta1_prime * lamT * x.R() -
            (pr.k1 + pr.tau1 + pr.mu) * x.L_T();
  d.I_T() =
      pr.k1 * x.L_T() - (pr.tau2 + pr.d_T + pr.mu + pr.delta * lamH) * x.I_T();
  d.R() = pr.tau1 * x.L_T() + pr.tau2 * x.I_T() -
          (pr.beta1_prime * lamT + lamH + pr.mu) * x.R();
  d.I_H() = lamH * x.S() - (pr.rho1 + pr.phi + pr.psi * lamT + pr.mu) * x.I_H() +
            pr.alpha1 * x.A() + lamH * x.R() + pr.omega1 * x.C_H();
  d.A() = pr.rho1 * x.I_H() + pr.omega2 * x.R_H() - pr.alpha1 * x.A() -
          (pr.mu + pr.d_A) * x.A();
  d.C_H() = pr.phi * x.I_H() + u1 * pr.rho2 * x.I_TH() +
            pr.r * pr.tau3 * x.L_TH() - (pr.omega1 + pr.mu) * x.C_H();
  d.L_TH() = pr.beta2_prime * lamT * x.R_H() -
             (pr.k2 + pr.tau3 + pr.mu) * x.L_TH();
  d.I_TH() = pr.delta * lamH * x.I_T() + pr.psi * lamT * x.I_H() +
             pr.alpha2 * x.A_T() + pr.k2 * x.L_TH() -
             (pr.rho2 + pr.mu + pr.d_T) * x.I_TH();
  d.R_H() = u2 * pr.rho2 * x.I_TH() + (1.0 - pr.r) * pr.tau3 * x.L_TH() -
            (pr.beta2_prime * lamT + pr.omega2 + pr.mu) * x.R_H();
  d.A_T() = (1.0 - (u1 + u2)) * pr.rho2 * x.I_TH() -
            (pr.alpha2 + pr.mu + pr.d_TA) * x.A_T();
  return d;
}

DerivVec rhs_uncontrolled(const StateVec& x, const Params& pr) {
  return rhs_controlled(x, pr.p, pr.q, pr);
}

// The sub-models repeat the full-model expression shapes (with the
// complementary compartments zeroed) so the embedding identity holds bit for
// bit, not just to round-off.

Vec4 rhs_hiv_only(const Vec4& x, const Params& pr) {
  const double S = x[0], I_H = x[1], A = x[2], C_H = x[3];
  const double N = S + I_H + A + C_H;
  if (!(N > 0.0))
    throw std::domain_error("rhs_hiv_only: total population must be positive");
  const double lamH = pr.beta2 * (I_H + pr.eta_C * C_H + pr.eta_A * A) / N;
  Vec4 d;
  d[0] = pr.Lambda - lamH * S - pr.mu * S;
  d[1] = lamH * S - (pr.rho1 + pr.phi + pr.mu) * I_H + pr.alpha1 * A +
         pr.omega1 * C_H;
  d[2] = pr.rho1 * I_H - pr.alpha1 * A - (pr.mu + pr.d_A) * A;
  d[3] = pr.phi * I_H - (pr.omega1 + pr.mu) * C_H;
  return d;
}

Vec4 rhs_tb_only(const Vec4& x, const Params& pr) {
  const double S = x[0], L_T = x[1], I_T = x[2], R = x[3];
  const double N = S + L_T + I_T + R;
  if (!(N > 0.0))
    throw std::domain_error("rhs_tb_only: total population must be positive");
  const double lamT = pr.beta1 * I_T / N;
  Vec4 d;
  d[0] = pr.Lambda - lamT * S - pr.mu * S;
  d[1] = lamT * S + pr.beta1_prime * lamT * R - (pr.k1 + pr.tau1 + pr.mu) * L_T;
  d[2] = pr.k1 * L_T - (pr.tau2 + pr.d_T + pr.mu) * I_T;
  d[3] = pr.tau1 * L_T + pr.tau2 * I_T - (pr.beta1_prime * lamT + pr.mu) * R;
  return d;
}

StateVec sanitize_state(StateVec x, double tol_rel) {
  const double N = x.total();
  const double floor_mag = tol_rel * std::fmax(N, 0.0);
  for (int i = 0; i < kCompartments; ++i) {
    if (x[i] < 0.0) {
      if (-x[i] <= floor_mag) {
        x[i] = 0.0;
      } else {
        throw std::domain_error(
            std::string("sanitize_state: compartment ") + kCompartmentNames[i] +
            " is " + std::to_string(x[i]) +
            ", below the round-off tolerance " + std::to_string(-floor_mag));
      }
    }
  }
  return x;
}

double disease_death_rate(const StateVec& x, const Params& pr) {
  return pr.d_T * x.I_T() + pr.d_A * x.A() + pr.d_T * x.I_TH() +
         pr.d_TA * x.A_T();
}

}  // namespace tbhiv
