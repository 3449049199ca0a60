#pragma once

namespace tbhiv {

// Model parameter table. Rates are per year, modification parameters are
// dimensionless. Defaults are the baseline table used throughout the test
// scenarios (beta1 = 0.6, beta2 = 0.1 for the reference epidemic level).
//
// Validation happens when a Params is assembled (scenario load, CLI
// overrides), never inside the right-hand-side evaluations.
struct Params {
  double Lambda = 430.0;     // recruitment rate into S
  double mu = 1.0 / 70.0;    // natural death rate
  double beta1 = 0.6;        // TB transmission rate
  double beta2 = 0.1;        // HIV transmission rate
  double eta_C = 0.9;        // infectiousness factor of C_H (<= 1)
  double eta_A = 1.05;       // infectiousness factor of A, A_T (>= 1)
  double k1 = 0.5;           // L_T -> I_T progression
  double tau1 = 2.0;         // TB treatment rate for L_T
  double tau2 = 1.0;         // TB treatment rate for I_T
  double beta1_prime = 0.9;  // TB reinfection factor for R (<= 1)
  double d_T = 0.1;          // TB-induced death rate
  double delta = 1.03;       // HIV susceptibility factor of I_T (>= 1)
  double psi = 1.07;         // TB susceptibility factor of I_H (>= 1)
  double phi = 1.0;          // HIV treatment rate for I_H
  double rho1 = 0.1;         // I_H -> A progression
  double alpha1 = 0.33;      // AIDS treatment rate
  double omega1 = 0.09;      // C_H -> I_H return rate
  double d_A = 0.3;          // AIDS-induced death rate
  double rho2 = 1.0;         // exit rate from I_TH
  double p = 0.1;            // fraction of I_TH on TB+HIV treatment
  double q = 0.3;            // fraction of I_TH on TB treatment only
  double tau3 = 2.0;         // exit rate from L_TH
  double k2 = 0.65;          // L_TH -> I_TH progression
  double r = 0.3;            // fraction of L_TH on TB+HIV treatment
  double beta2_prime = 1.1;  // TB reinfection factor for R_H (>= 1)
  double omega2 = 0.15;      // R_H -> A progression
  double alpha2 = 0.33;      // HIV treatment rate for A_T
  double d_TA = 0.33;        // AIDS-TB-induced death rate

  // Throws std::invalid_argument naming the offending field when a value is
  // negative, a modification parameter is outside its admissible range, or
  // the treatment fractions violate p + q <= 1 or 0 <= r <= 1.
  void validate() const;
};

}  // namespace tbhiv
