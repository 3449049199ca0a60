#include "tbhiv/analysis.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tbhiv {

namespace {

// Shorthands used by every closed form below.
struct HivConstants {
  double C1, C2, C3;
  double Q;  // C3*(C2 + eta_A*rho1) + eta_C*phi*C2
  double K;  // mu*(C3*(rho1 + C2) + C2*phi + rho1*d_A) + rho1*omega1*d_A
  double P;  // C2*C3 + rho1*C3 + phi*C2
};

HivConstants hiv_constants(const Params& pr) {
  HivConstants k;
  k.C1 = pr.rho1 + pr.phi + pr.mu;
  k.C2 = pr.alpha1 + pr.mu + pr.d_A;
  k.C3 = pr.omega1 + pr.mu;
  k.Q = k.C3 * (k.C2 + pr.eta_A * pr.rho1) + pr.eta_C * pr.phi * k.C2;
  k.K = pr.mu * (k.C3 * (pr.rho1 + k.C2) + k.C2 * pr.phi + pr.rho1 * pr.d_A) +
        pr.rho1 * pr.omega1 * pr.d_A;
  k.P = k.C2 * k.C3 + pr.rho1 * k.C3 + pr.phi * k.C2;
  return k;
}

void check_population(const Params& pr, double N) {
  if (!(N > 0.0)) throw std::domain_error("analysis: N must be positive");
  if (!(pr.mu > 0.0)) throw std::domain_error("analysis: mu must be positive");
}

}  // namespace

double r1(const Params& pr, double N) {
  check_population(pr, N);
  const HivConstants k = hiv_constants(pr);
  const double den = N * pr.mu * k.K;
  if (den == 0.0) throw std::domain_error("r1: zero denominator");
  return pr.beta2 * pr.Lambda * k.Q / den;
}

double r2(const Params& pr, double N) {
  check_population(pr, N);
  const double d1 = pr.mu + pr.d_T + pr.tau2;
  const double d2 = pr.mu + pr.k1 + pr.tau1;
  if (d1 == 0.0 || d2 == 0.0) throw std::domain_error("r2: zero denominator");
  return (pr.Lambda / (pr.mu * N)) * (pr.beta1 / d1) * (pr.k1 / d2);
}

ReproductionNumbers reproduction_numbers(const Params& pr, double N) {
  ReproductionNumbers rn;
  rn.r1 = r1(pr, N);
  rn.r2 = r2(pr, N);
  rn.r0 = std::max(rn.r1, rn.r2);
  return rn;
}

StateVec dfe_full(const Params& pr) {
  if (!(pr.mu > 0.0)) throw std::domain_error("dfe_full: mu must be positive");
  StateVec x;
  x.S() = pr.Lambda / pr.mu;
  return x;
}

Vec4 endemic_equilibrium_hiv(const Params& pr) {
  if (!(pr.mu > 0.0) || !(pr.Lambda > 0.0))
    throw std::domain_error("endemic_equilibrium_hiv: need Lambda, mu > 0");
  const HivConstants k = hiv_constants(pr);
  if (k.K == 0.0 || k.P == 0.0)
    throw std::domain_error("endemic_equilibrium_hiv: zero denominator");
  // r1 at the disease-free population Lambda/mu; the equilibrium exists iff
  // this exceeds 1.
  const double r1_dfe = pr.beta2 * k.Q / k.K;
  if (!(r1_dfe > 1.0))
    throw NoEndemicEquilibrium(
        "endemic_equilibrium_hiv: r1 at the disease-free population is " +
        std::to_string(r1_dfe) + " <= 1");
  // Equilibrium force of infection. Solves the scalar consistency condition
  // beta2*(I_H + eta_A*A + eta_C*C_H) = lam*N at the equilibrium point;
  // equivalently mu*(R1 - 1) with R1 evaluated at the endemic population.
  const double lam = (pr.beta2 * k.Q - k.K) / k.P;
  const double D = -(lam + pr.mu) * k.K;
  Vec4 eq;
  eq[0] = pr.Lambda / (lam + pr.mu);
  eq[1] = -lam * pr.Lambda * k.C2 * k.C3 / D;
  eq[2] = -pr.rho1 * lam * pr.Lambda * k.C3 / D;
  eq[3] = -pr.phi * lam * pr.Lambda * k.C2 / D;
  return eq;
}

double beta_star(const Params& pr) {
  const HivConstants k = hiv_constants(pr);
  if (k.Q == 0.0) throw std::domain_error("beta_star: zero denominator");
  return k.K / k.Q;
}

Matrix4 jacobian_hiv_dfe(const Params& pr, double N) {
  check_population(pr, N);
  const HivConstants k = hiv_constants(pr);
  const double b = pr.beta2 * pr.Lambda / (pr.mu * N);
  // Published closed form; rows/columns (S, I_H, A, C_H). The (3,3)/(4,4)
  // entries carry C2/C3 with positive sign as published, which differs from
  // the derivative structure of the system (see header).
  return Matrix4{{
      {-pr.mu, -b, -pr.eta_A * b, -pr.eta_C * b},
      {0.0, b - k.C1, pr.eta_A * b + pr.alpha1, pr.eta_C * b + pr.omega1},
      {0.0, pr.rho1, k.C2, 0.0},
      {0.0, pr.phi, 0.0, k.C3},
  }};
}

Matrix4 jacobian_hiv_dfe(const Params& pr) {
  if (!(pr.mu > 0.0))
    throw std::domain_error("jacobian_hiv_dfe: mu must be positive");
  return jacobian_hiv_dfe(pr, pr.Lambda / pr.mu);
}

const char* to_string(Stability s) {
  switch (s) {
    case Stability::Stable:
      return "locally-asymptotically-stable";
    case Stability::Unstable:
      return "unstable";
    case Stability::Marginal:
      return "marginal";
  }
  return "unknown";
}

std::vector<std::vector<double>> numerical_jacobian(const AutonomousRhs& rhs,
                                                    std::span<const double> point) {
  const int n = static_cast<int>(point.size());
  std::vector<double> xp(point.begin(), point.end());
  std::vector<double> xm(point.begin(), point.end());
  std::vector<double> fp(n), fm(n);
  std::vector<std::vector<double>> jac(n, std::vector<double>(n));

  for (int j = 0; j < n; ++j) {
    const double step = 1e-6 * std::max(1.0, std::fabs(point[j]));
    xp[j] = point[j] + step;
    xm[j] = point[j] - step;
    rhs(xp, fp);
    rhs(xm, fm);
    xp[j] = point[j];
    xm[j] = point[j];
    for (int i = 0; i < n; ++i) {
      const double deriv = (fp[i] - fm[i]) / (2.0 * step);
      if (!std::isfinite(deriv))
        throw std::runtime_error(
            "numerical_jacobian: non-finite entry at row " + std::to_string(i) +
            ", column " + std::to_string(j));
      jac[i][j] = deriv;
    }
  }
  return jac;
}

StabilityReport classify_stability(const AutonomousRhs& rhs,
                                   std::span<const double> point, double tol) {
  const auto jac = numerical_jacobian(rhs, point);
  const int n = static_cast<int>(point.size());

  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = jac[i][j];

  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("classify_stability: eigenvalue solver failed");

  StabilityReport report;
  report.point.assign(point.begin(), point.end());
  report.eigenvalues.reserve(n);
  double max_re = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const std::complex<double> ev(solver.eigenvalues()[i].real(),
                                  solver.eigenvalues()[i].imag());
    report.eigenvalues.push_back(ev);
    max_re = std::max(max_re, ev.real());
  }
  report.max_real_part = max_re;
  if (max_re > tol)
    report.classification = Stability::Unstable;
  else if (max_re < -tol)
    report.classification = Stability::Stable;
  else
    report.classification = Stability::Marginal;
  return report;
}

AutonomousRhs full_model_field(const Params& pr) {
  return [pr](std::span<const double> x, std::span<double> dxdt) {
    const DerivVec d = rhs_uncontrolled(StateVec::from_span(x), pr);
    for (int i = 0; i < kCompartments; ++i) dxdt[i] = d[i];
  };
}

AutonomousRhs hiv_only_field(const Params& pr) {
  return [pr](std::span<const double> x, std::span<double> dxdt) {
    const Vec4 d = rhs_hiv_only(Vec4{x[0], x[1], x[2], x[3]}, pr);
    for (int i = 0; i < 4; ++i) dxdt[i] = d[i];
  };
}

AutonomousRhs tb_only_field(const Params& pr) {
  return [pr](std::span<const double> x, std::span<double> dxdt) {
    const Vec4 d = rhs_tb_only(Vec4{x[0], x[1], x[2], x[3]}, pr);
    for (int i = 0; i < 4; ++i) dxdt[i] = d[i];
  };
}

}  // namespace tbhiv
