#pragma once

#include <array>
#include <cmath>
#include <span>

namespace tbhiv {

inline constexpr int kCompartments = 11;

// Compartment order used everywhere (state vectors, costates, CSV columns,
// Jacobian rows/columns).
enum Compartment : int {
  cS = 0,    // susceptible
  cLT = 1,   // latent TB
  cIT = 2,   // active TB
  cR = 3,    // TB-recovered
  cIH = 4,   // HIV-positive, pre-AIDS
  cA = 5,    // AIDS
  cCH = 6,   // HIV-positive under treatment (chronic)
  cLTH = 7,  // latent TB + HIV
  cITH = 8,  // active TB + HIV
  cRH = 9,   // TB-recovered + HIV
  cAT = 10,  // AIDS + active TB
};

// Population state of the eleven-compartment model. Components are
// individuals; the same layout carries derivatives (individuals/year)
// and costates.
struct StateVec {
  std::array<double, kCompartments> c{};

  StateVec() = default;
  StateVec(double S, double L_T, double I_T, double R, double I_H, double A,
           double C_H, double L_TH, double I_TH, double R_H, double A_T)
      : c{S, L_T, I_T, R, I_H, A, C_H, L_TH, I_TH, R_H, A_T} {}

  static StateVec from_span(std::span<const double> v) {
    StateVec x;
    for (int i = 0; i < kCompartments; ++i) x.c[i] = v[i];
    return x;
  }

  double& operator[](int i) { return c[i]; }
  double operator[](int i) const { return c[i]; }

  double& S() { return c[cS]; }
  double& L_T() { return c[cLT]; }
  double& I_T() { return c[cIT]; }
  double& R() { return c[cR]; }
  double& I_H() { return c[cIH]; }
  double& A() { return c[cA]; }
  double& C_H() { return c[cCH]; }
  double& L_TH() { return c[cLTH]; }
  double& I_TH() { return c[cITH]; }
  double& R_H() { return c[cRH]; }
  double& A_T() { return c[cAT]; }

  double S() const { return c[cS]; }
  double L_T() const { return c[cLT]; }
  double I_T() const { return c[cIT]; }
  double R() const { return c[cR]; }
  double I_H() const { return c[cIH]; }
  double A() const { return c[cA]; }
  double C_H() const { return c[cCH]; }
  double L_TH() const { return c[cLTH]; }
  double I_TH() const { return c[cITH]; }
  double R_H() const { return c[cRH]; }
  double A_T() const { return c[cAT]; }

  // Total population N. Fixed left-to-right summation order so that the full
  // model and the sub-models agree bit for bit when the complementary
  // compartments are zero.
  double total() const {
    double n = c[0];
    for (int i = 1; i < kCompartments; ++i) n += c[i];
    return n;
  }

  bool all_finite() const {
    for (double v : c)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

// Time-derivative of a StateVec, individuals/year.
using DerivVec = StateVec;

// Costate vector paired component-wise with StateVec.
using AdjointVec = StateVec;

// Compartment labels in storage order (CSV headers, reports).
inline constexpr std::array<const char*, kCompartments> kCompartmentNames = {
    "S", "L_T", "I_T", "R", "I_H", "A", "C_H", "L_TH", "I_TH", "R_H", "A_T"};

}  // namespace tbhiv
