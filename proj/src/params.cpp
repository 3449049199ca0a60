#include "tbhiv/params.hpp"

#include <stdexcept>
#include <string>

namespace tbhiv {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("Params: " + what);
}

}  // namespace

void Params::validate() const {
  const std::pair<const char*, double> nonneg[] = {
      {"Lambda", Lambda},   {"mu", mu},       {"beta1", beta1},
      {"beta2", beta2},     {"eta_C", eta_C}, {"eta_A", eta_A},
      {"k1", k1},           {"tau1", tau1},   {"tau2", tau2},
      {"beta1_prime", beta1_prime},           {"d_T", d_T},
      {"delta", delta},     {"psi", psi},     {"phi", phi},
      {"rho1", rho1},       {"alpha1", alpha1},
      {"omega1", omega1},   {"d_A", d_A},     {"rho2", rho2},
      {"p", p},             {"q", q},         {"tau3", tau3},
      {"k2", k2},           {"r", r},         {"beta2_prime", beta2_prime},
      {"omega2", omega2},   {"alpha2", alpha2},
      {"d_TA", d_TA},
  };
  for (const auto& [name, value] : nonneg)
    require(value >= 0.0, std::string(name) + " must be >= 0");

  require(eta_A >= 1.0, "eta_A must be >= 1");
  require(eta_C <= 1.0, "eta_C must be <= 1");
  require(delta >= 1.0, "delta must be >= 1");
  require(psi >= 1.0, "psi must be >= 1");
  require(beta1_prime <= 1.0, "beta1_prime must be <= 1");
  require(beta2_prime >= 1.0, "beta2_prime must be >= 1");
  require(p + q <= 1.0, "p + q must be <= 1");
  require(r <= 1.0, "r must be <= 1");
}

}  // namespace tbhiv
