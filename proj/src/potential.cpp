#include "homeo/potential.hpp"

#include <cmath>
#include <string>

namespace homeo {

void validate(const PotentialWeights& w) {
  const auto check = [](double v, const char* name) {
    if (!std::isfinite(v)) throw InvalidInput(std::string("potential weight ") + name + " is not finite");
    if (v < 0.0) throw InvalidInput(std::string("potential weight ") + name + " must be >= 0");
  };
  check(w.sigma1, "w_sigma1");
  check(w.sigma2, "w_sigma2");
  check(w.sigma3, "w_sigma3");
  check(w.sigma4, "w_sigma4");
  check(w.tau1, "w_tau1");
  check(w.tau2, "w_tau2");
  check(w.tau3, "w_tau3");
  check(w.tau4, "w_tau4");
  check(w.eta_hat, "w_eta_hat");
}

}  // namespace homeo
