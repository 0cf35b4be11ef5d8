#include "homeo/energy.hpp"

#include <cmath>
#include <string>

namespace homeo {

void validate(const EnergyWeights& w) {
  const auto check = [](double v, const char* name, bool non_negative) {
    if (!std::isfinite(v)) throw InvalidInput(std::string("energy weight ") + name + " is not finite");
    if (non_negative && v < 0.0) throw InvalidInput(std::string("energy weight ") + name + " must be >= 0");
  };
  check(w.w01, "w01", true);
  check(w.w02, "w02", true);
  check(w.w11, "w11", false);
  check(w.w12, "w12", true);
}

Moduli moduli(const EnergyWeights& w) {
  validate(w);
  Moduli m{};
  m.kappa = 4.0 * w.w02 * w.w01 * w.w01;
  m.mu = 2.0 * w.w12 * w.w11 * w.w11;
  const double denom = 3.0 * m.kappa + m.mu;
  if (denom == 0.0) throw DegenerateMaterial("degenerate material: 3*kappa + mu = 0");
  m.E = 9.0 * m.kappa * m.mu / denom;
  m.nu = (3.0 * m.kappa - 2.0 * m.mu) / (6.0 * m.kappa + 2.0 * m.mu);
  return m;
}

}  // namespace homeo
