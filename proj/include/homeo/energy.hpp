#pragma once

// Helmholtz free-energy network: a single volumetric neuron and a single
// Ogden neuron acting on the eigenvalues of the co-rotated elastic right
// Cauchy-Green tensor.
//
//   psi = w02 (J^w01 - 1 - w01 ln J) + w12 (sum_j mu_j^w11 - 3),
//   J = det(Ce), mu_j = J^(-1/3) lambda_j.

#include <cmath>

#include "homeo/tensor.hpp"

namespace homeo {

template <class T>
struct BasicEnergyWeights {
  T w01{0.0};  ///< volumetric exponent, >= 0
  T w02{0.0};  ///< volumetric scale [uN/mm^2], >= 0
  T w11{0.0};  ///< Ogden exponent, any sign
  T w12{0.0};  ///< isochoric scale [uN/mm^2], >= 0
};

using EnergyWeights = BasicEnergyWeights<double>;

/// Converts scalar type by value; tangents are dropped.
template <class U, class T>
BasicEnergyWeights<U> weights_cast(const BasicEnergyWeights<T>& w) {
  return {U(value_of(w.w01)), U(value_of(w.w02)), U(value_of(w.w11)), U(value_of(w.w12))};
}

/// Throws InvalidInput if a weight is non-finite or violates its sign constraint.
void validate(const EnergyWeights& w);

/// Principal quantities of the energy at a given Ce.
template <class T>
struct EnergyResponse {
  BasicSpectral3<T> spectrum;  ///< of Ce
  Vec3<T> dpsi_dlambda;        ///< dψ/dλ_i
  Vec3<T> sigma;               ///< principal driving forces 2 λ_i dψ/dλ_i
};

template <class T>
EnergyResponse<T> energy_response(const BasicSymTensor3<T>& ce, const BasicEnergyWeights<T>& w) {
  using std::cbrt;
  using std::pow;
  EnergyResponse<T> r;
  r.spectrum = eig_sym(ce);
  check_spd_spectrum(r.spectrum, "energy");
  const auto& l = r.spectrum.values;
  const T j = l[0] * l[1] * l[2];
  const T jm13 = 1.0 / cbrt(j);
  Vec3<T> mu_pow;
  for (int i = 0; i < 3; ++i) mu_pow[i] = pow(l[i] * jm13, w.w11);
  const T mean_mu_pow = (mu_pow[0] + mu_pow[1] + mu_pow[2]) / 3.0;
  const T vol = w.w02 * w.w01 * (pow(j, w.w01) - 1.0);
  for (int i = 0; i < 3; ++i) {
    // Isochoric chain rule collapses to w12 w11 (mu_i^w11 - mean_j mu_j^w11) / λ_i.
    const T half_sigma = vol + w.w12 * w.w11 * (mu_pow[i] - mean_mu_pow);
    r.sigma[i] = 2.0 * half_sigma;
    r.dpsi_dlambda[i] = half_sigma / l[i];
  }
  r.sigma = r.spectrum.group_average(r.sigma);
  r.dpsi_dlambda = r.spectrum.group_average(r.dpsi_dlambda);
  return r;
}

template <class T>
T psi(const BasicSymTensor3<T>& ce, const BasicEnergyWeights<T>& w) {
  using std::cbrt;
  using std::log;
  using std::pow;
  const auto s = eig_sym(ce);
  check_spd_spectrum(s, "psi");
  const auto& l = s.values;
  const T j = l[0] * l[1] * l[2];
  const T jm13 = 1.0 / cbrt(j);
  T iso = -3.0;
  for (int i = 0; i < 3; ++i) iso += pow(l[i] * jm13, w.w11);
  return w.w02 * (pow(j, w.w01) - 1.0 - w.w01 * log(j)) + w.w12 * iso;
}

template <class T>
BasicSymTensor3<T> dpsi_dce(const BasicSymTensor3<T>& ce, const BasicEnergyWeights<T>& w) {
  const auto r = energy_response(ce, w);
  return r.spectrum.assemble(r.dpsi_dlambda);
}

/// Σ̄ = 2 Ce ∂ψ/∂Ce, coaxial with Ce.
template <class T>
BasicSymTensor3<T> driving_force(const BasicSymTensor3<T>& ce, const BasicEnergyWeights<T>& w) {
  const auto r = energy_response(ce, w);
  return r.spectrum.assemble(r.sigma);
}

/// S = 2 Ug^-1 ∂ψ/∂Ce Ug^-1 with Ce = Ug^-1 C Ug^-1, given Ug^-1 directly.
template <class T>
BasicSymTensor3<T> second_pk_from_inverse(const BasicSymTensor3<T>& c, const BasicSymTensor3<T>& ug_inv,
                                          const BasicEnergyWeights<T>& w) {
  const auto ce = congruence(ug_inv, c);
  return congruence(ug_inv, dpsi_dce(ce, w) * T(2.0));
}

template <class T>
BasicSymTensor3<T> second_pk(const BasicSymTensor3<T>& c, const BasicSymTensor3<T>& ug,
                             const BasicEnergyWeights<T>& w) {
  if (!is_spd(c)) throw DomainError("second_pk: C is not positive definite");
  return second_pk_from_inverse(c, inv_spd(ug), w);
}

/// Initial elastic moduli implied by the energy weights (linearized theory).
struct Moduli {
  double kappa;  ///< bulk modulus
  double mu;     ///< shear modulus
  double E;      ///< Young's modulus
  double nu;     ///< Poisson's ratio
};

/// Throws DegenerateMaterial when 3κ + μ = 0.
Moduli moduli(const EnergyWeights& w);

}  // namespace homeo
