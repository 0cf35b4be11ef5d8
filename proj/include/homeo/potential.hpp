#pragma once

// Scaled pseudo-potential network φ̂ over the principal driving forces σ_i and
// the principal shear stresses τ_i = half-differences of ordered σ_i.
//
// Each family (σ and τ) owns three neuron kinds applied to all three inputs:
//   first neuron   max(-x, 0)  (or |x| in ABS mode)   scale w*1
//   ln cosh        ln cosh(w*3 x)                      scale w*2
//   tension gate   max(x, 0)                           scale w*4
//
// Kink convention: the one-sided derivative from the active side is used,
// d/dx max(x,0) = 1 and d/dx max(-x,0) = -1 at x = 0, d|x|/dx = 0 at x = 0.
// At the virgin state Σ̄ = 0 this gives a non-zero growth direction, which is
// what lets tensional homeostasis build up from an unloaded specimen.

#include <cmath>
#include <numbers>

#include "homeo/tensor.hpp"

namespace homeo {

enum class ActivationMode {
  NegMax,  ///< max(-x, 0) as the first neuron
  Abs,     ///< |x| as the first neuron
};

template <class T>
struct BasicPotentialWeights {
  T sigma1{0.0}, sigma2{0.0}, sigma3{0.0}, sigma4{0.0};
  T tau1{0.0}, tau2{0.0}, tau3{0.0}, tau4{0.0};
  T eta_hat{0.0};  ///< scaled relaxation weight ŵη = wη / σ_hom
  ActivationMode mode = ActivationMode::NegMax;
};

using PotentialWeights = BasicPotentialWeights<double>;

/// Converts scalar type by value; tangents are dropped.
template <class U, class T>
BasicPotentialWeights<U> weights_cast(const BasicPotentialWeights<T>& w) {
  BasicPotentialWeights<U> r;
  r.sigma1 = U(value_of(w.sigma1));
  r.sigma2 = U(value_of(w.sigma2));
  r.sigma3 = U(value_of(w.sigma3));
  r.sigma4 = U(value_of(w.sigma4));
  r.tau1 = U(value_of(w.tau1));
  r.tau2 = U(value_of(w.tau2));
  r.tau3 = U(value_of(w.tau3));
  r.tau4 = U(value_of(w.tau4));
  r.eta_hat = U(value_of(w.eta_hat));
  r.mode = w.mode;
  return r;
}

/// Throws InvalidInput on negative or non-finite weights.
void validate(const PotentialWeights& w);

/// Overflow-safe ln(cosh(y)) = |y| + ln((1 + e^{-2|y|}) / 2).
template <class T>
T ln_cosh(const T& y) {
  using std::abs;
  using std::exp;
  using std::log1p;
  const T a = abs(y);
  return a + log1p(exp(-2.0 * a)) - std::numbers::ln2;
}

template <class T>
struct NeuronValues {
  T first;    ///< max(-x,0) or |x|
  T ln_cosh;  ///< ln cosh(inner_weight x)
  T tension;  ///< max(x,0)
};

template <class T>
NeuronValues<T> activations(const T& x, ActivationMode mode, const T& inner_weight) {
  using std::abs;
  NeuronValues<T> n;
  if (mode == ActivationMode::Abs)
    n.first = abs(x);
  else
    n.first = x < 0.0 ? -x : T(0.0);
  n.ln_cosh = ln_cosh(T(inner_weight * x));
  n.tension = x > 0.0 ? x : T(0.0);
  return n;
}

/// Ordered principal driving forces and principal shear stresses.
template <class T>
struct BasicPrincipalStressState {
  Vec3<T> sigma;  ///< σ1 ≥ σ2 ≥ σ3
  Vec3<T> tau;    ///< ((σ1-σ3)/2, (σ1-σ2)/2, (σ2-σ3)/2)
  BasicSpectral3<T> spectrum;

  BasicSymTensor3<T> projection(int i) const { return spectrum.projection(i); }
};

using PrincipalStressState = BasicPrincipalStressState<double>;

template <class T>
BasicPrincipalStressState<T> principal_state(const BasicSymTensor3<T>& sigma_bar) {
  BasicPrincipalStressState<T> p;
  p.spectrum = eig_sym(sigma_bar);
  p.sigma = p.spectrum.values;
  const auto& s = p.sigma;
  p.tau = {(s[0] - s[2]) * 0.5, (s[0] - s[1]) * 0.5, (s[1] - s[2]) * 0.5};
  return p;
}

namespace detail {

template <class T>
T family_value(const T& x, const T& w1, const T& w2, const T& w3, const T& w4, ActivationMode mode) {
  const auto n = activations(x, mode, w3);
  return w1 * n.first + w2 * n.ln_cosh + w4 * n.tension;
}

template <class T>
T family_slope(const T& x, const T& w1, const T& w2, const T& w3, const T& w4, ActivationMode mode) {
  using std::tanh;
  T first_slope(0.0);
  if (mode == ActivationMode::Abs)
    first_slope = T(x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0));
  else
    first_slope = T(x <= 0.0 ? -1.0 : 0.0);
  const T tension_slope(x >= 0.0 ? 1.0 : 0.0);
  return w1 * first_slope + w2 * w3 * tanh(T(w3 * x)) + w4 * tension_slope;
}

template <class T>
T phi_from_principal(const BasicPrincipalStressState<T>& p, const BasicPotentialWeights<T>& w) {
  T phi(0.0);
  for (int i = 0; i < 3; ++i) {
    phi += family_value(p.sigma[i], w.sigma1, w.sigma2, w.sigma3, w.sigma4, w.mode);
    phi += family_value(p.tau[i], w.tau1, w.tau2, w.tau3, w.tau4, w.mode);
  }
  return phi;
}

}  // namespace detail

/// φ̂(Σ̄); the homeostatic surface is φ̂ = 1.
template <class T>
T phi_hat(const BasicSymTensor3<T>& sigma_bar, const BasicPotentialWeights<T>& w) {
  return detail::phi_from_principal(principal_state(sigma_bar), w);
}

/// ∂φ̂/∂Σ̄ assembled on the individual eigenprojections n_i ⊗ n_i.
///
/// The shear family enters through
///   2 ∂φτ/∂Σ̄ = φτ,1 (P1 - P3) + φτ,2 (P1 - P2) + φτ,3 (P2 - P3),
/// which is trace free. Equal eigenvalues keep their index order from the
/// descending sort.
template <class T>
BasicSymTensor3<T> dphihat_dsigma(const BasicSymTensor3<T>& sigma_bar, const BasicPotentialWeights<T>& w) {
  const auto p = principal_state(sigma_bar);
  Vec3<T> ds, dt;
  for (int i = 0; i < 3; ++i) {
    ds[i] = detail::family_slope(p.sigma[i], w.sigma1, w.sigma2, w.sigma3, w.sigma4, w.mode);
    dt[i] = detail::family_slope(p.tau[i], w.tau1, w.tau2, w.tau3, w.tau4, w.mode);
  }
  const Vec3<T> coeff{ds[0] + 0.5 * (dt[0] + dt[1]), ds[1] + 0.5 * (dt[2] - dt[1]),
                      ds[2] - 0.5 * (dt[0] + dt[2])};
  return p.spectrum.assemble(coeff);
}

}  // namespace homeo
