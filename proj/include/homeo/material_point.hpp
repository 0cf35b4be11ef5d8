#pragma once

// Recurrent material-point update for growth and remodeling.
//
// Each step solves the scaled homeostatic residual
//   r̂(γ̂) = φ̂(Σ̄_{n+1}(γ̂)) - 1 - γ̂ ŵη = 0
// for the growth multiplier and advances the growth tensor with the explicit
// exponential integrator
//   C_g,n+1 = U_g,n exp(2 Δt γ̂ ∂φ̂/∂Σ̄|_n) U_g,n.
//
// The templated entry points run with double or with Dual<N> weights; the
// Newton solve itself always runs in double and the tangent of γ̂ is recovered
// from the implicit function theorem.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <type_traits>
#include <utility>
#include <vector>

#include "homeo/dual.hpp"
#include "homeo/energy.hpp"
#include "homeo/errors.hpp"
#include "homeo/potential.hpp"
#include "homeo/tensor.hpp"

namespace homeo {

enum class Constraint { Measured, ZeroStress };
using ConstraintMask = std::array<Constraint, 3>;

template <class T>
struct BasicGrowthState {
  BasicSymTensor3<T> cg = BasicSymTensor3<T>::identity();
  BasicSymTensor3<T> ug = BasicSymTensor3<T>::identity();
  BasicSymTensor3<T> ug_inv = BasicSymTensor3<T>::identity();

  static BasicGrowthState virgin() { return {}; }
  static BasicGrowthState from_cg(const BasicSymTensor3<T>& cg) {
    const auto root = spd_root(cg);
    return {cg, root.root, root.inv_root};
  }
};

using GrowthState = BasicGrowthState<double>;

/// Prescribed coaxial deformation history.
struct LoadingProtocol {
  std::vector<double> times;           ///< hours, strictly increasing
  std::vector<Vec3<double>> c;         ///< (C11, C22, C33) per time
  ConstraintMask mask{Constraint::Measured, Constraint::ZeroStress, Constraint::ZeroStress};

  std::size_t size() const { return times.size(); }
  SymTensor3 c_at(std::size_t i) const { return SymTensor3::diagonal(c[i][0], c[i][1], c[i][2]); }

  /// Throws InvalidInput when an invariant is violated.
  void validate() const;
};

template <class T>
struct BasicStepResult {
  BasicSymTensor3<T> s_reported;  ///< second PK stress, zero-stress directions nulled
  BasicSymTensor3<T> sigma_bar;
  T gamma_hat{0.0};
  T phi_hat_value{0.0};
  double residual = 0.0;
  int newton_iters = 0;
};

using StepResult = BasicStepResult<double>;

template <class T>
struct BasicTrajectory {
  std::vector<double> times;
  std::vector<BasicStepResult<T>> steps;
  std::vector<BasicGrowthState<T>> states;

  std::size_t size() const { return times.size(); }
};

using Trajectory = BasicTrajectory<double>;

struct SolverOptions {
  double eps = 1e-8;
  int max_iter = 30;
  /// Sub-steps longer intervals with linearly interpolated C; 0 disables.
  double max_dt = 0.0;
};

struct NewtonResult {
  double gamma_hat = 0.0;
  double residual = 0.0;
  double jacobian = 0.0;  ///< ∂r̂/∂γ̂ at the returned root
  int iterations = 0;
  bool bisection = false;
};

/// r̂(γ̂) with the flow direction frozen at the previous step.
template <class T>
T residual(const T& gamma_hat, const BasicSymTensor3<T>& c_next, const BasicGrowthState<T>& state_n,
           const BasicSymTensor3<T>& flow_n, double dt, const BasicEnergyWeights<T>& ew,
           const BasicPotentialWeights<T>& pw) {
  const auto cg = congruence(state_n.ug, exp_sym(flow_n * (2.0 * dt * gamma_hat)));
  const auto root = spd_root(cg);
  const auto ce = congruence(root.inv_root, c_next);
  return phi_hat(driving_force(ce, ew), pw) - 1.0 - gamma_hat * pw.eta_hat;
}

/// Newton iteration from γ̂ = 0 with an analytic Jacobian. Falls back to a
/// bracketing bisection when an iterate overflows or the Jacobian vanishes.
NewtonResult newton_solve(const SymTensor3& c_next, const GrowthState& state_n, const SymTensor3& flow_n,
                          double dt, const EnergyWeights& ew, const PotentialWeights& pw, double eps = 1e-8,
                          int max_iter = 30);

namespace detail {

template <class T>
BasicStepResult<T> evaluate_state(const BasicSymTensor3<T>& c, const BasicGrowthState<T>& state,
                                  const BasicEnergyWeights<T>& ew, const BasicPotentialWeights<T>& pw,
                                  const ConstraintMask& mask) {
  const auto ce = congruence(state.ug_inv, c);
  const auto resp = energy_response(ce, ew);
  BasicStepResult<T> r;
  r.sigma_bar = resp.spectrum.assemble(resp.sigma);
  r.s_reported = congruence(state.ug_inv, resp.spectrum.assemble(resp.dpsi_dlambda) * T(2.0));
  // Coaxial Lagrange multiplier: S - 2pM with p = S_MM / 2 nulls the component.
  for (int i = 0; i < 3; ++i)
    if (mask[i] == Constraint::ZeroStress) r.s_reported(i, i) = T(0.0);
  r.phi_hat_value = phi_hat(r.sigma_bar, pw);
  return r;
}

}  // namespace detail

/// One constitutive update from state n to n+1 given the driving force Σ̄_n.
template <class T>
std::pair<BasicStepResult<T>, BasicGrowthState<T>> step(const SymTensor3& c_next, const BasicGrowthState<T>& state_n,
                                                        const BasicSymTensor3<T>& sigma_bar_n, double dt,
                                                        const BasicEnergyWeights<T>& ew,
                                                        const BasicPotentialWeights<T>& pw,
                                                        const ConstraintMask& mask,
                                                        const SolverOptions& opts = {}) {
  const auto flow = dphihat_dsigma(sigma_bar_n, pw);
  T gamma(0.0);
  NewtonResult nr;
  if constexpr (std::is_same_v<T, double>) {
    nr = newton_solve(c_next, state_n, flow, dt, ew, pw, opts.eps, opts.max_iter);
    gamma = nr.gamma_hat;
  } else {
    GrowthState s{tensor_cast<double>(state_n.cg), tensor_cast<double>(state_n.ug),
                  tensor_cast<double>(state_n.ug_inv)};
    nr = newton_solve(c_next, s, tensor_cast<double>(flow), dt, weights_cast<double>(ew), weights_cast<double>(pw),
                      opts.eps, opts.max_iter);
    // dγ̂/dθ = -(∂r̂/∂θ) / (∂r̂/∂γ̂) at the converged root.
    const T r = residual(T(nr.gamma_hat), tensor_cast<T>(c_next), state_n, flow, dt, ew, pw);
    gamma = T(nr.gamma_hat);
    for (std::size_t k = 0; k < gamma.d.size(); ++k) gamma.d[k] = -r.d[k] / nr.jacobian;
  }
  const auto cg = congruence(state_n.ug, exp_sym(flow * (2.0 * dt * gamma)));
  const auto next = BasicGrowthState<T>::from_cg(cg);
  auto result = detail::evaluate_state(tensor_cast<T>(c_next), next, ew, pw, mask);
  result.gamma_hat = gamma;
  result.residual = nr.residual;
  result.newton_iters = nr.iterations;
  return {result, next};
}

/// Sequential fold of step() over the protocol from the virgin state.
///
/// The first record is the virgin state evaluated at times[0] with γ̂ = 0.
/// Throws StepFailure carrying the protocol index of the first failing step.
template <class T>
BasicTrajectory<T> simulate(const LoadingProtocol& protocol, const BasicEnergyWeights<T>& ew,
                            const BasicPotentialWeights<T>& pw, const SolverOptions& opts = {}) {
  protocol.validate();
  BasicTrajectory<T> traj;
  traj.times = protocol.times;
  traj.steps.reserve(protocol.size());
  traj.states.reserve(protocol.size());

  auto state = BasicGrowthState<T>::virgin();
  auto first = detail::evaluate_state(tensor_cast<T>(protocol.c_at(0)), state, ew, pw, protocol.mask);
  traj.steps.push_back(first);
  traj.states.push_back(state);
  BasicSymTensor3<T> sigma_bar = first.sigma_bar;

  for (std::size_t n = 1; n < protocol.size(); ++n) {
    const double span = protocol.times[n] - protocol.times[n - 1];
    const int sub = opts.max_dt > 0.0 ? std::max(1, int(std::ceil(span / opts.max_dt - 1e-9))) : 1;
    const double dt = span / sub;
    BasicStepResult<T> last;
    int iters = 0;
    try {
      for (int k = 1; k <= sub; ++k) {
        const double a = double(k) / sub;
        Vec3<double> c;
        for (int i = 0; i < 3; ++i) c[i] = (1.0 - a) * protocol.c[n - 1][i] + a * protocol.c[n][i];
        auto [res, next] = step(SymTensor3::diagonal(c[0], c[1], c[2]), state, sigma_bar, dt, ew, pw,
                                protocol.mask, opts);
        iters += res.newton_iters;
        state = next;
        sigma_bar = res.sigma_bar;
        last = res;
      }
    } catch (const Error& e) {
      throw StepFailure(n, e.what());
    }
    last.newton_iters = iters;
    traj.steps.push_back(last);
    traj.states.push_back(state);
  }
  return traj;
}

Trajectory simulate(const LoadingProtocol& protocol, const EnergyWeights& ew, const PotentialWeights& pw,
                    const SolverOptions& opts = {});

struct GrowthInvariants {
  double i1_tilde;  ///< tr(U_g) / det(U_g)^{1/3}
  double i2_tilde;  ///< tr(cof U_g) / det(U_g)^{2/3}
  double det;
};

GrowthInvariants growth_invariants(const SymTensor3& ug);

}  // namespace homeo
