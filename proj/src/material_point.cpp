#include "homeo/material_point.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace homeo {

void LoadingProtocol::validate() const {
  if (times.empty()) throw InvalidInput("protocol: no time points");
  if (c.size() != times.size()) throw InvalidInput("protocol: C series length differs from time grid");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i])) throw InvalidInput("protocol: non-finite time at index " + std::to_string(i));
    if (i > 0 && !(times[i] > times[i - 1]))
      throw InvalidInput("protocol: times not strictly increasing at index " + std::to_string(i));
    for (double v : c[i])
      if (!(v > 0.0) || !std::isfinite(v))
        throw InvalidInput("protocol: C component not positive at index " + std::to_string(i));
  }
  bool measured = false;
  for (auto m : mask) measured = measured || m == Constraint::Measured;
  if (!measured) throw InvalidInput("protocol: no measured direction");
}

namespace {

using D1 = Dual<1>;

struct Eval {
  double r = std::numeric_limits<double>::quiet_NaN();
  double j = std::numeric_limits<double>::quiet_NaN();
  bool ok = false;
};

class ResidualFunction {
 public:
  ResidualFunction(const SymTensor3& c_next, const GrowthState& state, const SymTensor3& flow, double dt,
                   const EnergyWeights& ew, const PotentialWeights& pw)
      : c_(tensor_cast<D1>(c_next)),
        state_{tensor_cast<D1>(state.cg), tensor_cast<D1>(state.ug), tensor_cast<D1>(state.ug_inv)},
        flow_(tensor_cast<D1>(flow)),
        dt_(dt),
        ew_(weights_cast<D1>(ew)),
        pw_(weights_cast<D1>(pw)) {}

  Eval operator()(double gamma) const {
    try {
      const D1 r = residual(D1::variable(gamma, 0), c_, state_, flow_, dt_, ew_, pw_);
      if (!isfinite(r)) return {};
      return {r.v, r.d[0], true};
    } catch (const RangeError&) {
      return {};
    } catch (const DomainError&) {
      return {};
    } catch (const InvalidInput&) {
      return {};
    }
  }

 private:
  BasicSymTensor3<D1> c_;
  BasicGrowthState<D1> state_;
  BasicSymTensor3<D1> flow_;
  double dt_;
  BasicEnergyWeights<D1> ew_;
  BasicPotentialWeights<D1> pw_;
};

bool opposite(double a, double b) { return (a < 0.0) != (b < 0.0); }

/// Grows a bracket geometrically from γ̂ = 0 in both directions, then bisects.
NewtonResult bisect(const ResidualFunction& f, const Eval& at_zero, double eps, bool singular) {
  double lo = 0.0, hi = 0.0;
  double r_lo = at_zero.r;
  bool found = false;
  bool up = true, down = true;
  for (int k = 0; k < 80 && !found && (up || down); ++k) {
    const double h = 1e-3 * std::ldexp(1.0, k);
    for (double sign : {1.0, -1.0}) {
      bool& alive = sign > 0 ? up : down;
      if (!alive || found) continue;
      const Eval e = f(sign * h);
      if (!e.ok) {
        alive = false;
        continue;
      }
      if (std::abs(e.r) < eps) {
        return {sign * h, e.r, e.j, 0, true};
      }
      if (opposite(e.r, at_zero.r)) {
        hi = sign * h;
        found = true;
      }
    }
  }
  if (!found) {
    if (singular) throw SingularJacobian("newton_solve: zero Jacobian and no sign change of the residual");
    throw ConvergenceError("newton_solve: no bracket for the residual root", at_zero.r);
  }
  int iters = 0;
  double mid = 0.5 * (lo + hi);
  Eval em = f(mid);
  for (; iters < 400; ++iters) {
    mid = 0.5 * (lo + hi);
    em = f(mid);
    if (!em.ok) throw ConvergenceError("newton_solve: residual not finite inside bracket", r_lo);
    if (std::abs(em.r) < eps || mid == lo || mid == hi) break;
    if (opposite(em.r, r_lo)) {
      hi = mid;
    } else {
      lo = mid;
      r_lo = em.r;
    }
  }
  if (!(std::abs(em.r) < eps)) throw ConvergenceError("newton_solve: bisection stalled", em.r);
  return {mid, em.r, em.j, iters + 1, true};
}

}  // namespace

NewtonResult newton_solve(const SymTensor3& c_next, const GrowthState& state_n, const SymTensor3& flow_n, double dt,
                          const EnergyWeights& ew, const PotentialWeights& pw, double eps, int max_iter) {
  if (!(dt > 0.0)) throw InvalidInput("newton_solve: dt must be positive");
  const ResidualFunction f(c_next, state_n, flow_n, dt, ew, pw);
  const Eval at_zero = f(0.0);
  if (!at_zero.ok) throw DomainError("newton_solve: residual undefined at gamma_hat = 0");

  double gamma = 0.0;
  Eval e = at_zero;
  int iters = 0;
  while (!(std::abs(e.r) < eps)) {
    if (iters >= max_iter)
      throw ConvergenceError("newton_solve: no convergence after " + std::to_string(max_iter) + " iterations", e.r);
    if (e.j == 0.0 || !std::isfinite(e.j)) return bisect(f, at_zero, eps, e.j == 0.0);
    const double next = gamma - e.r / e.j;
    const Eval en = f(next);
    ++iters;
    if (!en.ok) return bisect(f, at_zero, eps, false);
    gamma = next;
    e = en;
  }
  // One extra correction drives the root to round-off so that derivatives of
  // the rollout with respect to the weights are smooth.
  if (e.j != 0.0 && std::isfinite(e.j)) {
    const double next = gamma - e.r / e.j;
    const Eval en = f(next);
    if (en.ok && std::abs(en.r) <= std::abs(e.r)) {
      gamma = next;
      e = en;
    }
  }
  return {gamma, e.r, e.j, iters, false};
}

Trajectory simulate(const LoadingProtocol& protocol, const EnergyWeights& ew, const PotentialWeights& pw,
                    const SolverOptions& opts) {
  validate(ew);
  validate(pw);
  return simulate<double>(protocol, ew, pw, opts);
}

GrowthInvariants growth_invariants(const SymTensor3& ug) {
  if (!is_spd(ug)) throw DomainError("growth_invariants: U_g is not positive definite");
  const double j = det(ug);
  const double tr = trace(ug);
  const double tr_sq = ddot(ug, ug);
  const double cof = 0.5 * (tr * tr - tr_sq);
  const double j13 = std::cbrt(j);
  return {tr / j13, cof / (j13 * j13), j};
}

}  // namespace homeo
