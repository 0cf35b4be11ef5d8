#include "homeo/presets.hpp"

#include <cmath>

namespace homeo::presets {

namespace {

WeightSet make(double w01, double w02, double w11, double w12, double s3, double s4, double t3, double t4,
               double eta) {
  WeightSet w;
  w.energy = {w01, w02, w11, w12};
  w.potential.sigma3 = s3;
  w.potential.sigma4 = s4;
  w.potential.tau3 = t3;
  w.potential.tau4 = t4;
  w.potential.eta_hat = eta;
  return w;
}

}  // namespace

WeightSet stripe_l2() {
  return make(1.2036339, 0.07181329, 1.2016658, 0.3978735, 3.980602e-08, 0.03391496, 7.274134e-08, 0.03408322,
              0.26240048);
}

WeightSet stripe_l1() {
  return make(1.6990947, 0.10240719, -3.5541244, 0.0, 6.075556e-08, 0.02765466, 3.5020828e-09, 0.0, 0.43815053);
}

WeightSet cross_l2() {
  return make(3.1134224, 0.36447218, -0.2970376, 0.0, 0.0, 0.01457657, 9.1654684e-08, 0.01357422, 0.49805772);
}

WeightSet cross_l1() {
  return make(2.168842, 0.27726683, 1.3061364, 0.0, 6.806422e-08, 0.01459178, 2.7375126e-08, 0.0012281,
              0.27317414);
}

LoadingProtocol step_protocol(double dt, double t_end, double t_switch, const Vec3<double>& loaded,
                              const ConstraintMask& mask) {
  LoadingProtocol p;
  p.mask = mask;
  const long n = std::lround(t_end / dt);
  for (long k = 0; k <= n; ++k) {
    const double t = double(k) * dt;
    p.times.push_back(t);
    p.c.push_back(t > t_switch + 1e-9 ? loaded : Vec3<double>{1.0, 1.0, 1.0});
  }
  return p;
}

LoadingProtocol stripe(double dt, double t_end, double c11) {
  return step_protocol(dt, t_end, kStripePerturbationTime, {c11, 1.0, 1.0},
                       {Constraint::Measured, Constraint::ZeroStress, Constraint::ZeroStress});
}

LoadingProtocol cross(double dt, double t_end, const Vec3<double>& loaded) {
  return step_protocol(dt, t_end, kCrossPerturbationTime, loaded,
                       {Constraint::Measured, Constraint::Measured, Constraint::ZeroStress});
}

}  // namespace homeo::presets
