#pragma once

// Published weight sets and loading protocols of the stripe and cross
// specimens.

#include "homeo/energy.hpp"
#include "homeo/material_point.hpp"
#include "homeo/potential.hpp"

namespace homeo::presets {

struct WeightSet {
  EnergyWeights energy;
  PotentialWeights potential;
};

/// Stripe specimen, L2-regularized discovery.
WeightSet stripe_l2();
/// Stripe specimen, L1-regularized discovery (zero shear modulus).
WeightSet stripe_l1();
/// Cross specimen, L2-regularized discovery.
WeightSet cross_l2();
/// Cross specimen, L1-regularized discovery.
WeightSet cross_l1();

inline constexpr double kStripeCompression = 0.99505347;
inline constexpr double kStripeStretch = 1.0037114;
inline constexpr double kStripePerturbationTime = 17.0;
inline constexpr double kCrossPerturbationTime = 27.0;
inline constexpr Vec3<double> kCrossBiaxialStretch{1.0044529, 1.0041029, 1.0};
inline constexpr Vec3<double> kCrossBiaxialCompression{0.99416188, 0.99379366, 1.0};
inline constexpr Vec3<double> kCrossSemiStretch{1.0046307, 1.0, 1.0};
inline constexpr Vec3<double> kCrossSemiCompression{0.99408145, 1.0, 1.0};

/// Uniform grid on [0, t_end] with C = I up to t_switch and `loaded` after.
/// Directions flagged measured per `mask`.
LoadingProtocol step_protocol(double dt, double t_end, double t_switch, const Vec3<double>& loaded,
                              const ConstraintMask& mask);

/// Uniaxial stripe: S11 measured, lateral directions stress free.
LoadingProtocol stripe(double dt = 0.1, double t_end = 40.0, double c11 = kStripeCompression);

/// Cross specimen: S11 and S22 measured, thickness direction stress free.
LoadingProtocol cross(double dt = 0.1, double t_end = 60.0, const Vec3<double>& loaded = kCrossBiaxialStretch);

}  // namespace homeo::presets
