#pragma once

// Seeded random tensors for property checks.

#include <cmath>
#include <random>

#include "homeo/tensor.hpp"

namespace homeo::sampling {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

/// Entries uniform in [-scale, scale].
inline SymTensor3 symmetric(Rng& rng, double scale = 1.0) {
  SymTensor3 a;
  for (auto& c : a.components()) c = uniform(rng, -scale, scale);
  return a;
}

/// Rotation from a normalized Gaussian quaternion.
inline Mat3<double> rotation(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  double w = n(rng), x = n(rng), y = n(rng), z = n(rng);
  const double s = 1.0 / std::sqrt(w * w + x * x + y * y + z * z);
  w *= s, x *= s, y *= s, z *= s;
  return {{{1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)},
           {2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)},
           {2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)}}};
}

/// Q a Qᵀ
inline SymTensor3 rotate(const Mat3<double>& q, const SymTensor3& a) {
  SymTensor3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) s += q[i][k] * a(k, l) * q[j][l];
      r(i, j) = s;
    }
  return r;
}

/// Q diag(λ) Qᵀ with eigenvalues log-uniform in [lo, hi].
inline SymTensor3 spd(Rng& rng, double lo = 0.5, double hi = 2.0) {
  const auto q = rotation(rng);
  const double a = std::log(lo), b = std::log(hi);
  return rotate(q, SymTensor3::diagonal(std::exp(uniform(rng, a, b)), std::exp(uniform(rng, a, b)),
                                        std::exp(uniform(rng, a, b))));
}

}  // namespace homeo::sampling
