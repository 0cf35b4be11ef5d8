#include "homeo/tensor.hpp"

#include <cmath>
#include <numbers>

namespace homeo {
namespace {

Vec3<double> cross(const Vec3<double>& a, const Vec3<double>& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double dot(const Vec3<double>& a, const Vec3<double>& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

/// Unit null vector of a - lambda I from the largest cross product of its rows.
bool null_vector(const SymTensor3& a, double lambda, Vec3<double>& out) {
  const Vec3<double> r0{a(0, 0) - lambda, a(0, 1), a(0, 2)};
  const Vec3<double> r1{a(1, 0), a(1, 1) - lambda, a(1, 2)};
  const Vec3<double> r2{a(2, 0), a(2, 1), a(2, 2) - lambda};
  const std::array<Vec3<double>, 3> c{cross(r0, r1), cross(r0, r2), cross(r1, r2)};
  int best = 0;
  double best_n = dot(c[0], c[0]);
  for (int k = 1; k < 3; ++k) {
    const double n = dot(c[k], c[k]);
    if (n > best_n) {
      best_n = n;
      best = k;
    }
  }
  if (!(best_n > 0.0)) return false;
  const double inv = 1.0 / std::sqrt(best_n);
  out = {c[best][0] * inv, c[best][1] * inv, c[best][2] * inv};
  return true;
}

bool eig_cardano(const SymTensor3& a, Spectral3& s) {
  const double scale = norm(a);
  const double p1 = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
  const double q = trace(a) / 3.0;
  const double d0 = a(0, 0) - q, d1 = a(1, 1) - q, d2 = a(2, 2) - q;
  const double p2 = d0 * d0 + d1 * d1 + d2 * d2 + 2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  if (!(p > 1e-8 * scale)) return false;
  const SymTensor3 b = (a - SymTensor3::identity() * q) * (1.0 / p);
  const double r = std::clamp(det(b) / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double l1 = q + 2.0 * p * std::cos(phi);
  const double l3 = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
  const double l2 = 3.0 * q - l1 - l3;

  // Close eigenvalues make the cross-product vectors inaccurate.
  if (l1 - l2 < 1e-4 * scale || l2 - l3 < 1e-4 * scale) return false;

  Vec3<double> v1, v3;
  if (!null_vector(a, l1, v1) || !null_vector(a, l3, v3)) return false;
  const double proj = dot(v1, v3);
  for (int k = 0; k < 3; ++k) v3[k] -= proj * v1[k];
  const double n3 = std::sqrt(dot(v3, v3));
  if (!(n3 > 0.5)) return false;
  for (auto& x : v3) x /= n3;
  const Vec3<double> v2 = cross(v3, v1);

  s.values = {l1, l2, l3};
  s.vectors = {v1, v2, v3};
  s.axis_aligned = false;
  s.group = {0, 1, 2};

  // Accept only if the decomposition reproduces the input to near round-off.
  const SymTensor3 rec = s.assemble(s.values);
  return norm(rec - a) <= 1e-13 * scale;
}

}  // namespace

Spectral3 eig_sym(const SymTensor3& a) {
  detail::require_finite(a, "eig_sym");
  if (a.is_diagonal()) return detail::eig_diagonal(a);
  Spectral3 s;
  if (eig_cardano(a, s)) {
    detail::assign_groups(s, norm(a));
    return s;
  }
  return detail::eig_jacobi(a);
}

}  // namespace homeo
