#pragma once

// Symmetric 3x3 tensors and their spectral algebra.
//
// Every routine is a template over the scalar type so that the constitutive
// update can be evaluated on doubles and on forward-mode duals alike.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numeric>
#include <ostream>

#include "homeo/dual.hpp"
#include "homeo/errors.hpp"

namespace homeo {

template <class T>
using Vec3 = std::array<T, 3>;

template <class T>
using Mat3 = std::array<std::array<T, 3>, 3>;

/// Symmetric second-order tensor in three dimensions.
///
/// Six independent components are stored in the order
/// (a11, a22, a33, a12, a13, a23); symmetry is structural.
template <class T>
class BasicSymTensor3 {
 public:
  BasicSymTensor3() : c_{T(0.0), T(0.0), T(0.0), T(0.0), T(0.0), T(0.0)} {}
  BasicSymTensor3(T a11, T a22, T a33, T a12, T a13, T a23) : c_{a11, a22, a33, a12, a13, a23} {}

  static BasicSymTensor3 zero() { return {}; }
  static BasicSymTensor3 identity() { return diagonal(T(1.0), T(1.0), T(1.0)); }
  static BasicSymTensor3 diagonal(T a11, T a22, T a33) {
    return {a11, a22, a33, T(0.0), T(0.0), T(0.0)};
  }
  /// v ⊗ v
  static BasicSymTensor3 dyad(const Vec3<T>& v) {
    return {v[0] * v[0], v[1] * v[1], v[2] * v[2], v[0] * v[1], v[0] * v[2], v[1] * v[2]};
  }

  static constexpr int index(int i, int j) {
    if (i == j) return i;
    if (i > j) std::swap(i, j);
    return i == 0 ? (j == 1 ? 3 : 4) : 5;
  }

  const T& operator()(int i, int j) const { return c_[index(i, j)]; }
  T& operator()(int i, int j) { return c_[index(i, j)]; }

  const std::array<T, 6>& components() const { return c_; }
  std::array<T, 6>& components() { return c_; }

  bool is_diagonal() const { return is_exact_zero(c_[3]) && is_exact_zero(c_[4]) && is_exact_zero(c_[5]); }

  BasicSymTensor3& operator+=(const BasicSymTensor3& o) {
    for (int k = 0; k < 6; ++k) c_[k] += o.c_[k];
    return *this;
  }
  BasicSymTensor3& operator-=(const BasicSymTensor3& o) {
    for (int k = 0; k < 6; ++k) c_[k] -= o.c_[k];
    return *this;
  }
  template <class S>
  BasicSymTensor3& operator*=(const S& s) {
    for (auto& x : c_) x = x * s;
    return *this;
  }

  friend BasicSymTensor3 operator+(BasicSymTensor3 a, const BasicSymTensor3& b) { return a += b; }
  friend BasicSymTensor3 operator-(BasicSymTensor3 a, const BasicSymTensor3& b) { return a -= b; }
  friend BasicSymTensor3 operator-(BasicSymTensor3 a) {
    for (auto& x : a.c_) x = -x;
    return a;
  }
  friend BasicSymTensor3 operator*(BasicSymTensor3 a, const T& s) { return a *= s; }
  friend BasicSymTensor3 operator*(const T& s, BasicSymTensor3 a) { return a *= s; }

 private:
  std::array<T, 6> c_;
};

using SymTensor3 = BasicSymTensor3<double>;

template <class T>
std::ostream& operator<<(std::ostream& os, const BasicSymTensor3<T>& a) {
  os << "[[" << value_of(a(0, 0)) << ", " << value_of(a(0, 1)) << ", " << value_of(a(0, 2)) << "], ["
     << value_of(a(1, 0)) << ", " << value_of(a(1, 1)) << ", " << value_of(a(1, 2)) << "], ["
     << value_of(a(2, 0)) << ", " << value_of(a(2, 1)) << ", " << value_of(a(2, 2)) << "]]";
  return os;
}

/// Drops tangent information; converts between scalar types by value.
template <class U, class T>
BasicSymTensor3<U> tensor_cast(const BasicSymTensor3<T>& a) {
  const auto& c = a.components();
  return {U(value_of(c[0])), U(value_of(c[1])), U(value_of(c[2])),
          U(value_of(c[3])), U(value_of(c[4])), U(value_of(c[5]))};
}

template <class T>
T trace(const BasicSymTensor3<T>& a) {
  return a(0, 0) + a(1, 1) + a(2, 2);
}

template <class T>
T det(const BasicSymTensor3<T>& a) {
  return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(1, 2)) -
         a(0, 1) * (a(0, 1) * a(2, 2) - a(1, 2) * a(0, 2)) +
         a(0, 2) * (a(0, 1) * a(1, 2) - a(1, 1) * a(0, 2));
}

template <class T>
BasicSymTensor3<T> dev(const BasicSymTensor3<T>& a) {
  const T m = trace(a) / 3.0;
  auto r = a;
  r(0, 0) = r(0, 0) - m;
  r(1, 1) = r(1, 1) - m;
  r(2, 2) = r(2, 2) - m;
  return r;
}

/// Double contraction a : b.
template <class T>
T ddot(const BasicSymTensor3<T>& a, const BasicSymTensor3<T>& b) {
  const auto& x = a.components();
  const auto& y = b.components();
  return x[0] * y[0] + x[1] * y[1] + x[2] * y[2] + 2.0 * (x[3] * y[3] + x[4] * y[4] + x[5] * y[5]);
}

template <class T>
T norm(const BasicSymTensor3<T>& a) {
  using std::sqrt;
  return sqrt(ddot(a, a));
}

template <class T>
bool is_finite(const BasicSymTensor3<T>& a) {
  using std::isfinite;
  for (const auto& x : a.components())
    if (!isfinite(x)) return false;
  return true;
}

template <class T>
Mat3<T> to_matrix(const BasicSymTensor3<T>& a) {
  Mat3<T> m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m[i][j] = a(i, j);
  return m;
}

/// General (non-symmetric) product a·b.
template <class T>
Mat3<T> matmul(const BasicSymTensor3<T>& a, const BasicSymTensor3<T>& b) {
  Mat3<T> m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m[i][j] = a(i, 0) * b(0, j) + a(i, 1) * b(1, j) + a(i, 2) * b(2, j);
  return m;
}

/// x·a·x for symmetric x, a; the result is symmetric by construction.
template <class T>
BasicSymTensor3<T> congruence(const BasicSymTensor3<T>& x, const BasicSymTensor3<T>& a) {
  if (x.is_diagonal() && a.is_diagonal()) {
    return BasicSymTensor3<T>::diagonal(x(0, 0) * a(0, 0) * x(0, 0), x(1, 1) * a(1, 1) * x(1, 1),
                                        x(2, 2) * a(2, 2) * x(2, 2));
  }
  Mat3<T> ax;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) ax[i][j] = a(i, 0) * x(0, j) + a(i, 1) * x(1, j) + a(i, 2) * x(2, j);
  BasicSymTensor3<T> r;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) r(i, j) = x(i, 0) * ax[0][j] + x(i, 1) * ax[1][j] + x(i, 2) * ax[2][j];
  return r;
}

/// Inverse via the adjugate; throws DomainError when numerically singular.
template <class T>
BasicSymTensor3<T> inverse(const BasicSymTensor3<T>& a) {
  using std::abs;
  const T d = det(a);
  const double scale = value_of(norm(a));
  if (!(abs(value_of(d)) > 1e-14 * scale * scale * scale) || !std::isfinite(value_of(d)))
    throw DomainError("inverse: singular tensor");
  BasicSymTensor3<T> r(a(1, 1) * a(2, 2) - a(1, 2) * a(1, 2), a(0, 0) * a(2, 2) - a(0, 2) * a(0, 2),
                       a(0, 0) * a(1, 1) - a(0, 1) * a(0, 1), a(0, 2) * a(1, 2) - a(0, 1) * a(2, 2),
                       a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1), a(0, 1) * a(0, 2) - a(0, 0) * a(1, 2));
  return r * (T(1.0) / d);
}

/// True when all leading principal minors are positive (Sylvester).
template <class T>
bool is_spd(const BasicSymTensor3<T>& a) {
  if (!is_finite(a)) return false;
  const double m1 = value_of(a(0, 0));
  const double m2 = value_of(a(0, 0) * a(1, 1) - a(0, 1) * a(0, 1));
  const double m3 = value_of(det(a));
  return m1 > 0.0 && m2 > 0.0 && m3 > 0.0;
}

template <class T>
BasicSymTensor3<T> inv_spd(const BasicSymTensor3<T>& a) {
  if (!is_spd(a)) throw DomainError("inv_spd: tensor is not symmetric positive definite");
  return inverse(a);
}

// ---------------------------------------------------------------------------
// Spectral decomposition

/// Eigenvalues in descending order with an orthonormal eigenbasis.
///
/// Eigenvalues whose gap is below 1e-10·|a| share a group id; isotropic
/// functions evaluated through apply() use one common value per group.
template <class T>
struct BasicSpectral3 {
  Vec3<T> values;
  std::array<Vec3<T>, 3> vectors;
  std::array<int, 3> group{0, 1, 2};
  /// Input was diagonal: eigenvectors are the exact coordinate axes.
  bool axis_aligned = false;

  BasicSymTensor3<T> projection(int i) const { return BasicSymTensor3<T>::dyad(vectors[i]); }

  /// Sum of the projections of every eigenvalue in the group of `i`.
  BasicSymTensor3<T> group_projection(int i) const {
    BasicSymTensor3<T> p;
    for (int k = 0; k < 3; ++k)
      if (group[k] == group[i]) p += projection(k);
    return p;
  }

  /// Σ coeff_i m_i ⊗ m_i
  BasicSymTensor3<T> assemble(const Vec3<T>& coeff) const {
    if (axis_aligned) {
      BasicSymTensor3<T> r;
      for (int i = 0; i < 3; ++i) {
        const int axis = axis_of(i);
        r(axis, axis) = coeff[i];
      }
      return r;
    }
    BasicSymTensor3<T> r;
    for (int i = 0; i < 3; ++i) r += projection(i) * coeff[i];
    return r;
  }

  /// Replaces per-eigenvalue coefficients by their group means. Axis-aligned
  /// spectra have exact eigenvectors and are left untouched.
  Vec3<T> group_average(const Vec3<T>& coeff) const {
    if (axis_aligned) return coeff;
    Vec3<T> avg = coeff;
    for (int i = 0; i < 3; ++i) {
      T sum(0.0);
      int n = 0;
      for (int k = 0; k < 3; ++k)
        if (group[k] == group[i]) {
          sum += coeff[k];
          ++n;
        }
      avg[i] = sum / double(n);
    }
    return avg;
  }

  /// Isotropic tensor function Σ f(λ_i) m_i ⊗ m_i, averaged over groups.
  template <class F>
  BasicSymTensor3<T> apply(F&& f) const {
    return assemble(group_average(Vec3<T>{f(values[0]), f(values[1]), f(values[2])}));
  }

  BasicSymTensor3<T> reconstruct() const {
    return apply([](const T& x) { return x; });
  }

 private:
  int axis_of(int i) const {
    for (int a = 0; a < 3; ++a)
      if (value_of(vectors[i][a]) != 0.0) return a;
    return i;
  }
};

using Spectral3 = BasicSpectral3<double>;

namespace detail {

/// Stable descending sort of (value, vector) pairs; ties keep input order.
template <class T>
void sort_descending(BasicSpectral3<T>& s) {
  std::array<int, 3> idx{0, 1, 2};
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return value_of(s.values[a]) > value_of(s.values[b]); });
  auto vals = s.values;
  auto vecs = s.vectors;
  for (int i = 0; i < 3; ++i) {
    s.values[i] = vals[idx[i]];
    s.vectors[i] = vecs[idx[i]];
  }
}

template <class T>
void assign_groups(BasicSpectral3<T>& s, double scale) {
  const double tol = 1e-10 * scale;
  s.group = {0, 1, 2};
  for (int i = 1; i < 3; ++i)
    if (value_of(s.values[i - 1]) - value_of(s.values[i]) <= tol) s.group[i] = s.group[i - 1];
}

template <class T>
BasicSpectral3<T> eig_diagonal(const BasicSymTensor3<T>& a) {
  BasicSpectral3<T> s;
  for (int i = 0; i < 3; ++i) {
    s.values[i] = a(i, i);
    s.vectors[i] = {T(0.0), T(0.0), T(0.0)};
    s.vectors[i][i] = T(1.0);
  }
  s.axis_aligned = true;
  sort_descending(s);
  assign_groups(s, value_of(norm(a)));
  return s;
}

/// Cyclic Jacobi rotations; robust for any symmetric input.
template <class T>
BasicSpectral3<T> eig_jacobi(const BasicSymTensor3<T>& in) {
  using std::abs;
  using std::sqrt;
  Mat3<T> a = to_matrix(in);
  Mat3<T> v{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) v[i][j] = T(i == j ? 1.0 : 0.0);
  const double scale = value_of(norm(in));
  constexpr int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  for (int sweep = 0; sweep < 50; ++sweep) {
    double off = 0.0;
    for (const auto& pq : pairs) off += std::abs(value_of(a[pq[0]][pq[1]]));
    if (off <= 1e-300 || off <= 1e-19 * scale) break;
    for (const auto& pq : pairs) {
      const int p = pq[0], q = pq[1];
      const T apq = a[p][q];
      if (value_of(apq) == 0.0) continue;
      if (std::abs(value_of(apq)) <= 1e-19 * scale) {
        a[p][q] = a[q][p] = T(0.0);
        continue;
      }
      const T theta = (a[q][q] - a[p][p]) / (2.0 * apq);
      const double sgn = value_of(theta) >= 0.0 ? 1.0 : -1.0;
      const T t = sgn / (abs(theta) + sqrt(theta * theta + 1.0));
      const T c = 1.0 / sqrt(t * t + 1.0);
      const T s = t * c;
      for (int r = 0; r < 3; ++r) {
        const T arp = a[r][p], arq = a[r][q];
        a[r][p] = c * arp - s * arq;
        a[r][q] = s * arp + c * arq;
      }
      for (int r = 0; r < 3; ++r) {
        const T apr = a[p][r], aqr = a[q][r];
        a[p][r] = c * apr - s * aqr;
        a[q][r] = s * apr + c * aqr;
      }
      for (int r = 0; r < 3; ++r) {
        const T vrp = v[r][p], vrq = v[r][q];
        v[r][p] = c * vrp - s * vrq;
        v[r][q] = s * vrp + c * vrq;
      }
    }
  }
  BasicSpectral3<T> s;
  for (int i = 0; i < 3; ++i) {
    s.values[i] = a[i][i];
    s.vectors[i] = {v[0][i], v[1][i], v[2][i]};
  }
  sort_descending(s);
  assign_groups(s, scale);
  return s;
}

template <class T>
void require_finite(const BasicSymTensor3<T>& a, const char* where) {
  if (!is_finite(a)) throw InvalidInput(std::string(where) + ": non-finite input");
}

}  // namespace detail

/// Closed-form (Cardano) eigensolver with a Jacobi fallback.
Spectral3 eig_sym(const SymTensor3& a);

template <class T>
BasicSpectral3<T> eig_sym(const BasicSymTensor3<T>& a) {
  detail::require_finite(a, "eig_sym");
  if (a.is_diagonal()) return detail::eig_diagonal(a);
  return detail::eig_jacobi(a);
}

/// Matrix exponential of a symmetric tensor; throws RangeError when an
/// eigenvalue exceeds 300.
template <class T>
BasicSymTensor3<T> exp_sym(const BasicSymTensor3<T>& a) {
  using std::exp;
  const auto s = eig_sym(a);
  for (const auto& l : s.values)
    if (value_of(l) > 300.0) throw RangeError("exp_sym: eigenvalue exceeds 300");
  return s.apply([](const T& x) { return exp(x); });
}

template <class T>
void check_spd_spectrum(const BasicSpectral3<T>& s, const char* where) {
  for (const auto& l : s.values)
    if (!(value_of(l) > 0.0)) throw DomainError(std::string(where) + ": tensor is not positive definite");
}

/// Unique SPD square root.
template <class T>
BasicSymTensor3<T> sqrt_spd(const BasicSymTensor3<T>& a) {
  using std::sqrt;
  const auto s = eig_sym(a);
  check_spd_spectrum(s, "sqrt_spd");
#ifdef HOMEO_MUTATION_SQRT
  // Mutation-test build: deliberately perturbed root.
  return s.apply([](const T& x) { return sqrt(x) * (1.0 + 1e-9); });
#else
  return s.apply([](const T& x) { return sqrt(x); });
#endif
}

/// Square root and its inverse from a single decomposition.
template <class T>
struct SpdRoot {
  BasicSymTensor3<T> root;
  BasicSymTensor3<T> inv_root;
};

template <class T>
SpdRoot<T> spd_root(const BasicSymTensor3<T>& a) {
  using std::sqrt;
  const auto s = eig_sym(a);
  check_spd_spectrum(s, "spd_root");
#ifdef HOMEO_MUTATION_SQRT
  const double bias = 1.0 + 1e-9;
#else
  const double bias = 1.0;
#endif
  return {s.apply([&](const T& x) { return sqrt(x) * bias; }),
          s.apply([&](const T& x) { return 1.0 / (sqrt(x) * bias); })};
}

}  // namespace homeo
