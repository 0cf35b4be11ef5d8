#pragma once

// Forward-mode dual numbers with a fixed number of tangent directions.

#include <array>
#include <cmath>
#include <cstddef>
#include <type_traits>

namespace homeo {

template <std::size_t N>
struct Dual {
  double v = 0.0;
  std::array<double, N> d{};

  constexpr Dual() = default;
  constexpr Dual(double value) : v(value) {}  // NOLINT: implicit lift of constants
  Dual(double value, const std::array<double, N>& tangent) : v(value), d(tangent) {}

  /// Variable seeded along tangent direction `k`.
  static Dual variable(double value, std::size_t k, double seed = 1.0) {
    Dual r(value);
    r.d[k] = seed;
    return r;
  }

  Dual& operator+=(const Dual& o) {
    v += o.v;
    for (std::size_t i = 0; i < N; ++i) d[i] += o.d[i];
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v -= o.v;
    for (std::size_t i = 0; i < N; ++i) d[i] -= o.d[i];
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    for (std::size_t i = 0; i < N; ++i) d[i] = d[i] * o.v + v * o.d[i];
    v *= o.v;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    const double inv = 1.0 / o.v;
    for (std::size_t i = 0; i < N; ++i) d[i] = (d[i] - v * inv * o.d[i]) * inv;
    v *= inv;
    return *this;
  }
};

template <class T>
struct is_dual : std::false_type {};
template <std::size_t N>
struct is_dual<Dual<N>> : std::true_type {};
template <class T>
inline constexpr bool is_dual_v = is_dual<T>::value;

inline double value_of(double x) { return x; }
template <std::size_t N>
double value_of(const Dual<N>& x) {
  return x.v;
}

/// Zero value and zero tangent.
inline bool is_exact_zero(double x) { return x == 0.0; }
template <std::size_t N>
bool is_exact_zero(const Dual<N>& x) {
  if (x.v != 0.0) return false;
  for (double t : x.d)
    if (t != 0.0) return false;
  return true;
}

template <std::size_t N>
Dual<N> operator-(Dual<N> a) {
  a.v = -a.v;
  for (auto& x : a.d) x = -x;
  return a;
}
template <std::size_t N>
Dual<N> operator+(Dual<N> a, const Dual<N>& b) {
  return a += b;
}
template <std::size_t N>
Dual<N> operator-(Dual<N> a, const Dual<N>& b) {
  return a -= b;
}
template <std::size_t N>
Dual<N> operator*(Dual<N> a, const Dual<N>& b) {
  return a *= b;
}
template <std::size_t N>
Dual<N> operator/(Dual<N> a, const Dual<N>& b) {
  return a /= b;
}
template <std::size_t N>
Dual<N> operator+(Dual<N> a, double b) {
  a.v += b;
  return a;
}
template <std::size_t N>
Dual<N> operator+(double b, Dual<N> a) {
  a.v += b;
  return a;
}
template <std::size_t N>
Dual<N> operator-(Dual<N> a, double b) {
  a.v -= b;
  return a;
}
template <std::size_t N>
Dual<N> operator-(double b, const Dual<N>& a) {
  return -a + b;
}
template <std::size_t N>
Dual<N> operator*(Dual<N> a, double b) {
  a.v *= b;
  for (auto& x : a.d) x *= b;
  return a;
}
template <std::size_t N>
Dual<N> operator*(double b, Dual<N> a) {
  return a * b;
}
template <std::size_t N>
Dual<N> operator/(Dual<N> a, double b) {
  return a * (1.0 / b);
}
template <std::size_t N>
Dual<N> operator/(double b, const Dual<N>& a) {
  return Dual<N>(b) / a;
}

// Comparisons act on the value part only.
template <std::size_t N>
bool operator<(const Dual<N>& a, const Dual<N>& b) {
  return a.v < b.v;
}
template <std::size_t N>
bool operator>(const Dual<N>& a, const Dual<N>& b) {
  return a.v > b.v;
}
template <std::size_t N>
bool operator<=(const Dual<N>& a, const Dual<N>& b) {
  return a.v <= b.v;
}
template <std::size_t N>
bool operator>=(const Dual<N>& a, const Dual<N>& b) {
  return a.v >= b.v;
}
template <std::size_t N>
bool operator<(const Dual<N>& a, double b) {
  return a.v < b;
}
template <std::size_t N>
bool operator>(const Dual<N>& a, double b) {
  return a.v > b;
}
template <std::size_t N>
bool operator<=(const Dual<N>& a, double b) {
  return a.v <= b;
}
template <std::size_t N>
bool operator>=(const Dual<N>& a, double b) {
  return a.v >= b;
}

namespace detail {
template <std::size_t N>
Dual<N> chain(const Dual<N>& a, double fv, double dfdv) {
  Dual<N> r(fv);
  for (std::size_t i = 0; i < N; ++i) r.d[i] = dfdv * a.d[i];
  return r;
}
}  // namespace detail

template <std::size_t N>
Dual<N> exp(const Dual<N>& a) {
  const double e = std::exp(a.v);
  return detail::chain(a, e, e);
}
template <std::size_t N>
Dual<N> log(const Dual<N>& a) {
  return detail::chain(a, std::log(a.v), 1.0 / a.v);
}
template <std::size_t N>
Dual<N> log1p(const Dual<N>& a) {
  return detail::chain(a, std::log1p(a.v), 1.0 / (1.0 + a.v));
}
template <std::size_t N>
Dual<N> sqrt(const Dual<N>& a) {
  const double s = std::sqrt(a.v);
  return detail::chain(a, s, 0.5 / s);
}
template <std::size_t N>
Dual<N> cbrt(const Dual<N>& a) {
  const double c = std::cbrt(a.v);
  return detail::chain(a, c, c / (3.0 * a.v));
}
template <std::size_t N>
Dual<N> tanh(const Dual<N>& a) {
  const double t = std::tanh(a.v);
  return detail::chain(a, t, 1.0 - t * t);
}
template <std::size_t N>
Dual<N> abs(const Dual<N>& a) {
  return a.v < 0.0 ? -a : a;
}
template <std::size_t N>
Dual<N> pow(const Dual<N>& a, double p) {
  const double f = std::pow(a.v, p);
  return detail::chain(a, f, p * std::pow(a.v, p - 1.0));
}
/// a^p for positive base, exponent carried as a dual.
template <std::size_t N>
Dual<N> pow(const Dual<N>& a, const Dual<N>& p) {
  return exp(p * log(a));
}
template <std::size_t N>
bool isfinite(const Dual<N>& a) {
  if (!std::isfinite(a.v)) return false;
  for (double x : a.d)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace homeo
