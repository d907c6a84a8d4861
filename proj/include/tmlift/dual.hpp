#pragma once

/**
 * @file dual.hpp
 * @brief Multi-seed forward-mode dual numbers.
 *
 * A Dual<T> carries a value and up to kMaxPartials first-order partial
 * derivatives, all of type T. Every operator implements the chain rule
 * exactly, so evaluating a function on seeded duals yields its gradient.
 *
 * Nesting (Dual<Dual<double>>) gives derivatives of derivatives without a
 * separate higher-order type: the inner layer differentiates the outer
 * layer's partials.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <type_traits>

namespace tmlift {

/// Maximum number of independent directions a Dual can carry (2d for d <= 3).
inline constexpr std::size_t kMaxPartials = 6;

template <class T>
class Dual;

namespace detail {
template <class T>
struct DualDepth : std::integral_constant<int, 0> {};
template <class T>
struct DualDepth<Dual<T>> : std::integral_constant<int, DualDepth<T>::value + 1> {};
}  // namespace detail

/// Nesting depth: 0 for double, 1 for Dual<double>, ...
template <class T>
inline constexpr int dual_depth_v = detail::DualDepth<T>::value;

constexpr double value_of(double x) noexcept { return x; }

template <class T>
constexpr double value_of(const Dual<T>& x) noexcept {
  return value_of(x.value());
}

constexpr bool is_zero(double x) noexcept { return x == 0.0; }

template <class T>
constexpr bool is_zero(const Dual<T>& x) noexcept {
  if (!is_zero(x.value())) return false;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!is_zero(x.partial(i))) return false;
  return true;
}

template <class T>
class Dual {
 public:
  using scalar_type = T;

  constexpr Dual() = default;
  constexpr Dual(const T& v) : value_(v) {}  // NOLINT: constants convert implicitly
  constexpr Dual(double v)
    requires(!std::is_same_v<T, double>)
      : value_(v) {}

  /// Independent variable with value v, unit partial in `slot`, `count` slots.
  static constexpr Dual variable(const T& v, std::size_t slot, std::size_t count) {
    Dual r(v);
    r.n_ = static_cast<std::uint8_t>(count);
    r.d_[slot] = T(1.0);
    return r;
  }

  constexpr const T& value() const noexcept { return value_; }
  constexpr std::size_t size() const noexcept { return n_; }
  constexpr const T& partial(std::size_t i) const noexcept { return d_[i]; }

  /// True when every partial is exactly zero.
  constexpr bool is_constant() const noexcept {
    for (std::size_t i = 0; i < n_; ++i)
      if (!is_zero(d_[i])) return false;
    return true;
  }

  friend constexpr Dual operator+(const Dual& a) { return a; }

  friend constexpr Dual operator-(const Dual& a) {
    Dual r(-a.value_);
    r.n_ = a.n_;
    for (std::size_t i = 0; i < r.n_; ++i) r.d_[i] = -a.d_[i];
    return r;
  }

  friend constexpr Dual operator+(const Dual& a, const Dual& b) {
    Dual r(a.value_ + b.value_);
    r.n_ = std::max(a.n_, b.n_);
    for (std::size_t i = 0; i < r.n_; ++i) r.d_[i] = a.d_[i] + b.d_[i];
    return r;
  }

  friend constexpr Dual operator-(const Dual& a, const Dual& b) {
    Dual r(a.value_ - b.value_);
    r.n_ = std::max(a.n_, b.n_);
    for (std::size_t i = 0; i < r.n_; ++i) r.d_[i] = a.d_[i] - b.d_[i];
    return r;
  }

  // (fg)' = f'g + fg'
  friend constexpr Dual operator*(const Dual& a, const Dual& b) {
    Dual r(a.value_ * b.value_);
    r.n_ = std::max(a.n_, b.n_);
    for (std::size_t i = 0; i < r.n_; ++i)
      r.d_[i] = a.d_[i] * b.value_ + a.value_ * b.d_[i];
    return r;
  }

  // (f/g)' = (f'g - fg') / g^2
  friend constexpr Dual operator/(const Dual& a, const Dual& b) {
    Dual r(a.value_ / b.value_);
    r.n_ = std::max(a.n_, b.n_);
    const T b2 = b.value_ * b.value_;
    for (std::size_t i = 0; i < r.n_; ++i)
      r.d_[i] = (a.d_[i] * b.value_ - a.value_ * b.d_[i]) / b2;
    return r;
  }

  constexpr Dual& operator+=(const Dual& o) { return *this = *this + o; }
  constexpr Dual& operator-=(const Dual& o) { return *this = *this - o; }
  constexpr Dual& operator*=(const Dual& o) { return *this = *this * o; }
  constexpr Dual& operator/=(const Dual& o) { return *this = *this / o; }

  friend Dual exp(const Dual& a) {
    using std::exp;
    const T e = exp(a.value_);
    return chain(a, e, e);
  }

  friend Dual log(const Dual& a) {
    using std::log;
    return chain(a, log(a.value_), T(1.0) / a.value_);
  }

  friend Dual sin(const Dual& a) {
    using std::cos;
    using std::sin;
    return chain(a, sin(a.value_), cos(a.value_));
  }

  friend Dual cos(const Dual& a) {
    using std::cos;
    using std::sin;
    return chain(a, cos(a.value_), -sin(a.value_));
  }

  friend Dual sqrt(const Dual& a) {
    using std::sqrt;
    const T s = sqrt(a.value_);
    return chain(a, s, T(0.5) / s);
  }

  // d(a^b) = b a^(b-1) da + a^b ln(a) db; the log term only when b varies.
  friend Dual pow(const Dual& a, const Dual& b) {
    using std::log;
    using std::pow;
    const T v = pow(a.value_, b.value_);
    Dual r(v);
    r.n_ = std::max(a.n_, b.n_);
    if (r.n_ == 0) return r;
    const T da = a.is_constant() ? T(0.0) : b.value_ * pow(a.value_, b.value_ - T(1.0));
    const T db = b.is_constant() ? T(0.0) : v * log(a.value_);
    for (std::size_t i = 0; i < r.n_; ++i) r.d_[i] = da * a.d_[i] + db * b.d_[i];
    return r;
  }

 private:
  static Dual chain(const Dual& a, const T& f, const T& df) {
    Dual r(f);
    r.n_ = a.n_;
    for (std::size_t i = 0; i < r.n_; ++i) r.d_[i] = df * a.d_[i];
    return r;
  }

  T value_{};
  std::array<T, kMaxPartials> d_{};
  std::uint8_t n_ = 0;
};

}  // namespace tmlift
