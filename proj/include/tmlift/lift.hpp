#pragma once

/**
 * @file lift.hpp
 * @brief Forms on the tangent bundle TM in the chart (x^1..x^d, u^1..u^d).
 *
 * Frame order is (d/dx^1 .. d/dx^d, d/du^1 .. d/du^d); all 2d x 2d matrices
 * use it. Horizontal lifts follow parallel transport:
 *
 *   X^h = X^i d/dx^i - Gamma_ij^k X^i u^j d/du^k,   X^v = X^i d/du^i,
 *
 * so d/dx^l = (d_l)^h + N_l^k (d_k)^v with N_l^k = Gamma_lj^k u^j.
 */

#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tmlift/field.hpp"
#include "tmlift/geometry.hpp"

namespace tmlift {

struct TangentPoint {
  Point x;  // base point
  Point u;  // fiber vector

  std::size_t dim() const noexcept { return x.size(); }

  /// Concatenated chart coordinates (x, u).
  Point coords() const {
    Point c(x);
    c.insert(c.end(), u.begin(), u.end());
    return c;
  }
};

/// Antisymmetric (2d x 2d)-matrix-valued field, stored as its strict upper triangle.
class TwoFormTM {
 public:
  TwoFormTM(std::size_t base_dim, FieldArray upper) : d_(base_dim), upper_(std::move(upper)) {
    require_dim(upper_.in_dim(), 2 * d_, "TwoFormTM input");
    require_dim(upper_.size(), d_ * (2 * d_ - 1), "TwoFormTM components");
  }

  static std::size_t upper_index(std::size_t n, std::size_t a, std::size_t b) {
    return a * n - a * (a + 1) / 2 + (b - a - 1);
  }

  std::size_t base_dim() const noexcept { return d_; }
  std::size_t dim() const noexcept { return 2 * d_; }
  const FieldArray& upper() const noexcept { return upper_; }

  /// Full component matrix M[a*2d + b] = F(e_a, e_b).
  template <Carrier T>
  std::vector<T> operator()(std::span<const T> xu) const {
    const std::size_t n = dim();
    const auto up = upper_(xu);
    std::vector<T> m(n * n, T(0.0));
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b) {
        const T& v = up[upper_index(n, a, b)];
        m[a * n + b] = v;
        m[b * n + a] = -v;
      }
    return m;
  }

  std::vector<double> at(const TangentPoint& p) const {
    require_dim(p.x.size(), d_, "TwoFormTM point");
    require_dim(p.u.size(), d_, "TwoFormTM point");
    const auto c = p.coords();
    return (*this)(std::span<const double>(c));
  }

  friend TwoFormTM operator+(const TwoFormTM& a, const TwoFormTM& b) { return combine(a, b, 1.0); }
  friend TwoFormTM operator-(const TwoFormTM& a, const TwoFormTM& b) { return combine(a, b, -1.0); }

 private:
  static TwoFormTM combine(const TwoFormTM& a, const TwoFormTM& b, double sign) {
    require_dim(b.d_, a.d_, "TwoFormTM arithmetic");
    const std::size_t m = a.upper_.size();
    return {a.d_, FieldArray(2 * a.d_, m, [a, b, sign]<class T>(std::span<const T> x, std::span<T> out) {
              const auto va = a.upper_(x);
              const auto vb = b.upper_(x);
              for (std::size_t i = 0; i < va.size(); ++i) out[i] = va[i] + T(sign) * vb[i];
            })};
  }

  std::size_t d_;
  FieldArray upper_;
};

/// 1-form on TM: components w.r.t. (dx^1..dx^d, du^1..du^d).
class OneFormTM {
 public:
  OneFormTM(std::size_t base_dim, FieldArray comps) : d_(base_dim), comps_(std::move(comps)) {
    require_dim(comps_.in_dim(), 2 * d_, "OneFormTM input");
    require_dim(comps_.size(), 2 * d_, "OneFormTM components");
  }

  std::size_t base_dim() const noexcept { return d_; }
  const FieldArray& components() const noexcept { return comps_; }

  template <Carrier T>
  std::vector<T> operator()(std::span<const T> xu) const {
    return comps_(xu);
  }
  std::vector<double> at(const TangentPoint& p) const {
    const auto c = p.coords();
    return comps_(std::span<const double>(c));
  }

 private:
  std::size_t d_;
  FieldArray comps_;
};

/// The data (nabla, omega0, omega1, A) of a lifted 2-form.
struct LiftSpec {
  Connection conn;
  TwoForm omega0;
  TwoForm omega1;
  CovariantTwoTensor A;

  std::size_t dim() const noexcept { return conn.dim(); }

  void validate() const {
    require_dim(omega0.dim(), conn.dim(), "LiftSpec omega0");
    require_dim(omega1.dim(), conn.dim(), "LiftSpec omega1");
    require_dim(A.dim(), conn.dim(), "LiftSpec A");
  }
};

namespace detail {

/// N[l*d + k] = sum_j Gamma_lj^k u^j.
template <class T>
std::vector<T> nonlinear_coefficients(std::span<const T> gamma, std::span<const T> u, std::size_t d) {
  std::vector<T> N(d * d, T(0.0));
  for (std::size_t l = 0; l < d; ++l)
    for (std::size_t k = 0; k < d; ++k) {
      T acc(0.0);
      for (std::size_t j = 0; j < d; ++j) acc += gamma[Connection::index(d, l, j, k)] * u[j];
      N[l * d + k] = acc;
    }
  return N;
}

}  // namespace detail

/// Coordinates of the horizontal lift of the vector X at (x, u).
inline Point horizontal_lift(const Connection& conn, std::span<const double> x, std::span<const double> u,
                             std::span<const double> X) {
  const std::size_t d = conn.dim();
  require_dim(X.size(), d, "horizontal_lift");
  require_dim(u.size(), d, "horizontal_lift");
  const auto g = conn(x);
  Point h(2 * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) h[i] = X[i];
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) h[d + k] -= g[Connection::index(d, i, j, k)] * X[i] * u[j];
  return h;
}

inline Point vertical_lift(std::span<const double> X) {
  Point v(2 * X.size(), 0.0);
  std::copy(X.begin(), X.end(), v.begin() + static_cast<std::ptrdiff_t>(X.size()));
  return v;
}

struct LiftFrames {
  Point horizontal;
  Point vertical;
};

inline LiftFrames lift_frames(const Connection& conn, const VectorField& X, const TangentPoint& p) {
  require_dim(X.dim(), conn.dim(), "lift_frames");
  require_dim(p.dim(), conn.dim(), "lift_frames point");
  const auto xv = X.at(p.x);
  return {horizontal_lift(conn, p.x, p.u, xv), vertical_lift(xv)};
}

/// The 2-form with Omega(X^v,Y^v) = omega0(X,Y), Omega(X^h,Y^h) = omega1(X,Y),
/// Omega(X^v,Y^h) = A(X,Y), Omega(X^h,Y^v) = -A(Y,X), in coordinates.
inline TwoFormTM lift_two_form(const LiftSpec& spec) {
  spec.validate();
  const std::size_t d = spec.dim();
  const std::size_t n = 2 * d;
  return {d, FieldArray(n, d * (n - 1), [spec, d, n]<class T>(std::span<const T> xu, std::span<T> out) {
            const auto x = xu.first(d);
            const auto u = xu.subspan(d, d);
            const auto g = spec.conn(x);
            const auto w0 = spec.omega0(x);
            const auto w1 = spec.omega1(x);
            const auto A = spec.A(x);
            const auto N = detail::nonlinear_coefficients<T>(g, u, d);
            for (std::size_t a = 0; a < d; ++a) {
              for (std::size_t b = a + 1; b < d; ++b) {
                T v = w1[a * d + b];
                for (std::size_t k = 0; k < d; ++k) {
                  v += N[a * d + k] * A[k * d + b] - N[b * d + k] * A[k * d + a];
                  for (std::size_t m = 0; m < d; ++m) v += N[a * d + k] * N[b * d + m] * w0[k * d + m];
                }
                out[TwoFormTM::upper_index(n, a, b)] = v;
              }
              for (std::size_t s = 0; s < d; ++s) {
                // Omega(d/dx^a, d/du^s) = -(A_sa + N_a^k omega0_sk)
                T v = A[s * d + a];
                for (std::size_t k = 0; k < d; ++k) v += N[a * d + k] * w0[s * d + k];
                out[TwoFormTM::upper_index(n, a, d + s)] = -v;
              }
            }
            for (std::size_t a = 0; a < d; ++a)
              for (std::size_t b = a + 1; b < d; ++b) out[TwoFormTM::upper_index(n, d + a, d + b)] = w0[a * d + b];
          })};
}

/// (A^flat)^*(d lambda) = sum_i dP^i ^ dx^i with P^i = sum_j u^j A_ji.
inline TwoFormTM liouville_pullback(const CovariantTwoTensor& A) {
  const std::size_t d = A.dim();
  const std::size_t n = 2 * d;
  return {d, FieldArray(n, d * (n - 1), [A, d, n]<class T>(std::span<const T> xu, std::span<T> out) {
            if constexpr (!LiftableCarrier<T>) {
              throw_depth_exceeded();
            } else {
              const auto s = seed_all(xu);
              const std::span<const Dual<T>> all(s);
              const auto a = A(all.first(d));
              std::vector<Dual<T>> P(d, Dual<T>(0.0));
              for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j) P[i] += all[d + j] * a[j * d + i];
              for (std::size_t p = 0; p < n; ++p)
                for (std::size_t q = p + 1; q < n; ++q) {
                  T v(0.0);
                  if (q < d) v += P[q].partial(p);
                  if (p < d) v -= P[p].partial(q);
                  out[TwoFormTM::upper_index(n, p, q)] = v;
                }
            }
          })};
}

/// lambda(X^h) = 0, lambda(X^v)(u) = omega(u, X) / 2.
inline OneFormTM lambda_form(const TwoForm& omega, const Connection& conn) {
  require_dim(omega.dim(), conn.dim(), "lambda_form");
  const std::size_t d = conn.dim();
  return {d, FieldArray(2 * d, 2 * d, [omega, conn, d]<class T>(std::span<const T> xu, std::span<T> out) {
            const auto x = xu.first(d);
            const auto u = xu.subspan(d, d);
            const auto w = omega(x);
            const auto g = conn(x);
            for (std::size_t b = 0; b < d; ++b) {
              T v(0.0);
              for (std::size_t a = 0; a < d; ++a) v += u[a] * w[a * d + b];
              out[d + b] = T(0.5) * v;
            }
            const auto N = detail::nonlinear_coefficients<T>(g, u, d);
            for (std::size_t l = 0; l < d; ++l) {
              T v(0.0);
              for (std::size_t k = 0; k < d; ++k) v += N[l * d + k] * out[d + k];
              out[l] = v;
            }
          })};
}

/// Numeric exterior derivative of a 1-form on TM: (d theta)_ab = d_a theta_b - d_b theta_a.
inline TwoFormTM exterior_derivative(const OneFormTM& theta) {
  const std::size_t d = theta.base_dim();
  const std::size_t n = 2 * d;
  return {d, FieldArray(n, d * (n - 1), [theta, n]<class T>(std::span<const T> xu, std::span<T> out) {
            if constexpr (!LiftableCarrier<T>) {
              throw_depth_exceeded();
            } else {
              const auto s = seed_all(xu);
              const auto c = theta(std::span<const Dual<T>>(s));
              for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = a + 1; b < n; ++b)
                  out[TwoFormTM::upper_index(n, a, b)] = c[b].partial(a) - c[a].partial(b);
            }
          })};
}

/// pi^* w: the base form in the x-x block.
inline TwoFormTM pullback_from_base(const TwoForm& w) {
  const std::size_t d = w.dim();
  const std::size_t n = 2 * d;
  return {d, FieldArray(n, d * (n - 1), [w, d, n]<class T>(std::span<const T> xu, std::span<T> out) {
            const auto m = w(xu.first(d));
            for (std::size_t a = 0; a < d; ++a)
              for (std::size_t b = a + 1; b < d; ++b) out[TwoFormTM::upper_index(n, a, b)] = m[a * d + b];
          })};
}

struct ZeroSectionData {
  TwoForm omega11;       // Omega((v,0),(w,0)) at (x,0)
  TwoForm omega22;       // Omega((0,v),(0,w)) at (x,0)
  CovariantTwoTensor A;  // Omega((0,v),(w,0)) at (x,0)
};

inline ZeroSectionData extract_zero_section(const TwoFormTM& Omega) {
  const std::size_t d = Omega.base_dim();
  const std::size_t n = 2 * d;
  auto at_zero = [Omega, d]<class T>(std::span<const T> x) {
    std::vector<T> xu(x.begin(), x.end());
    xu.resize(2 * d, T(0.0));
    return Omega(std::span<const T>(xu));
  };
  FieldArray w11(d, d * (d - 1) / 2, [at_zero, d, n]<class T>(std::span<const T> x, std::span<T> out) {
    const auto m = at_zero(x);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i + 1; j < d; ++j) out[TwoForm::upper_index(d, i, j)] = m[i * n + j];
  });
  FieldArray w22(d, d * (d - 1) / 2, [at_zero, d, n]<class T>(std::span<const T> x, std::span<T> out) {
    const auto m = at_zero(x);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i + 1; j < d; ++j) out[TwoForm::upper_index(d, i, j)] = m[(d + i) * n + (d + j)];
  });
  FieldArray a(d, d * d, [at_zero, d, n]<class T>(std::span<const T> x, std::span<T> out) {
    const auto m = at_zero(x);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) out[i * d + j] = m[(d + i) * n + j];
  });
  return {TwoForm(d, std::move(w11)), TwoForm(d, std::move(w22)), CovariantTwoTensor(d, std::move(a))};
}

/// pi^* omega11 + (A^flat)^*(d lambda) + d lambda^{omega22, nabla}.
inline TwoFormTM darboux_candidate(const TwoForm& omega11, const TwoForm& omega22, const CovariantTwoTensor& A,
                                   const Connection& conn) {
  require_dim(omega11.dim(), conn.dim(), "darboux_candidate omega11");
  require_dim(omega22.dim(), conn.dim(), "darboux_candidate omega22");
  require_dim(A.dim(), conn.dim(), "darboux_candidate A");
  return pullback_from_base(omega11) + liouville_pullback(A) + exterior_derivative(lambda_form(omega22, conn));
}

}  // namespace tmlift
