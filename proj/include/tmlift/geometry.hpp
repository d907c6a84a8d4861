#pragma once

/**
 * @file geometry.hpp
 * @brief Tensor fields on a single chart and the linear-connection calculus.
 *
 * Conventions:
 *  - Christoffel symbols: nabla_{d_i} d_j = sum_k Gamma_ij^k d_k, stored at
 *    index (i*d + j)*d + k. The first index is the direction of differentiation.
 *  - Torsion:   tau(X,Y) = [X,Y] - nabla_X Y + nabla_Y X.
 *  - Curvature: R(X,Y)  = nabla_[X,Y] - (nabla_X nabla_Y - nabla_Y nabla_X).
 *    Both are the negatives of the more common conventions.
 */

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tmlift/field.hpp"
#include "tmlift/linalg.hpp"

namespace tmlift {

using Point = std::vector<double>;

class VectorField {
 public:
  VectorField(std::size_t dim, FieldArray components) : dim_(dim), comps_(std::move(components)) {
    require_dim(comps_.in_dim(), dim_, "VectorField input");
    require_dim(comps_.size(), dim_, "VectorField components");
  }

  static VectorField from_components(std::vector<ScalarField> comps) {
    const std::size_t d = comps.size();
    return {d, FieldArray::from_fields(d, std::move(comps))};
  }

  /// The coordinate field d/dx^i.
  static VectorField coordinate(std::size_t dim, std::size_t i) {
    if (i >= dim) throw std::out_of_range("coordinate field index out of range");
    return {dim, FieldArray(dim, dim, [i]<class T>(std::span<const T>, std::span<T> out) { out[i] = T(1.0); })};
  }

  /// Constant-coefficient field with the given components.
  static VectorField constant(std::vector<double> v) {
    const std::size_t d = v.size();
    return {d, FieldArray(d, d, [v]<class T>(std::span<const T>, std::span<T> out) {
              for (std::size_t i = 0; i < v.size(); ++i) out[i] = T(v[i]);
            })};
  }

  std::size_t dim() const noexcept { return dim_; }
  const FieldArray& components() const noexcept { return comps_; }

  template <Carrier T>
  std::vector<T> operator()(std::span<const T> x) const {
    return comps_(x);
  }
  std::vector<double> at(std::span<const double> x) const { return comps_(x); }

 private:
  std::size_t dim_;
  FieldArray comps_;
};

class Connection {
 public:
  Connection(std::size_t dim, FieldArray symbols) : dim_(dim), symbols_(std::move(symbols)) {
    require_dim(symbols_.in_dim(), dim_, "Connection input");
    require_dim(symbols_.size(), dim_ * dim_ * dim_, "Connection symbols");
  }

  /// gamma[(i*d + j)*d + k] = Gamma_ij^k.
  static Connection from_symbols(std::size_t dim, std::vector<ScalarField> gamma) {
    require_dim(gamma.size(), dim * dim * dim, "Connection symbols");
    return {dim, FieldArray::from_fields(dim, std::move(gamma))};
  }

  static Connection flat(std::size_t dim) { return {dim, FieldArray::zero(dim, dim * dim * dim)}; }

  static constexpr std::size_t index(std::size_t d, std::size_t i, std::size_t j, std::size_t k) {
    return (i * d + j) * d + k;
  }

  std::size_t dim() const noexcept { return dim_; }
  const FieldArray& symbols() const noexcept { return symbols_; }
  ScalarField symbol(std::size_t i, std::size_t j, std::size_t k) const {
    return symbols_.component(index(dim_, i, j, k));
  }

  template <Carrier T>
  std::vector<T> operator()(std::span<const T> x) const {
    return symbols_(x);
  }

 private:
  std::size_t dim_;
  FieldArray symbols_;
};

/// T_ij = T(d_i, d_j), stored row-major.
class CovariantTwoTensor {
 public:
  CovariantTwoTensor(std::size_t dim, FieldArray comps) : dim_(dim), comps_(std::move(comps)) {
    require_dim(comps_.in_dim(), dim_, "CovariantTwoTensor input");
    require_dim(comps_.size(), dim_ * dim_, "CovariantTwoTensor components");
  }

  static CovariantTwoTensor from_components(std::size_t dim, std::vector<ScalarField> comps) {
    require_dim(comps.size(), dim * dim, "CovariantTwoTensor components");
    return {dim, FieldArray::from_fields(dim, std::move(comps))};
  }

  static CovariantTwoTensor zero(std::size_t dim) { return {dim, FieldArray::zero(dim, dim * dim)}; }

  static CovariantTwoTensor identity(std::size_t dim) {
    return {dim, FieldArray(dim, dim * dim, [dim]<class T>(std::span<const T>, std::span<T> out) {
              for (std::size_t i = 0; i < dim; ++i) out[i * dim + i] = T(1.0);
            })};
  }

  std::size_t dim() const noexcept { return dim_; }
  const FieldArray& components() const noexcept { return comps_; }
  ScalarField component(std::size_t i, std::size_t j) const { return comps_.component(i * dim_ + j); }

  template <Carrier T>
  std::vector<T> operator()(std::span<const T> x) const {
    return comps_(x);
  }
  std::vector<double> at(std::span<const double> x) const { return comps_(x); }

 private:
  std::size_t dim_;
  FieldArray comps_;
};

class NotAntisymmetricError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Differential 2-form stored as its strict upper triangle (i < j), row by row.
class TwoForm {
 public:
  TwoForm(std::size_t dim, FieldArray upper) : dim_(dim), upper_(std::move(upper)) {
    require_dim(upper_.in_dim(), dim_, "TwoForm input");
    require_dim(upper_.size(), dim_ * (dim_ - 1) / 2, "TwoForm components");
  }

  static std::size_t upper_index(std::size_t d, std::size_t i, std::size_t j) {
    return i * d - i * (i + 1) / 2 + (j - i - 1);
  }

  static TwoForm from_upper(std::size_t dim, std::vector<ScalarField> upper) {
    return {dim, FieldArray::from_fields(dim, std::move(upper))};
  }

  /// Full d x d component matrix; antisymmetry is checked at `samples`.
  static TwoForm from_matrix(std::size_t dim, std::vector<ScalarField> full,
                             std::span<const Point> samples, double tol = 1e-12) {
    require_dim(full.size(), dim * dim, "TwoForm matrix");
    for (const auto& p : samples) {
      for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = i; j < dim; ++j) {
          const double a = full[i * dim + j](p);
          const double b = full[j * dim + i](p);
          if (std::abs(a + b) > tol * (1.0 + std::abs(a) + std::abs(b)))
            throw NotAntisymmetricError("2-form components (" + std::to_string(i + 1) + "," +
                                        std::to_string(j + 1) + ") are not antisymmetric");
        }
      }
    }
    std::vector<ScalarField> upper;
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = i + 1; j < dim; ++j) upper.push_back(full[i * dim + j]);
    return from_upper(dim, std::move(upper));
  }

  static TwoForm zero(std::size_t dim) { return {dim, FieldArray::zero(dim, dim * (dim - 1) / 2)}; }

  std::size_t dim() const noexcept { return dim_; }
  const FieldArray& upper() const noexcept { return upper_; }

  /// Full antisymmetric component matrix at x.
  template <Carrier T>
  std::vector<T> operator()(std::span<const T> x) const {
    const auto up = upper_(x);
    std::vector<T> m(dim_ * dim_, T(0.0));
    for (std::size_t i = 0; i < dim_; ++i) {
      for (std::size_t j = i + 1; j < dim_; ++j) {
        const T& v = up[upper_index(dim_, i, j)];
        m[i * dim_ + j] = v;
        m[j * dim_ + i] = -v;
      }
    }
    return m;
  }
  std::vector<double> at(std::span<const double> x) const { return (*this)(x); }

  CovariantTwoTensor as_tensor() const {
    return {dim_, FieldArray(dim_, dim_ * dim_, [self = *this]<class T>(std::span<const T> x, std::span<T> out) {
              const auto m = self(x);
              std::copy(m.begin(), m.end(), out.begin());
            })};
  }

 private:
  std::size_t dim_;
  FieldArray upper_;
};

namespace detail {

/// Values and Jacobian (jac[k*d + i] = d_i X^k) of an array field at x.
struct Jet {
  std::vector<double> value;
  std::vector<double> jac;
};

inline Jet jet(const FieldArray& F, std::span<const double> x) {
  const auto d = differentiate(F, x);
  Jet j;
  j.value.resize(F.size());
  j.jac.resize(F.size() * x.size());
  for (std::size_t r = 0; r < F.size(); ++r) {
    j.value[r] = d[r].value();
    for (std::size_t c = 0; c < x.size(); ++c) j.jac[r * x.size() + c] = d[r].partial(c);
  }
  return j;
}

inline double bilinear(std::span<const double> M, std::size_t d, std::span<const double> a,
                       std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) s += M[i * d + j] * a[i] * b[j];
  return s;
}

inline void require_same_dim(std::size_t a, std::size_t b, const char* what) { require_dim(b, a, what); }

}  // namespace detail

/// [X,Y]^k = sum_i (X^i d_i Y^k - Y^i d_i X^k).
inline VectorField lie_bracket(const VectorField& X, const VectorField& Y) {
  detail::require_same_dim(X.dim(), Y.dim(), "lie_bracket");
  const std::size_t d = X.dim();
  return {d, FieldArray(d, d, [X, Y, d]<class T>(std::span<const T> x, std::span<T> out) {
            if constexpr (!LiftableCarrier<T>) {
              throw_depth_exceeded();
            } else {
              const auto s = seed_all(x);
              const auto xv = X(std::span<const Dual<T>>(s));
              const auto yv = Y(std::span<const Dual<T>>(s));
              for (std::size_t k = 0; k < d; ++k) {
                T acc(0.0);
                for (std::size_t i = 0; i < d; ++i)
                  acc += xv[i].value() * yv[k].partial(i) - yv[i].value() * xv[k].partial(i);
                out[k] = acc;
              }
            }
          })};
}

/// (nabla_X Y)(x).
inline Point covariant_derivative(const Connection& conn, const VectorField& X, const VectorField& Y,
                                  std::span<const double> x) {
  const std::size_t d = conn.dim();
  detail::require_same_dim(d, X.dim(), "covariant_derivative");
  detail::require_same_dim(d, Y.dim(), "covariant_derivative");
  require_dim(x.size(), d, "covariant_derivative point");
  const auto xv = X.at(x);
  const auto yj = detail::jet(Y.components(), x);
  const auto g = conn(x);
  Point out(d, 0.0);
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t i = 0; i < d; ++i) {
      double s = yj.jac[k * d + i];
      for (std::size_t j = 0; j < d; ++j) s += g[Connection::index(d, i, j, k)] * yj.value[j];
      out[k] += xv[i] * s;
    }
  return out;
}

/// tau(X,Y) = [X,Y] - nabla_X Y + nabla_Y X at x.
inline Point torsion(const Connection& conn, const VectorField& X, const VectorField& Y,
                     std::span<const double> x) {
  const std::size_t d = conn.dim();
  detail::require_same_dim(d, X.dim(), "torsion");
  detail::require_same_dim(d, Y.dim(), "torsion");
  const auto br = lie_bracket(X, Y).at(x);
  const auto nxy = covariant_derivative(conn, X, Y, x);
  const auto nyx = covariant_derivative(conn, Y, X, x);
  Point out(d);
  for (std::size_t k = 0; k < d; ++k) out[k] = br[k] - nxy[k] + nyx[k];
  return out;
}

/// Torsion of plain vectors at x: tau^k = -(Gamma_ij^k - Gamma_ji^k) X^i Y^j.
inline Point torsion_at(const Connection& conn, std::span<const double> x, std::span<const double> X,
                        std::span<const double> Y) {
  const std::size_t d = conn.dim();
  const auto g = conn(x);
  Point out(d, 0.0);
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        out[k] -= (g[Connection::index(d, i, j, k)] - g[Connection::index(d, j, i, k)]) * X[i] * Y[j];
  return out;
}

/// Curvature components R[((k*d + l)*d + i)*d + j]: R(d_i, d_j) d_l = sum_k R[k,l,i,j] d_k.
inline std::vector<double> curvature_tensor(const Connection& conn, std::span<const double> x) {
  const std::size_t d = conn.dim();
  require_dim(x.size(), d, "curvature point");
  const auto gd = differentiate(conn.symbols(), x);
  auto G = [&](std::size_t i, std::size_t j, std::size_t k) { return gd[Connection::index(d, i, j, k)].value(); };
  auto dG = [&](std::size_t a, std::size_t i, std::size_t j, std::size_t k) {
    return gd[Connection::index(d, i, j, k)].partial(a);
  };
  std::vector<double> R(d * d * d * d, 0.0);
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t l = 0; l < d; ++l)
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
          double s = dG(i, j, l, k) - dG(j, i, l, k);
          for (std::size_t m = 0; m < d; ++m) s += G(i, m, k) * G(j, l, m) - G(j, m, k) * G(i, l, m);
          R[((k * d + l) * d + i) * d + j] = -s;
        }
  return R;
}

/// R(X,Y)Z for plain vectors, given curvature_tensor output.
inline Point apply_curvature(std::span<const double> R, std::size_t d, std::span<const double> X,
                             std::span<const double> Y, std::span<const double> Z) {
  Point out(d, 0.0);
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t l = 0; l < d; ++l)
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) out[k] += R[((k * d + l) * d + i) * d + j] * X[i] * Y[j] * Z[l];
  return out;
}

inline Point curvature(const Connection& conn, const VectorField& X, const VectorField& Y,
                       const VectorField& Z, std::span<const double> x) {
  const std::size_t d = conn.dim();
  detail::require_same_dim(d, X.dim(), "curvature");
  detail::require_same_dim(d, Y.dim(), "curvature");
  detail::require_same_dim(d, Z.dim(), "curvature");
  const auto R = curvature_tensor(conn, x);
  return apply_curvature(R, d, X.at(x), Y.at(x), Z.at(x));
}

/// (nabla_X T)(Z,Y) = X(T(Z,Y)) - T(nabla_X Z, Y) - T(Z, nabla_X Y).
inline double cov_deriv_two_tensor(const Connection& conn, const CovariantTwoTensor& T, const VectorField& X,
                                   const VectorField& Z, const VectorField& Y, std::span<const double> x) {
  const std::size_t d = conn.dim();
  detail::require_same_dim(d, T.dim(), "cov_deriv_two_tensor");
  detail::require_same_dim(d, X.dim(), "cov_deriv_two_tensor");
  detail::require_same_dim(d, Y.dim(), "cov_deriv_two_tensor");
  detail::require_same_dim(d, Z.dim(), "cov_deriv_two_tensor");
  require_dim(x.size(), d, "cov_deriv_two_tensor point");

  const auto s = seed_all(x);
  const std::span<const D1> sx(s);
  const auto t = T(sx);
  const auto z = Z(sx);
  const auto y = Y(sx);
  D1 tzy(0.0);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) tzy += t[a * d + b] * z[a] * y[b];

  const auto xv = X.at(x);
  double x_of_tzy = 0.0;
  for (std::size_t i = 0; i < d; ++i) x_of_tzy += xv[i] * tzy.partial(i);

  const auto tv = T.at(x);
  const auto zv = Z.at(x);
  const auto yv = Y.at(x);
  const auto nxz = covariant_derivative(conn, X, Z, x);
  const auto nxy = covariant_derivative(conn, X, Y, x);
  return x_of_tzy - detail::bilinear(tv, d, nxz, yv) - detail::bilinear(tv, d, zv, nxy);
}

/// Components [(i*d + a)*d + b] = (nabla_{d_i} T)(d_a, d_b).
inline std::vector<double> covariant_derivative_components(const Connection& conn, const CovariantTwoTensor& T,
                                                           std::span<const double> x) {
  const std::size_t d = conn.dim();
  detail::require_same_dim(d, T.dim(), "covariant_derivative_components");
  const auto tj = detail::jet(T.components(), x);
  const auto g = conn(x);
  std::vector<double> out(d * d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) {
        double s = tj.jac[(a * d + b) * d + i];
        for (std::size_t k = 0; k < d; ++k)
          s -= g[Connection::index(d, i, a, k)] * tj.value[k * d + b] +
               g[Connection::index(d, i, b, k)] * tj.value[a * d + k];
        out[(i * d + a) * d + b] = s;
      }
  return out;
}

/// Levi-Civita connection: Gamma_ij^k = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij).
/// Evaluation throws SingularMatrixError where g is singular.
inline Connection levi_civita(const CovariantTwoTensor& g) {
  const std::size_t d = g.dim();
  return {d, FieldArray(d, d * d * d, [g, d]<class T>(std::span<const T> x, std::span<T> out) {
            if constexpr (!LiftableCarrier<T>) {
              throw_depth_exceeded();
            } else {
              const auto s = seed_all(x);
              const auto gd = g(std::span<const Dual<T>>(s));
              std::vector<T> gv(d * d);
              for (std::size_t a = 0; a < d * d; ++a) gv[a] = gd[a].value();
              const auto ginv = inverse(gv, d);
              auto dg = [&](std::size_t a, std::size_t i, std::size_t j) -> const T& {
                return gd[i * d + j].partial(a);
              };
              for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j)
                  for (std::size_t k = 0; k < d; ++k) {
                    T acc(0.0);
                    for (std::size_t l = 0; l < d; ++l)
                      acc += ginv[k * d + l] * (dg(i, j, l) + dg(j, i, l) - dg(l, i, j));
                    out[Connection::index(d, i, j, k)] = T(0.5) * acc;
                  }
            }
          })};
}

/// nabla_X A(Z,Y) - nabla_Y A(Z,X) - A(Z, tau(X,Y)); zero iff Codazzi holds for these fields at x.
inline double codazzi_residual(const Connection& conn, const CovariantTwoTensor& A, const VectorField& X,
                               const VectorField& Y, const VectorField& Z, std::span<const double> x) {
  const std::size_t d = conn.dim();
  detail::require_same_dim(d, A.dim(), "codazzi_residual");
  const double lhs = cov_deriv_two_tensor(conn, A, X, Z, Y, x) - cov_deriv_two_tensor(conn, A, Y, Z, X, x);
  const auto tau = torsion(conn, X, Y, x);
  return lhs - detail::bilinear(A.at(x), d, Z.at(x), tau);
}

/// A(X,Y) = (nabla_Y alpha)(X), i.e. A_ij = d_j alpha_i - Gamma_ji^k alpha_k.
inline CovariantTwoTensor one_form_derivative_tensor(const Connection& conn, std::vector<ScalarField> alpha) {
  const std::size_t d = conn.dim();
  require_dim(alpha.size(), d, "one_form_derivative_tensor");
  for (const auto& a : alpha) require_dim(a.dim(), d, "one_form_derivative_tensor component");
  FieldArray arr = FieldArray::from_fields(d, std::move(alpha));
  return {d, FieldArray(d, d * d, [conn, arr, d]<class T>(std::span<const T> x, std::span<T> out) {
            if constexpr (!LiftableCarrier<T>) {
              throw_depth_exceeded();
            } else {
              const auto s = seed_all(x);
              const auto ad = arr(std::span<const Dual<T>>(s));
              const auto g = conn(x);
              for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j) {
                  T v = ad[i].partial(j);
                  for (std::size_t k = 0; k < d; ++k) v -= g[Connection::index(d, j, i, k)] * ad[k].value();
                  out[i * d + j] = v;
                }
            }
          })};
}

/// Exterior derivative of a base 2-form: dw[(a*d + b)*d + c] = d_a w_bc - d_b w_ac + d_c w_ab.
inline std::vector<double> exterior_derivative(const TwoForm& w, std::span<const double> x) {
  const std::size_t d = w.dim();
  require_dim(x.size(), d, "exterior_derivative point");
  const auto s = seed_all(x);
  const auto m = w(std::span<const D1>(s));
  std::vector<double> out(d * d * d);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b)
      for (std::size_t c = 0; c < d; ++c)
        out[(a * d + b) * d + c] =
            m[b * d + c].partial(a) - m[a * d + c].partial(b) + m[a * d + b].partial(c);
  return out;
}

}  // namespace tmlift
