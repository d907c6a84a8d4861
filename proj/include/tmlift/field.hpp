#pragma once

/**
 * @file field.hpp
 * @brief Type-erased scalar and array-valued fields over the numeric carriers.
 *
 * A field body is a generic callable instantiated for every carrier:
 * double, D1 = Dual<double>, D2 = Dual<D1>, D3 = Dual<D2>. A field that needs
 * derivatives of its inputs evaluates them one nesting level deeper; at D3
 * there is no deeper carrier and such fields throw DerivativeDepthError.
 */

#include <concepts>
#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tmlift/dual.hpp"

namespace tmlift {

using D1 = Dual<double>;
using D2 = Dual<D1>;
using D3 = Dual<D2>;

inline constexpr int kMaxCarrierDepth = 3;

template <class T>
concept Carrier = std::same_as<T, double> || std::same_as<T, D1> || std::same_as<T, D2> ||
                  std::same_as<T, D3>;

/// Carriers that still admit one more level of differentiation.
template <class T>
concept LiftableCarrier = Carrier<T> && (dual_depth_v<T> < kMaxCarrierDepth);

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DerivativeDepthError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

[[noreturn]] inline void throw_depth_exceeded() {
  throw DerivativeDepthError("derivative nesting exceeds the deepest supported carrier");
}

inline void require_dim(std::size_t got, std::size_t want, const char* what) {
  if (got != want)
    throw DimensionError(std::string(what) + ": expected dimension " + std::to_string(want) +
                         ", got " + std::to_string(got));
}

/// Seeds every coordinate of x as an independent direction.
template <LiftableCarrier T>
std::vector<Dual<T>> seed_all(std::span<const T> x) {
  if (x.size() > kMaxPartials)
    throw DimensionError("cannot seed " + std::to_string(x.size()) + " directions (max " +
                         std::to_string(kMaxPartials) + ")");
  std::vector<Dual<T>> out;
  out.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out.push_back(Dual<T>::variable(x[i], i, x.size()));
  return out;
}

/// Seeds coordinate i only (single direction, slot 0).
template <LiftableCarrier T>
std::vector<Dual<T>> seed_one(std::span<const T> x, std::size_t i) {
  std::vector<Dual<T>> out(x.begin(), x.end());
  out[i] = Dual<T>::variable(x[i], 0, 1);
  return out;
}

/// Lifts plain values to constants of a carrier.
template <Carrier T>
std::vector<T> as_carrier(std::span<const double> x) {
  return std::vector<T>(x.begin(), x.end());
}

class ScalarField {
 public:
  /// body: generic callable `<class T>(std::span<const T>) -> T`.
  template <class F>
  ScalarField(std::size_t dim, F body)
      : dim_(dim), impl_(std::make_shared<Model<F>>(std::move(body))) {}

  static ScalarField constant(std::size_t dim, double c) {
    return {dim, [c]<class T>(std::span<const T>) -> T { return T(c); }};
  }

  static ScalarField coordinate(std::size_t dim, std::size_t i) {
    if (i >= dim) throw std::out_of_range("coordinate index out of range");
    return {dim, [i]<class T>(std::span<const T> x) -> T { return x[i]; }};
  }

  std::size_t dim() const noexcept { return dim_; }

  template <Carrier T>
  T operator()(std::span<const T> x) const {
    require_dim(x.size(), dim_, "ScalarField");
    return impl_->eval(x);
  }

  template <Carrier T>
  T operator()(const std::vector<T>& x) const {
    return (*this)(std::span<const T>(x));
  }

  friend ScalarField operator+(const ScalarField& f, const ScalarField& g) {
    require_dim(g.dim(), f.dim(), "ScalarField +");
    return {f.dim(), [f, g]<class T>(std::span<const T> x) -> T { return f(x) + g(x); }};
  }
  friend ScalarField operator-(const ScalarField& f, const ScalarField& g) {
    require_dim(g.dim(), f.dim(), "ScalarField -");
    return {f.dim(), [f, g]<class T>(std::span<const T> x) -> T { return f(x) - g(x); }};
  }
  friend ScalarField operator*(const ScalarField& f, const ScalarField& g) {
    require_dim(g.dim(), f.dim(), "ScalarField *");
    return {f.dim(), [f, g]<class T>(std::span<const T> x) -> T { return f(x) * g(x); }};
  }
  friend ScalarField operator-(const ScalarField& f) {
    return {f.dim(), [f]<class T>(std::span<const T> x) -> T { return -f(x); }};
  }
  friend ScalarField operator*(double c, const ScalarField& f) {
    return {f.dim(), [c, f]<class T>(std::span<const T> x) -> T { return T(c) * f(x); }};
  }

 private:
  struct Concept {
    virtual ~Concept() = default;
    virtual double eval(std::span<const double>) const = 0;
    virtual D1 eval(std::span<const D1>) const = 0;
    virtual D2 eval(std::span<const D2>) const = 0;
    virtual D3 eval(std::span<const D3>) const = 0;
  };

  template <class F>
  struct Model final : Concept {
    explicit Model(F f) : body(std::move(f)) {}
    double eval(std::span<const double> x) const override { return body(x); }
    D1 eval(std::span<const D1> x) const override { return body(x); }
    D2 eval(std::span<const D2> x) const override { return body(x); }
    D3 eval(std::span<const D3> x) const override { return body(x); }
    F body;
  };

  std::size_t dim_;
  std::shared_ptr<const Concept> impl_;
};

/// A map R^n -> R^m evaluated in one call (tensor components in bulk).
class FieldArray {
 public:
  /// body: generic callable `<class T>(std::span<const T> in, std::span<T> out) -> void`;
  /// `out` arrives zero-filled.
  template <class F>
  FieldArray(std::size_t in_dim, std::size_t out_size, F body)
      : in_dim_(in_dim), out_size_(out_size), impl_(std::make_shared<Model<F>>(std::move(body))) {}

  /// Bundles independent scalar fields into one array.
  static FieldArray from_fields(std::size_t in_dim, std::vector<ScalarField> fields) {
    for (const auto& f : fields) require_dim(f.dim(), in_dim, "FieldArray component");
    const std::size_t m = fields.size();
    return {in_dim, m,
            [fields = std::move(fields)]<class T>(std::span<const T> x, std::span<T> out) {
              for (std::size_t i = 0; i < fields.size(); ++i) out[i] = fields[i](x);
            }};
  }

  static FieldArray zero(std::size_t in_dim, std::size_t out_size) {
    return {in_dim, out_size, []<class T>(std::span<const T>, std::span<T>) {}};
  }

  std::size_t in_dim() const noexcept { return in_dim_; }
  std::size_t size() const noexcept { return out_size_; }

  template <Carrier T>
  std::vector<T> operator()(std::span<const T> x) const {
    require_dim(x.size(), in_dim_, "FieldArray");
    std::vector<T> out(out_size_);
    impl_->eval(x, std::span<T>(out));
    return out;
  }

  template <Carrier T>
  std::vector<T> operator()(const std::vector<T>& x) const {
    return (*this)(std::span<const T>(x));
  }

  /// Component i as a standalone scalar field.
  ScalarField component(std::size_t i) const {
    if (i >= out_size_) throw std::out_of_range("FieldArray component index out of range");
    return {in_dim_, [self = *this, i]<class T>(std::span<const T> x) -> T { return self(x)[i]; }};
  }

 private:
  struct Concept {
    virtual ~Concept() = default;
    virtual void eval(std::span<const double>, std::span<double>) const = 0;
    virtual void eval(std::span<const D1>, std::span<D1>) const = 0;
    virtual void eval(std::span<const D2>, std::span<D2>) const = 0;
    virtual void eval(std::span<const D3>, std::span<D3>) const = 0;
  };

  template <class F>
  struct Model final : Concept {
    explicit Model(F f) : body(std::move(f)) {}
    void eval(std::span<const double> x, std::span<double> o) const override { body(x, o); }
    void eval(std::span<const D1> x, std::span<D1> o) const override { body(x, o); }
    void eval(std::span<const D2> x, std::span<D2> o) const override { body(x, o); }
    void eval(std::span<const D3> x, std::span<D3> o) const override { body(x, o); }
    F body;
  };

  std::size_t in_dim_;
  std::size_t out_size_;
  std::shared_ptr<const Concept> impl_;
};

/// Value and full gradient of f at x, carried one level deeper.
template <LiftableCarrier T>
Dual<T> differentiate(const ScalarField& f, std::span<const T> x) {
  require_dim(x.size(), f.dim(), "differentiate");
  const auto seeded = seed_all(x);
  return f(std::span<const Dual<T>>(seeded));
}

/// Values and Jacobian rows of every component of F at x.
template <LiftableCarrier T>
std::vector<Dual<T>> differentiate(const FieldArray& F, std::span<const T> x) {
  require_dim(x.size(), F.in_dim(), "differentiate");
  const auto seeded = seed_all(x);
  return F(std::span<const Dual<T>>(seeded));
}

/// Dense Jacobian J[r][c] = d out_r / d x_c, row-major, as plain doubles.
inline std::vector<double> jacobian(const FieldArray& F, std::span<const double> x) {
  const auto d = differentiate(F, x);
  std::vector<double> J(F.size() * x.size());
  for (std::size_t r = 0; r < F.size(); ++r)
    for (std::size_t c = 0; c < x.size(); ++c) J[r * x.size() + c] = d[r].partial(c);
  return J;
}

/// df/dx_i at x via a single seeded direction.
inline double partial(const ScalarField& f, std::size_t i, std::span<const double> x) {
  require_dim(x.size(), f.dim(), "partial");
  if (i >= f.dim()) throw std::out_of_range("partial: coordinate index out of range");
  const auto seeded = seed_one(x, i);
  return f(std::span<const D1>(seeded)).partial(0);
}

inline constexpr double kDefaultFdStep = 1e-5;

/// Central difference (f(x + h e_i) - f(x - h e_i)) / 2h.
inline double fd_partial(const ScalarField& f, std::size_t i, std::span<const double> x,
                         double h = kDefaultFdStep) {
  require_dim(x.size(), f.dim(), "fd_partial");
  if (i >= f.dim()) throw std::out_of_range("fd_partial: coordinate index out of range");
  if (!(h > 0.0)) throw std::invalid_argument("fd_partial: step must be positive");
  std::vector<double> xp(x.begin(), x.end());
  std::vector<double> xm(x.begin(), x.end());
  xp[i] += h;
  xm[i] -= h;
  return (f(xp) - f(xm)) / (2.0 * h);
}

}  // namespace tmlift
