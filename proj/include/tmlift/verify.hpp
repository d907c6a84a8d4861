#pragma once

/**
 * @file verify.hpp
 * @brief Sampled numeric certification of the identities satisfied by lifted forms.
 *
 * Every check samples seeded points inside a chart box, records the largest
 * absolute residual and keeps the five worst points.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tmlift/expr.hpp"
#include "tmlift/field.hpp"
#include "tmlift/geometry.hpp"
#include "tmlift/lift.hpp"
#include "tmlift/linalg.hpp"

namespace tmlift {

namespace tol {
inline constexpr double kAdExact = 1e-8;
inline constexpr double kFdCrossCheck = 1e-6;
inline constexpr double kClosedness = 1e-7;
inline constexpr double kZeroSection = 1e-8;
inline constexpr double kFrame = 1e-12;
}  // namespace tol

struct Offender {
  Point point;
  double residual = 0.0;
};

struct ResidualReport {
  std::string name;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool passed = true;
  std::vector<Offender> offenders;  // worst first, at most kMaxOffenders
};

inline constexpr std::size_t kMaxOffenders = 5;

/// Collects per-point residuals; NaN counts as an infinite residual.
class ResidualAccumulator {
 public:
  ResidualAccumulator(std::string name, std::uint64_t seed, double tolerance)
      : name_(std::move(name)), seed_(seed), tol_(tolerance) {}

  void add(const Point& p, double residual) {
    const double r = std::isnan(residual) ? std::numeric_limits<double>::infinity() : std::abs(residual);
    all_.push_back({p, r});
  }

  ResidualReport finish() const {
    ResidualReport rep{name_, seed_, all_.size(), 0.0, tol_, true, {}};
    auto order = all_;
    std::sort(order.begin(), order.end(), [](const Offender& a, const Offender& b) {
      if (a.residual != b.residual) return a.residual > b.residual;
      return a.point < b.point;
    });
    if (!order.empty()) rep.max_residual = order.front().residual;
    rep.passed = rep.max_residual <= tol_;
    order.resize(std::min(order.size(), kMaxOffenders));
    rep.offenders = std::move(order);
    return rep;
  }

 private:
  std::string name_;
  std::uint64_t seed_;
  double tol_;
  std::vector<Offender> all_;
};

struct Box {
  std::vector<std::pair<double, double>> bounds;

  std::size_t dim() const noexcept { return bounds.size(); }

  static Box cube(std::size_t d, double lo, double hi) { return {std::vector<std::pair<double, double>>(d, {lo, hi})}; }

  bool contains(std::span<const double> x) const {
    if (x.size() != bounds.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i] < bounds[i].first || x[i] > bounds[i].second) return false;
    return true;
  }
};

/// Seeded sampling; the same plan always yields the same points on every platform.
struct SamplingPlan {
  Box box;
  std::size_t samples = 50;
  std::uint64_t seed = 42;

  std::vector<Point> base_points() const {
    std::mt19937_64 rng(seed);
    std::vector<Point> pts(samples);
    for (auto& p : pts) p = draw_base(rng);
    return pts;
  }

  /// Fiber vectors are uniform in the cube of half-width 1/sqrt(d), so |u| <= 1.
  std::vector<TangentPoint> tangent_points() const {
    std::mt19937_64 rng(seed);
    const std::size_t d = box.dim();
    const double r = 1.0 / std::sqrt(static_cast<double>(d));
    std::vector<TangentPoint> pts(samples);
    for (auto& p : pts) {
      p.x = draw_base(rng);
      p.u.resize(d);
      for (auto& v : p.u) v = -r + 2.0 * r * unit(rng);
    }
    return pts;
  }

 private:
  // std::uniform_real_distribution is implementation-defined; this is not.
  static double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

  Point draw_base(std::mt19937_64& rng) const {
    Point x(box.dim());
    for (std::size_t i = 0; i < x.size(); ++i) {
      const auto [lo, hi] = box.bounds[i];
      x[i] = lo + (hi - lo) * unit(rng);
    }
    return x;
  }
};

/// An evaluation failure at a sampled point, carrying that point.
class SampleEvaluationError : public std::runtime_error {
 public:
  SampleEvaluationError(const std::string& check, Point point, const std::string& cause, std::string subexpression)
      : std::runtime_error(check + ": evaluation failed at " + format(point) + ": " + cause),
        point_(std::move(point)),
        subexpression_(std::move(subexpression)) {}

  const Point& point() const noexcept { return point_; }
  const std::string& subexpression() const noexcept { return subexpression_; }

 private:
  static std::string format(const Point& p) {
    std::string s = "(";
    for (std::size_t i = 0; i < p.size(); ++i) s += (i ? ", " : "") + detail::format_number(p[i]);
    return s + ")";
  }

  Point point_;
  std::string subexpression_;
};

class DegenerateTensorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

template <class F>
double at_sample(const std::string& check, const Point& p, F&& f) {
  try {
    return f();
  } catch (const EvaluationDomainError& e) {
    throw SampleEvaluationError(check, p, e.what(), e.subexpression());
  } catch (const SingularMatrixError& e) {
    throw SampleEvaluationError(check, p, e.what(), "");
  }
}

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double a : v) m = std::max(m, std::isnan(a) ? std::numeric_limits<double>::infinity() : std::abs(a));
  return m;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double r = std::abs(a[i] - b[i]);
    m = std::max(m, std::isnan(r) ? std::numeric_limits<double>::infinity() : r);
  }
  return m;
}

inline Point unit_vector(std::size_t d, std::size_t i) {
  Point e(d, 0.0);
  e[i] = 1.0;
  return e;
}

}  // namespace detail

/// Full coordinate 3-form dF[(a*n + b)*n + c] = d_a F_bc - d_b F_ac + d_c F_ab at p.
inline std::vector<double> exterior_derivative(const TwoFormTM& F, const TangentPoint& p) {
  const std::size_t n = F.dim();
  require_dim(p.dim(), F.base_dim(), "exterior_derivative point");
  const auto c = p.coords();
  const auto s = seed_all(std::span<const double>(c));
  const auto m = F(std::span<const D1>(s));
  std::vector<double> out(n * n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t k = 0; k < n; ++k)
        out[(a * n + b) * n + k] =
            m[b * n + k].partial(a) - m[a * n + k].partial(b) + m[a * n + b].partial(k);
  return out;
}

inline double exterior_derivative_3(const TwoFormTM& F, const TangentPoint& p, std::size_t a, std::size_t b,
                                    std::size_t c) {
  const std::size_t n = F.dim();
  if (a >= n || b >= n || c >= n) throw std::out_of_range("exterior_derivative_3: frame index out of range");
  return exterior_derivative(F, p)[(a * n + b) * n + c];
}

/// sum dF_abc V1^a V2^b V3^c with the vectors frozen at the evaluation point.
inline double contract3(std::span<const double> dF, std::size_t n, std::span<const double> v1,
                        std::span<const double> v2, std::span<const double> v3) {
  double s = 0.0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c) s += dF[(a * n + b) * n + c] * v1[a] * v2[b] * v3[c];
  return s;
}

struct ClosednessBlock {
  double numeric = 0.0;         // dOmega on the frozen lifted frames
  double formula = 0.0;         // closed-form right-hand side
  double curvature_term = 0.0;  // the part of `formula` carrying R
  double mismatch() const noexcept { return numeric - formula; }
  /// Right-hand side with R taken in the opposite sign (the other sign convention).
  double flipped_formula() const noexcept { return formula - 2.0 * curvature_term; }
};

struct ClosednessResiduals {
  ClosednessBlock hhh;  // dOmega(X^h, Y^h, Z^h)
  ClosednessBlock vvv;  // dOmega(X^v, Y^v, Z^v)
  ClosednessBlock vvh;  // dOmega(X^v, Y^v, Z^h)
  ClosednessBlock hhv;  // dOmega(X^h, Y^h, Z^v)
};

/// The curvature terms enter through R_std = -R (R as returned by curvature()):
/// with that sign the identities hold; `flipped_formula` gives the other reading.
inline ClosednessResiduals closedness_residuals(const LiftSpec& spec, const TangentPoint& p, const VectorField& X,
                                                const VectorField& Y, const VectorField& Z) {
  spec.validate();
  const std::size_t d = spec.dim();
  require_dim(X.dim(), d, "closedness_residuals X");
  require_dim(Y.dim(), d, "closedness_residuals Y");
  require_dim(Z.dim(), d, "closedness_residuals Z");
  require_dim(p.dim(), d, "closedness_residuals point");
  const auto& x = p.x;

  const auto dO = exterior_derivative(lift_two_form(spec), p);
  const auto fx = lift_frames(spec.conn, X, p);
  const auto fy = lift_frames(spec.conn, Y, p);
  const auto fz = lift_frames(spec.conn, Z, p);
  const std::size_t n = 2 * d;

  const auto xv = X.at(x);
  const auto yv = Y.at(x);
  const auto zv = Z.at(x);
  const auto R = curvature_tensor(spec.conn, x);
  const auto Av = spec.A.at(x);
  const auto w0 = spec.omega0.at(x);
  // R_std(U,V)u
  auto Ru = [&](const Point& U, const Point& V) {
    auto r = apply_curvature(R, d, U, V, p.u);
    for (auto& c : r) c = -c;
    return r;
  };

  ClosednessResiduals out;

  const auto dw1 = exterior_derivative(spec.omega1, x);
  const double cyc = detail::bilinear(Av, d, Ru(xv, yv), zv) + detail::bilinear(Av, d, Ru(yv, zv), xv) +
                     detail::bilinear(Av, d, Ru(zv, xv), yv);
  out.hhh = {contract3(dO, n, fx.horizontal, fy.horizontal, fz.horizontal), contract3(dw1, d, xv, yv, zv) + cyc, cyc};

  out.vvv = {contract3(dO, n, fx.vertical, fy.vertical, fz.vertical), 0.0};

  const auto nw0 = covariant_derivative_components(spec.conn, spec.omega0.as_tensor(), x);
  double vvh = 0.0;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) vvh += zv[i] * xv[a] * yv[b] * nw0[(i * d + a) * d + b];
  out.vvh = {contract3(dO, n, fx.vertical, fy.vertical, fz.horizontal), vvh};

  const auto nA = covariant_derivative_components(spec.conn, spec.A, x);
  auto nabla_A = [&](const Point& V, const Point& S, const Point& T) {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b) s += V[i] * S[a] * T[b] * nA[(i * d + a) * d + b];
    return s;
  };
  const auto tau = torsion_at(spec.conn, x, xv, yv);
  const double rw = detail::bilinear(w0, d, Ru(xv, yv), zv);
  const double hhv = -nabla_A(xv, zv, yv) + nabla_A(yv, zv, xv) + detail::bilinear(Av, d, zv, tau) + rw;
  out.hhv = {contract3(dO, n, fx.horizontal, fy.horizontal, fz.vertical), hhv, rw};
  return out;
}

struct NondegeneracyResult {
  bool nondegenerate = false;
  double determinant = 0.0;
  double threshold = 0.0;
};

/// Block matrix (P, -A^T; A, Q) with P = omega1, Q = omega0: the lift at u = 0.
inline std::vector<double> nondegeneracy_block_matrix(const LiftSpec& spec, std::span<const double> x) {
  spec.validate();
  const std::size_t d = spec.dim();
  const std::size_t n = 2 * d;
  const auto P = spec.omega1.at(x);
  const auto Q = spec.omega0.at(x);
  const auto A = spec.A.at(x);
  std::vector<double> m(n * n, 0.0);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      m[i * n + j] = P[i * d + j];
      m[i * n + d + j] = -A[j * d + i];
      m[(d + i) * n + j] = A[i * d + j];
      m[(d + i) * n + d + j] = Q[i * d + j];
    }
  return m;
}

inline NondegeneracyResult nondegeneracy_check(const LiftSpec& spec, std::span<const double> x) {
  const std::size_t n = 2 * spec.dim();
  const auto m = nondegeneracy_block_matrix(spec, x);
  const double scale = 1.0 + detail::max_abs(m);
  NondegeneracyResult r;
  r.determinant = determinant(m, n);
  r.threshold = 1e-12 * std::pow(scale, static_cast<double>(n));
  r.nondegenerate = std::abs(r.determinant) > r.threshold;
  return r;
}

struct BracketResiduals {
  Point hh;  // [X^h,Y^h] - [X,Y]^h + (R_std(X,Y)u)^v
  Point vv;  // [X^v,Y^v]
  Point hv;  // [X^h,Y^v] - (nabla_X Y)^v
};

namespace detail {

inline FieldArray horizontal_field(const Connection& conn, const VectorField& X) {
  const std::size_t d = conn.dim();
  return {2 * d, 2 * d, [conn, X, d]<class T>(std::span<const T> xu, std::span<T> out) {
            const auto x = xu.first(d);
            const auto xv = X(x);
            const auto g = conn(x);
            for (std::size_t i = 0; i < d; ++i) out[i] = xv[i];
            for (std::size_t k = 0; k < d; ++k)
              for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j)
                  out[d + k] -= g[Connection::index(d, i, j, k)] * xv[i] * xu[d + j];
          }};
}

inline FieldArray vertical_field(const VectorField& X) {
  const std::size_t d = X.dim();
  return {2 * d, 2 * d, [X, d]<class T>(std::span<const T> xu, std::span<T> out) {
            const auto xv = X(xu.first(d));
            for (std::size_t i = 0; i < d; ++i) out[d + i] = xv[i];
          }};
}

inline Point bracket(const FieldArray& V, const FieldArray& W, std::span<const double> at) {
  const auto jv = jet(V, at);
  const auto jw = jet(W, at);
  const std::size_t n = at.size();
  Point out(n, 0.0);
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t a = 0; a < n; ++a) out[c] += jv.value[a] * jw.jac[c * n + a] - jw.value[a] * jv.jac[c * n + a];
  return out;
}

}  // namespace detail

inline BracketResiduals bracket_residuals(const Connection& conn, const VectorField& X, const VectorField& Y,
                                          const TangentPoint& p) {
  const std::size_t d = conn.dim();
  require_dim(X.dim(), d, "bracket_residuals X");
  require_dim(Y.dim(), d, "bracket_residuals Y");
  require_dim(p.dim(), d, "bracket_residuals point");
  const auto c = p.coords();
  const auto Xh = detail::horizontal_field(conn, X);
  const auto Yh = detail::horizontal_field(conn, Y);
  const auto Xv = detail::vertical_field(X);
  const auto Yv = detail::vertical_field(Y);

  BracketResiduals r;
  r.hh = detail::bracket(Xh, Yh, c);
  const auto xy = lie_bracket(X, Y).at(p.x);
  const auto lifted = horizontal_lift(conn, p.x, p.u, xy);
  const auto Ru = apply_curvature(curvature_tensor(conn, p.x), d, X.at(p.x), Y.at(p.x), p.u);
  for (std::size_t a = 0; a < 2 * d; ++a) r.hh[a] -= lifted[a];
  for (std::size_t k = 0; k < d; ++k) r.hh[d + k] -= Ru[k];  // -(R_std u)^v = +(R u)^v

  r.vv = detail::bracket(Xv, Yv, c);

  r.hv = detail::bracket(Xh, Yv, c);
  const auto nxy = covariant_derivative(conn, X, Y, p.x);
  for (std::size_t k = 0; k < d; ++k) r.hv[d + k] -= nxy[k];
  return r;
}

/// Largest canonical pairing sum_i dp^i ^ dx^i between pushed-forward horizontal frames.
inline double lagrangian_residual(const CovariantTwoTensor& A, const Connection& conn, const TangentPoint& p) {
  const std::size_t d = conn.dim();
  require_dim(A.dim(), d, "lagrangian_residual");
  require_dim(p.dim(), d, "lagrangian_residual point");
  const auto av = A.at(p.x);
  const double scale = 1.0 + detail::max_abs(av);
  if (std::abs(determinant(av, d)) <= 1e-12 * std::pow(scale, static_cast<double>(d)))
    throw DegenerateTensorError("lagrangian_residual: A is degenerate at the base point");

  FieldArray flat(2 * d, 2 * d, [A, d]<class T>(std::span<const T> xu, std::span<T> out) {
    const auto a = A(xu.first(d));
    for (std::size_t i = 0; i < d; ++i) {
      out[i] = xu[i];
      for (std::size_t j = 0; j < d; ++j) out[d + i] += xu[d + j] * a[j * d + i];
    }
  });
  const auto c = p.coords();
  const auto J = jacobian(flat, c);
  const std::size_t n = 2 * d;
  std::vector<Point> pushed;
  for (std::size_t l = 0; l < d; ++l) {
    const auto h = horizontal_lift(conn, p.x, p.u, detail::unit_vector(d, l));
    Point w(n, 0.0);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t s = 0; s < n; ++s) w[r] += J[r * n + s] * h[s];
    pushed.push_back(std::move(w));
  }
  double worst = 0.0;
  for (std::size_t l = 0; l < d; ++l)
    for (std::size_t s = l + 1; s < d; ++s) {
      double v = 0.0;
      for (std::size_t i = 0; i < d; ++i) v += pushed[l][d + i] * pushed[s][i] - pushed[s][d + i] * pushed[l][i];
      worst = std::max(worst, std::abs(v));
    }
  return worst;
}

namespace detail {

/// Coordinate Codazzi residual at x, maximised over all coordinate triples.
inline double max_codazzi(const Connection& conn, const CovariantTwoTensor& A, std::span<const double> x) {
  const std::size_t d = conn.dim();
  double worst = 0.0;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j)
      for (std::size_t k = 0; k < d; ++k) {
        const double r = codazzi_residual(conn, A, VectorField::coordinate(d, i), VectorField::coordinate(d, j),
                                          VectorField::coordinate(d, k), x);
        worst = std::max(worst, std::isnan(r) ? std::numeric_limits<double>::infinity() : std::abs(r));
      }
  return worst;
}

}  // namespace detail

struct Prop2Report {
  ResidualReport codazzi;     // (A, conn) satisfies Codazzi
  ResidualReport liouville;   // lift of (conn, 0, 0, A) equals the Liouville pullback
  ResidualReport closed;      // the lift is closed
  ResidualReport lagrangian;  // A-flat maps the horizontal distribution to a Lagrangian one

  bool agreement() const {
    const bool p = codazzi.passed;
    return liouville.passed == p && closed.passed == p && lagrangian.passed == p;
  }
  std::vector<ResidualReport> all() const { return {codazzi, liouville, closed, lagrangian}; }
};

inline Prop2Report prop2_report(const Connection& conn, const CovariantTwoTensor& A, const SamplingPlan& plan,
                                double tolerance = tol::kClosedness) {
  const std::size_t d = conn.dim();
  require_dim(A.dim(), d, "prop2_report");
  require_dim(plan.box.dim(), d, "prop2_report box");
  const LiftSpec spec{conn, TwoForm::zero(d), TwoForm::zero(d), A};
  const auto Omega = lift_two_form(spec);
  const auto L = liouville_pullback(A);

  ResidualAccumulator ci("prop2.codazzi", plan.seed, tolerance);
  ResidualAccumulator cii("prop2.liouville", plan.seed, tolerance);
  ResidualAccumulator ciii("prop2.closed", plan.seed, tolerance);
  ResidualAccumulator civ("prop2.lagrangian", plan.seed, tolerance);
  for (const auto& p : plan.tangent_points()) {
    const auto c = p.coords();
    ci.add(p.x, detail::at_sample("prop2.codazzi", p.x, [&] { return detail::max_codazzi(conn, A, p.x); }));
    cii.add(c, detail::at_sample("prop2.liouville", c, [&] { return detail::max_abs_diff(Omega.at(p), L.at(p)); }));
    ciii.add(c, detail::at_sample("prop2.closed", c, [&] { return detail::max_abs(exterior_derivative(Omega, p)); }));
    civ.add(c, detail::at_sample("prop2.lagrangian", c, [&] { return lagrangian_residual(A, conn, p); }));
  }
  return {ci.finish(), cii.finish(), ciii.finish(), civ.finish()};
}

struct Prop1Report {
  ResidualReport domega1;         // d omega1 = 0
  ResidualReport nabla_omega0;    // nabla omega0 = 0
  ResidualReport curvature;       // omega0(R(X,Y)Z, T) = 0
  ResidualReport codazzi;         // (A, nabla) Codazzi
  ResidualReport closed;          // full numeric dOmega

  bool conditions_pass() const { return domega1.passed && nabla_omega0.passed && curvature.passed && codazzi.passed; }
  bool agreement() const { return closed.passed == conditions_pass(); }
  std::vector<ResidualReport> all() const { return {domega1, nabla_omega0, curvature, codazzi, closed}; }
};

inline Prop1Report prop1_report(const LiftSpec& spec, const SamplingPlan& plan, double tolerance = tol::kClosedness) {
  spec.validate();
  const std::size_t d = spec.dim();
  require_dim(plan.box.dim(), d, "prop1_report box");
  const auto Omega = lift_two_form(spec);
  const auto w0t = spec.omega0.as_tensor();

  ResidualAccumulator c1("prop1.domega1", plan.seed, tolerance);
  ResidualAccumulator c2("prop1.nabla_omega0", plan.seed, tolerance);
  ResidualAccumulator c3("prop1.curvature_omega0", plan.seed, tolerance);
  ResidualAccumulator c4("prop1.codazzi", plan.seed, tolerance);
  ResidualAccumulator c5("prop1.closed", plan.seed, tolerance);
  for (const auto& p : plan.tangent_points()) {
    const auto& x = p.x;
    c1.add(x, detail::at_sample("prop1.domega1", x, [&] { return detail::max_abs(exterior_derivative(spec.omega1, x)); }));
    c2.add(x, detail::at_sample("prop1.nabla_omega0", x, [&] {
             double worst = 0.0;
             for (std::size_t i = 0; i < d; ++i)
               for (std::size_t a = 0; a < d; ++a)
                 for (std::size_t b = a + 1; b < d; ++b)
                   worst = std::max(worst, std::abs(cov_deriv_two_tensor(spec.conn, w0t, VectorField::coordinate(d, i),
                                                                         VectorField::coordinate(d, a),
                                                                         VectorField::coordinate(d, b), x)));
             return worst;
           }));
    c3.add(x, detail::at_sample("prop1.curvature_omega0", x, [&] {
             const auto R = curvature_tensor(spec.conn, x);
             const auto w = spec.omega0.at(x);
             double worst = 0.0;
             for (std::size_t i = 0; i < d; ++i)
               for (std::size_t j = i + 1; j < d; ++j)
                 for (std::size_t l = 0; l < d; ++l)
                   for (std::size_t t = 0; t < d; ++t) {
                     double s = 0.0;
                     for (std::size_t k = 0; k < d; ++k) s += R[((k * d + l) * d + i) * d + j] * w[k * d + t];
                     worst = std::max(worst, std::abs(s));
                   }
             return worst;
           }));
    c4.add(x, detail::at_sample("prop1.codazzi", x, [&] { return detail::max_codazzi(spec.conn, spec.A, x); }));
    const auto c = p.coords();
    c5.add(c, detail::at_sample("prop1.closed", c, [&] { return detail::max_abs(exterior_derivative(Omega, p)); }));
  }
  return {c1.finish(), c2.finish(), c3.finish(), c4.finish(), c5.finish()};
}

struct DlambdaReport {
  ResidualReport hh;  // d lambda(X^h, Y^h) = omega(R(X,Y)u, u) / 2
  ResidualReport vv;  // d lambda(X^v, Y^v) = omega(X, Y)
  ResidualReport hv;  // d lambda(X^h, Y^v) = (nabla_X omega)(u, Y) / 2

  std::vector<ResidualReport> all() const { return {hh, vv, hv}; }
};

/// Closed-form values of d lambda on coordinate lifts at p: {hh, vv, hv}, each d x d.
struct DlambdaValues {
  std::vector<double> hh, vv, hv;
};

inline DlambdaValues dlambda_formulas(const TwoForm& omega, const Connection& conn, const TangentPoint& p) {
  const std::size_t d = conn.dim();
  const auto& x = p.x;
  const auto w = omega.at(x);
  const auto R = curvature_tensor(conn, x);
  const auto nw = covariant_derivative_components(conn, omega.as_tensor(), x);
  DlambdaValues v{std::vector<double>(d * d), std::vector<double>(d * d), std::vector<double>(d * d)};
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      const auto Ru = apply_curvature(R, d, detail::unit_vector(d, i), detail::unit_vector(d, j), p.u);
      v.hh[i * d + j] = 0.5 * detail::bilinear(w, d, Ru, p.u);
      v.vv[i * d + j] = w[i * d + j];
      double s = 0.0;
      for (std::size_t a = 0; a < d; ++a) s += p.u[a] * nw[(i * d + a) * d + j];
      v.hv[i * d + j] = 0.5 * s;
    }
  return v;
}

/// Numeric d lambda on frozen coordinate lifts at p, same layout as dlambda_formulas.
inline DlambdaValues dlambda_numeric(const TwoForm& omega, const Connection& conn, const TangentPoint& p) {
  const std::size_t d = conn.dim();
  const std::size_t n = 2 * d;
  const auto m = exterior_derivative(lambda_form(omega, conn)).at(p);
  std::vector<Point> H, V;
  for (std::size_t i = 0; i < d; ++i) {
    H.push_back(horizontal_lift(conn, p.x, p.u, detail::unit_vector(d, i)));
    V.push_back(vertical_lift(detail::unit_vector(d, i)));
  }
  auto pair = [&](const Point& a, const Point& b) { return detail::bilinear(m, n, a, b); };
  DlambdaValues v{std::vector<double>(d * d), std::vector<double>(d * d), std::vector<double>(d * d)};
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      v.hh[i * d + j] = pair(H[i], H[j]);
      v.vv[i * d + j] = pair(V[i], V[j]);
      v.hv[i * d + j] = pair(H[i], V[j]);
    }
  return v;
}

inline DlambdaReport dlambda_report(const TwoForm& omega22, const Connection& conn, const SamplingPlan& plan,
                                    double tolerance = tol::kClosedness) {
  require_dim(omega22.dim(), conn.dim(), "dlambda_report");
  require_dim(plan.box.dim(), conn.dim(), "dlambda_report box");
  ResidualAccumulator hh("dlambda.hh", plan.seed, tolerance);
  ResidualAccumulator vv("dlambda.vv", plan.seed, tolerance);
  ResidualAccumulator hv("dlambda.hv", plan.seed, tolerance);
  for (const auto& p : plan.tangent_points()) {
    const auto c = p.coords();
    DlambdaValues num, f;
    detail::at_sample("dlambda", c, [&] {
      num = dlambda_numeric(omega22, conn, p);
      f = dlambda_formulas(omega22, conn, p);
      return 0.0;
    });
    hh.add(c, detail::max_abs_diff(num.hh, f.hh));
    vv.add(c, detail::max_abs_diff(num.vv, f.vv));
    hv.add(c, detail::max_abs_diff(num.hv, f.hv));
  }
  return {hh.finish(), vv.finish(), hv.finish()};
}

/// max |Omega - candidate| at (x, 0), where the candidate is rebuilt from Omega's zero-section data.
inline ResidualReport zero_section_agreement(const TwoFormTM& Omega, const Connection& conn, const SamplingPlan& plan,
                                             double tolerance = tol::kZeroSection) {
  const std::size_t d = Omega.base_dim();
  require_dim(conn.dim(), d, "zero_section_agreement");
  require_dim(plan.box.dim(), d, "zero_section_agreement box");
  const auto z = extract_zero_section(Omega);
  const auto cand = darboux_candidate(z.omega11, z.omega22, z.A, conn);
  ResidualAccumulator acc("zero_section", plan.seed, tolerance);
  for (const auto& x : plan.base_points()) {
    const TangentPoint p{x, Point(d, 0.0)};
    acc.add(x, detail::at_sample("zero_section", x, [&] { return detail::max_abs_diff(Omega.at(p), cand.at(p)); }));
  }
  return acc.finish();
}

}  // namespace tmlift
