#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "support/random_fields.hpp"
#include "tmlift/tmlift.hpp"

using namespace tmlift;

namespace {

VectorField coord(std::size_t d, std::size_t i) { return VectorField::coordinate(d, i); }

ScalarField f(const char* text, std::size_t d = 2) { return parse_field(text, d); }

Connection polar_connection() {
  std::vector<ScalarField> g(8, ScalarField::constant(2, 0.0));
  g[Connection::index(2, 1, 1, 0)] = f("-x1");
  g[Connection::index(2, 0, 1, 1)] = f("1/x1");
  g[Connection::index(2, 1, 0, 1)] = f("1/x1");
  return Connection::from_symbols(2, g);
}

// Central-difference derivative of a vector-valued map along coordinate i.
template <class F>
Point fd_column(F&& w, const Point& x, std::size_t i, double h = 1e-5) {
  Point xp = x, xm = x;
  xp[i] += h;
  xm[i] -= h;
  const Point a = w(xp), b = w(xm);
  Point out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = (a[k] - b[k]) / (2 * h);
  return out;
}

// nabla_X W at x for a vector-valued map W, with derivatives by finite differences.
template <class F>
Point nabla_fd(const Connection& c, const VectorField& X, F&& w, const Point& x) {
  const std::size_t d = c.dim();
  const auto xv = X.at(x);
  const auto wv = w(x);
  const auto g = c(std::span<const double>(x));
  Point out(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    const auto col = fd_column(w, x, i);
    for (std::size_t k = 0; k < d; ++k) {
      out[k] += xv[i] * col[k];
      for (std::size_t j = 0; j < d; ++j) out[k] += g[Connection::index(d, i, j, k)] * xv[i] * wv[j];
    }
  }
  return out;
}

// Paper-sign R(X,Y)Z = nabla_[X,Y] Z - nabla_X nabla_Y Z + nabla_Y nabla_X Z, evaluated definitionally.
Point curvature_definitional(const Connection& c, const VectorField& X, const VectorField& Y, const VectorField& Z,
                             const Point& x) {
  const auto XY = lie_bracket(X, Y);
  const auto a = covariant_derivative(c, XY, Z, x);
  const auto b = nabla_fd(c, X, [&](const Point& p) { return covariant_derivative(c, Y, Z, p); }, x);
  const auto e = nabla_fd(c, Y, [&](const Point& p) { return covariant_derivative(c, X, Z, p); }, x);
  Point out(x.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = a[k] - b[k] + e[k];
  return out;
}

double max_abs(const Point& v) {
  double m = 0;
  for (double a : v) m = std::max(m, std::abs(a));
  return m;
}

}  // namespace

TEST(LieBracket, CoordinateFieldsCommute) {
  EXPECT_EQ(max_abs(lie_bracket(coord(2, 0), coord(2, 1)).at(std::vector<double>{0.3, 0.4})), 0.0);
}

TEST(LieBracket, HandExpansion) {
  const auto Y = VectorField::from_components({f("0"), f("x1")});
  const auto br = lie_bracket(coord(2, 0), Y).at(std::vector<double>{0.7, -0.2});
  EXPECT_DOUBLE_EQ(br[0], 0.0);
  EXPECT_DOUBLE_EQ(br[1], 1.0);
}

TEST(LieBracket, SelfBracketVanishes) {
  testkit::RandomFields rf(3);
  for (int k = 0; k < 10; ++k) {
    const auto X = rf.vector_field(3);
    EXPECT_LE(max_abs(lie_bracket(X, X).at(rf.point(3))), 1e-14);
  }
}

TEST(Torsion, SymmetricSymbolsAreTorsionFree) {
  const auto c = polar_connection();
  const std::vector<double> x{1.5, 0.2};
  EXPECT_LE(max_abs(torsion(c, coord(2, 0), coord(2, 1), x)), 1e-15);
}

TEST(Torsion, NegatedSignExample) {
  std::vector<ScalarField> g(8, ScalarField::constant(2, 0.0));
  g[Connection::index(2, 0, 1, 0)] = f("1");
  const auto c = Connection::from_symbols(2, g);
  const std::vector<double> x{0.1, 0.9};
  const auto t = torsion(c, coord(2, 0), coord(2, 1), x);
  EXPECT_DOUBLE_EQ(t[0], -1.0);
  EXPECT_DOUBLE_EQ(t[1], 0.0);
  const auto tc = torsion_at(c, x, std::vector<double>{1, 0}, std::vector<double>{0, 1});
  EXPECT_DOUBLE_EQ(tc[0], -1.0);
}

TEST(Torsion, AntisymmetricAndMatchesComponentFormula) {
  testkit::RandomFields rf(8);
  for (int k = 0; k < 10; ++k) {
    const auto c = rf.connection(3);
    const auto X = rf.vector_field(3), Y = rf.vector_field(3);
    const auto x = rf.point(3);
    const auto a = torsion(c, X, Y, x), b = torsion(c, Y, X, x);
    const auto t = torsion_at(c, x, X.at(x), Y.at(x));
    EXPECT_LE(max_abs(torsion(c, X, X, x)), 1e-12);
    for (std::size_t i = 0; i < 3; ++i) {
      EXPECT_NEAR(a[i], -b[i], 1e-12);
      EXPECT_NEAR(a[i], t[i], 1e-12);
    }
  }
}

TEST(Curvature, FlatConnection) {
  const auto c = Connection::flat(2);
  EXPECT_EQ(max_abs(curvature(c, coord(2, 0), coord(2, 1), coord(2, 1), std::vector<double>{0.5, 0.5})), 0.0);
}

TEST(Curvature, PolarCoordinatesAreFlat) {
  const auto c = polar_connection();
  const Point x{2.0, 0.5};
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t l = 0; l < 2; ++l) {
        EXPECT_LE(max_abs(curvature(c, coord(2, i), coord(2, j), coord(2, l), x)), 1e-14);
        EXPECT_LE(max_abs(curvature_definitional(c, coord(2, i), coord(2, j), coord(2, l), x)), 1e-6);
      }
}

TEST(Curvature, RoundSphereSign) {
  // g = diag(1, sin^2): the standard R(d1,d2)d2 = sin^2 d1, so the paper sign gives -sin^2 d1.
  const auto g = CovariantTwoTensor::from_components(2, {f("1"), f("0"), f("0"), f("sin(x1)^2")});
  const Point x{1.1, 0.3};
  const auto r = curvature(levi_civita(g), coord(2, 0), coord(2, 1), coord(2, 1), x);
  EXPECT_NEAR(r[0], -std::sin(1.1) * std::sin(1.1), 1e-12);
  EXPECT_NEAR(r[1], 0.0, 1e-12);
}

TEST(Curvature, ComponentFormulaMatchesDefinition) {
  testkit::RandomFields rf(17);
  for (int k = 0; k < 5; ++k) {
    const std::size_t d = 2 + k % 2;
    const auto c = rf.connection(d);
    for (int p = 0; p < 50; ++p) {
      const auto X = rf.vector_field(d), Y = rf.vector_field(d), Z = rf.vector_field(d);
      const auto x = rf.point(d);
      const auto a = curvature(c, X, Y, Z, x);
      const auto b = curvature_definitional(c, X, Y, Z, x);
      for (std::size_t i = 0; i < d; ++i) EXPECT_NEAR(a[i], b[i], 1e-6);
      const auto swapped = curvature(c, Y, X, Z, x);
      const auto same = curvature(c, X, X, Z, x);
      for (std::size_t i = 0; i < d; ++i) {
        EXPECT_NEAR(a[i], -swapped[i], 1e-12);
        EXPECT_NEAR(same[i], 0.0, 1e-12);
      }
    }
  }
}

TEST(CovariantDerivative, FlatConstantTensorIsParallel) {
  const auto T = CovariantTwoTensor::from_components(2, {f("1"), f("2"), f("3"), f("4")});
  EXPECT_EQ(cov_deriv_two_tensor(Connection::flat(2), T, coord(2, 0), coord(2, 1), coord(2, 0),
                                 std::vector<double>{0.2, 0.1}),
            0.0);
}

TEST(CovariantDerivative, HandExpansion) {
  const auto T = CovariantTwoTensor::from_components(2, {f("0"), f("x1"), f("0"), f("0")});
  EXPECT_DOUBLE_EQ(cov_deriv_two_tensor(Connection::flat(2), T, coord(2, 0), coord(2, 0), coord(2, 1),
                                        std::vector<double>{0.4, -0.6}),
                   1.0);
}

TEST(CovariantDerivative, TensorialInDirectionAndComponentsAgree) {
  testkit::RandomFields rf(21);
  const auto c = rf.connection(3);
  const auto T = rf.tensor(3);
  for (int k = 0; k < 10; ++k) {
    const auto x = rf.point(3);
    const auto comps = covariant_derivative_components(c, T, x);
    const auto v = rf.point(3);
    const auto X = VectorField::constant(v), X2 = VectorField::constant(std::vector<double>{2 * v[0], 2 * v[1], 2 * v[2]});
    const auto Z = rf.vector_field(3), Y = rf.vector_field(3);
    const double a = cov_deriv_two_tensor(c, T, X, Z, Y, x);
    EXPECT_NEAR(cov_deriv_two_tensor(c, T, X2, Z, Y, x), 2 * a, 1e-12 * (1 + std::abs(a)));
    const auto zv = Z.at(x), yv = Y.at(x);
    double s = 0;
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t p = 0; p < 3; ++p)
        for (std::size_t q = 0; q < 3; ++q) s += v[i] * zv[p] * yv[q] * comps[(i * 3 + p) * 3 + q];
    EXPECT_NEAR(s, a, 1e-11 * (1 + std::abs(a)));
  }
}

TEST(LeviCivita, EuclideanIsFlat) {
  const auto c = levi_civita(CovariantTwoTensor::identity(3));
  EXPECT_EQ(max_abs(c(std::span<const double>(std::vector<double>{0.1, 0.2, 0.3}))), 0.0);
}

TEST(LeviCivita, PolarSymbols) {
  const auto g = CovariantTwoTensor::from_components(2, {f("1"), f("0"), f("0"), f("x1^2")});
  const auto c = levi_civita(g);
  const Point x{1.7, -0.4};
  const auto s = c(std::span<const double>(x));
  const auto ref = polar_connection()(std::span<const double>(x));
  for (std::size_t i = 0; i < 8; ++i) EXPECT_NEAR(s[i], ref[i], 1e-14) << i;
}

TEST(LeviCivita, MetricIsParallelAndTorsionFree) {
  testkit::RandomFields rf(31);
  for (std::size_t d = 2; d <= 3; ++d) {
    // g = 3 I + small symmetric polynomial perturbation
    std::vector<ScalarField> comps(d * d, ScalarField::constant(d, 0.0));
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i; j < d; ++j) {
        const auto p = rf.poly_field(d, 0.3);
        comps[i * d + j] = i == j ? ScalarField::constant(d, 3.0) + p : p;
        comps[j * d + i] = comps[i * d + j];
      }
    const auto g = CovariantTwoTensor::from_components(d, comps);
    const auto c = levi_civita(g);
    for (int p = 0; p < 50; ++p) {
      const auto x = rf.point(d);
      for (double v : covariant_derivative_components(c, g, x)) EXPECT_LE(std::abs(v), 1e-8);
      const auto X = rf.vector_field(d), Y = rf.vector_field(d);
      EXPECT_LE(max_abs(torsion(c, X, Y, x)), 1e-10);
    }
  }
}

TEST(LeviCivita, SingularMetricThrows) {
  const auto g = CovariantTwoTensor::from_components(2, {f("1"), f("0"), f("0"), f("x1^2")});
  const Point x0{0.0, 0.0};
  EXPECT_THROW(levi_civita(g)(std::span<const double>(x0)), SingularMatrixError);
}

TEST(Codazzi, FlatConstantVanishes) {
  const auto A = CovariantTwoTensor::from_components(2, {f("1"), f("2"), f("-3"), f("4")});
  EXPECT_EQ(codazzi_residual(Connection::flat(2), A, coord(2, 0), coord(2, 1), coord(2, 0),
                             std::vector<double>{0.3, 0.3}),
            0.0);
}

TEST(Codazzi, ExponentialOneFormDerivative) {
  const auto A = one_form_derivative_tensor(Connection::flat(2), {f("exp(x1)"), f("exp(2*x2)")});
  testkit::RandomFields rf(4);
  for (int p = 0; p < 20; ++p) {
    const auto x = rf.point(2);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j)
        for (std::size_t k = 0; k < 2; ++k)
          EXPECT_LE(std::abs(codazzi_residual(Connection::flat(2), A, coord(2, i), coord(2, j), coord(2, k), x)), 1e-12);
  }
}

TEST(Codazzi, BrokenTensorHandExpansion) {
  const auto A = CovariantTwoTensor::from_components(2, {f("0"), f("x1"), f("0"), f("0")});
  EXPECT_DOUBLE_EQ(codazzi_residual(Connection::flat(2), A, coord(2, 0), coord(2, 1), coord(2, 0),
                                    std::vector<double>{0.5, 0.5}),
                   1.0);
}

TEST(Codazzi, TensorialInZ) {
  testkit::RandomFields rf(12);
  const auto c = rf.connection(2);
  const auto A = rf.tensor(2);
  const auto X = rf.vector_field(2), Y = rf.vector_field(2);
  const auto x = rf.point(2);
  const auto z = rf.point(2);
  const double r1 = codazzi_residual(c, A, X, Y, VectorField::constant(z), x);
  const double r3 = codazzi_residual(c, A, X, Y, VectorField::constant(std::vector<double>{-3 * z[0], -3 * z[1]}), x);
  EXPECT_NEAR(r3, -3 * r1, 1e-12 * (1 + std::abs(r1)));
}

TEST(OneFormDerivative, ConstantFormIsZero) {
  const auto A = one_form_derivative_tensor(Connection::flat(2), {f("2"), f("-1")});
  EXPECT_EQ(max_abs(A.at(std::vector<double>{0.1, 0.2})), 0.0);
}

TEST(OneFormDerivative, HandExpansion) {
  const auto A = one_form_derivative_tensor(Connection::flat(2), {f("x2"), f("0")});
  const auto a = A.at(std::vector<double>{0.1, 0.2});
  EXPECT_EQ(a, (std::vector<double>{0, 1, 0, 0}));
}

TEST(OneFormDerivative, DiagonalExponentialEqualsBD) {
  const auto A = one_form_derivative_tensor(Connection::flat(2), {f("exp(x1)"), f("exp(2*x2)")});
  const Point x{0.3, -0.7};
  const auto a = A.at(x);
  EXPECT_NEAR(a[0], std::exp(0.3), 1e-14);
  EXPECT_NEAR(a[1], 0.0, 1e-14);
  EXPECT_NEAR(a[2], 0.0, 1e-14);
  EXPECT_NEAR(a[3], 2 * std::exp(-1.4), 1e-14);
}

TEST(OneFormDerivative, UsesConnection) {
  // A_ij = d_j alpha_i - Gamma_ji^k alpha_k
  testkit::RandomFields rf(13);
  const auto c = rf.connection(2);
  const auto a0 = rf.poly_field(2), a1 = rf.poly_field(2);
  const auto A = one_form_derivative_tensor(c, {a0, a1});
  const auto x = rf.point(2);
  const auto g = c(std::span<const double>(x));
  const double al[2] = {a0(x), a1(x)};
  const ScalarField alpha[2] = {a0, a1};
  const auto av = A.at(x);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      double ref = fd_partial(alpha[i], j, x);
      for (std::size_t k = 0; k < 2; ++k) ref -= g[Connection::index(2, j, i, k)] * al[k];
      EXPECT_NEAR(av[i * 2 + j], ref, 1e-8);
    }
}

TEST(TwoForm, AntisymmetryChecked) {
  const std::vector<Point> samples{{0.1, 0.2}, {0.5, -0.5}};
  EXPECT_NO_THROW(TwoForm::from_matrix(2, {f("0"), f("x1"), f("-x1"), f("0")}, samples));
  EXPECT_THROW(TwoForm::from_matrix(2, {f("0"), f("x1"), f("x1"), f("0")}, samples), NotAntisymmetricError);
  EXPECT_THROW(TwoForm::from_matrix(2, {f("1"), f("0"), f("0"), f("0")}, samples), NotAntisymmetricError);
  const auto w = TwoForm::from_upper(3, {f("1", 3), f("2", 3), f("3", 3)});
  const auto m = w.at(std::vector<double>{0, 0, 0});
  EXPECT_EQ(m, (std::vector<double>{0, 1, 2, -1, 0, 3, -2, -3, 0}));
}

TEST(ExteriorDerivative, BaseTwoForm) {
  // w = x3 dx1^dx2 -> dw = dx3^dx1^dx2, component (1,2,3) = 1
  const auto w = TwoForm::from_upper(3, {f("x3", 3), f("0", 3), f("0", 3)});
  const auto dw = exterior_derivative(w, std::vector<double>{0.2, 0.4, 0.6});
  EXPECT_DOUBLE_EQ(dw[(0 * 3 + 1) * 3 + 2], 1.0);
  EXPECT_DOUBLE_EQ(dw[(1 * 3 + 0) * 3 + 2], -1.0);
  EXPECT_DOUBLE_EQ(dw[(2 * 3 + 0) * 3 + 1], 1.0);
}
