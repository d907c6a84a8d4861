#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "support/random_fields.hpp"
#include "tmlift/tmlift.hpp"

using namespace tmlift;

namespace {

ScalarField f(const char* text, std::size_t d = 2) { return parse_field(text, d); }

double pair(const std::vector<double>& m, const Point& a, const Point& b) {
  return detail::bilinear(m, a.size(), a, b);
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST(TangentPoint, Coordinates) {
  const TangentPoint p{{1, 2}, {3, 4}};
  EXPECT_EQ(p.dim(), 2u);
  EXPECT_EQ(p.coords(), (Point{1, 2, 3, 4}));
}

TEST(Frames, HorizontalLiftAtZeroSectionIsTheBaseVector) {
  testkit::RandomFields rf(1);
  const auto c = rf.connection(3);
  const auto x = rf.point(3);
  const Point X{0.3, -1.0, 2.0};
  EXPECT_EQ(horizontal_lift(c, x, Point(3, 0.0), X), (Point{0.3, -1.0, 2.0, 0, 0, 0}));
  EXPECT_EQ(vertical_lift(X), (Point{0, 0, 0, 0.3, -1.0, 2.0}));
}

TEST(Frames, HorizontalLiftHandExpansion) {
  // Gamma_12^1 = 1: X^h = X - X^1 u^2 d/du^1
  std::vector<ScalarField> g(8, ScalarField::constant(2, 0.0));
  g[Connection::index(2, 0, 1, 0)] = f("1");
  const auto c = Connection::from_symbols(2, g);
  const auto h = horizontal_lift(c, Point{0, 0}, Point{0.5, 3.0}, Point{2.0, 1.0});
  EXPECT_EQ(h, (Point{2.0, 1.0, -6.0, 0.0}));
}

TEST(Frames, LiftFramesMatchPointwise) {
  testkit::RandomFields rf(2);
  const auto c = rf.connection(2);
  const auto X = rf.vector_field(2);
  const auto p = rf.tangent_point(2);
  const auto fr = lift_frames(c, X, p);
  EXPECT_EQ(fr.horizontal, horizontal_lift(c, p.x, p.u, X.at(p.x)));
  EXPECT_EQ(fr.vertical, vertical_lift(X.at(p.x)));
}

TEST(TwoFormTM, UpperStorage) {
  EXPECT_EQ(TwoFormTM::upper_index(4, 0, 1), 0u);
  EXPECT_EQ(TwoFormTM::upper_index(4, 0, 3), 2u);
  EXPECT_EQ(TwoFormTM::upper_index(4, 1, 2), 3u);
  EXPECT_EQ(TwoFormTM::upper_index(4, 2, 3), 5u);
  testkit::RandomFields rf(3);
  const auto F = rf.tm_form(2);
  const auto m = F.at(rf.tangent_point(2));
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b) EXPECT_EQ(m[a * 4 + b], -m[b * 4 + a]);
}

TEST(TwoFormTM, Arithmetic) {
  testkit::RandomFields rf(4);
  const auto F = rf.tm_form(2), G = rf.tm_form(2);
  const auto p = rf.tangent_point(2);
  const auto a = F.at(p), b = G.at(p), s = (F + G).at(p), d = (F - G).at(p);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_DOUBLE_EQ(s[i], a[i] + b[i]);
    EXPECT_DOUBLE_EQ(d[i], a[i] - b[i]);
  }
}

TEST(Lift, DefiningPairingsOnLiftedFrames) {
  testkit::RandomFields rf(5);
  for (std::size_t d = 1; d <= 3; ++d)
    for (int k = 0; k < 5; ++k) {
      const auto spec = rf.spec(d);
      const auto Omega = lift_two_form(spec);
      for (int s = 0; s < 10; ++s) {
        const auto p = rf.tangent_point(d);
        const auto m = Omega.at(p);
        const auto X = rf.point(d), Y = rf.point(d);
        const auto Xh = horizontal_lift(spec.conn, p.x, p.u, X), Yh = horizontal_lift(spec.conn, p.x, p.u, Y);
        const auto Xv = vertical_lift(X), Yv = vertical_lift(Y);
        const auto w0 = spec.omega0.at(p.x), w1 = spec.omega1.at(p.x), A = spec.A.at(p.x);
        const double scale = 1.0 + std::abs(pair(w1, X, Y)) + std::abs(pair(A, X, Y));
        EXPECT_NEAR(pair(m, Xv, Yv), pair(w0, X, Y), tol::kFrame * scale);
        EXPECT_NEAR(pair(m, Xh, Yh), pair(w1, X, Y), 1e-11 * scale);
        EXPECT_NEAR(pair(m, Xv, Yh), pair(A, X, Y), tol::kFrame * scale);
        EXPECT_NEAR(pair(m, Xh, Yv), -pair(A, Y, X), tol::kFrame * scale);
      }
    }
}

TEST(Lift, CanonicalFormOfFlatIdentity) {
  const LiftSpec spec{Connection::flat(2), TwoForm::zero(2), TwoForm::zero(2), CovariantTwoTensor::identity(2)};
  const auto m = lift_two_form(spec).at(TangentPoint{{0.3, 0.1}, {2.0, -1.0}});
  // sum du^i ^ dx^i: Omega(d/dx^i, d/du^i) = -1
  EXPECT_EQ(m, (std::vector<double>{0, 0, -1, 0, 0, 0, 0, -1, 1, 0, 0, 0, 0, 1, 0, 0}));
}

TEST(Lift, ZeroSectionIsTheBlockMatrix) {
  testkit::RandomFields rf(6);
  const auto spec = rf.spec(3);
  const auto x = rf.point(3);
  EXPECT_EQ(lift_two_form(spec).at(TangentPoint{x, Point(3, 0.0)}), nondegeneracy_block_matrix(spec, x));
}

TEST(Liouville, HandExpansion) {
  // A = diag(1, x1): P = (u1, x1 u2), so the pullback is du1^dx1 + x1 du2^dx2 + u2 dx1^dx2.
  const auto A = CovariantTwoTensor::from_components(2, {f("1"), f("0"), f("0"), f("x1")});
  const auto m = liouville_pullback(A).at(TangentPoint{{0.5, 0.0}, {0.0, 3.0}});
  EXPECT_DOUBLE_EQ(m[0 * 4 + 1], 3.0);
  EXPECT_DOUBLE_EQ(m[2 * 4 + 0], 1.0);
  EXPECT_DOUBLE_EQ(m[3 * 4 + 1], 0.5);
  EXPECT_DOUBLE_EQ(m[0 * 4 + 3], 0.0);
}

TEST(Liouville, EqualsLiftForCodazziTensor) {
  const auto fx = build_fixture("exp-codazzi-nondiagonal");
  const auto spec = fx.spec();
  const auto L = liouville_pullback(spec.A);
  const auto O = lift_two_form(spec);
  testkit::RandomFields rf(7);
  for (int s = 0; s < 20; ++s) {
    const auto p = rf.tangent_point(2);
    EXPECT_LE(max_abs_diff(L.at(p), O.at(p)), 1e-12);
  }
}

TEST(Liouville, DiffersFromLiftOffCodazzi) {
  const auto spec = build_fixture("broken-codazzi").spec();
  const TangentPoint p{{0.2, 0.2}, {1.0, 0.0}};
  EXPECT_GT(max_abs_diff(liouville_pullback(spec.A).at(p), lift_two_form(spec).at(p)), 0.5);
}

TEST(Lambda, VanishesOnHorizontalAndHalvesOmegaOnVertical) {
  testkit::RandomFields rf(8);
  for (std::size_t d = 2; d <= 3; ++d) {
    const auto c = rf.connection(d);
    const auto w = rf.two_form(d);
    const auto lam = lambda_form(w, c);
    for (int s = 0; s < 10; ++s) {
      const auto p = rf.tangent_point(d);
      const auto l = lam.at(p);
      const auto X = rf.point(d);
      const auto h = horizontal_lift(c, p.x, p.u, X);
      double lh = 0, lv = 0;
      for (std::size_t a = 0; a < 2 * d; ++a) lh += l[a] * h[a];
      const auto v = vertical_lift(X);
      for (std::size_t a = 0; a < 2 * d; ++a) lv += l[a] * v[a];
      EXPECT_NEAR(lh, 0.0, 1e-12);
      EXPECT_NEAR(lv, 0.5 * pair(w.at(p.x), p.u, X), 1e-12);
    }
  }
}

TEST(ExteriorDerivativeTM, HandExpansion) {
  // theta = x1 du1 + u2 dx2 -> d theta = dx1^du1 + du2^dx2
  const OneFormTM theta(2, FieldArray::from_fields(4, {parse_field("0", 2, VarScheme::tangent_bundle),
                                                       parse_field("u2", 2, VarScheme::tangent_bundle),
                                                       parse_field("x1", 2, VarScheme::tangent_bundle),
                                                       parse_field("0", 2, VarScheme::tangent_bundle)}));
  const auto m = exterior_derivative(theta).at(TangentPoint{{0.1, 0.2}, {0.3, 0.4}});
  EXPECT_DOUBLE_EQ(m[0 * 4 + 2], 1.0);
  EXPECT_DOUBLE_EQ(m[3 * 4 + 1], 1.0);
  EXPECT_DOUBLE_EQ(m[0 * 4 + 1], 0.0);
}

TEST(ExteriorDerivativeTM, ExactFormIsClosed) {
  testkit::RandomFields rf(9);
  const auto c = rf.connection(2);
  const auto dl = exterior_derivative(lambda_form(rf.two_form(2), c));
  for (int s = 0; s < 10; ++s) {
    const auto p = rf.tangent_point(2);
    for (double v : exterior_derivative(dl, p)) EXPECT_LE(std::abs(v), 1e-12);
  }
}

TEST(PullbackFromBase, OnlyTheBaseBlock) {
  const auto w = TwoForm::from_upper(2, {f("x1")});
  const auto m = pullback_from_base(w).at(TangentPoint{{2.0, 0.0}, {5.0, 5.0}});
  EXPECT_EQ(m, (std::vector<double>{0, 2, 0, 0, -2, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0}));
}

TEST(ZeroSection, ExtractionRecoversSpec) {
  testkit::RandomFields rf(10);
  for (std::size_t d = 1; d <= 3; ++d) {
    const auto spec = rf.spec(d);
    const auto z = extract_zero_section(lift_two_form(spec));
    for (int s = 0; s < 10; ++s) {
      const auto x = rf.point(d);
      EXPECT_LE(max_abs_diff(z.omega11.at(x), spec.omega1.at(x)), 1e-14);
      EXPECT_LE(max_abs_diff(z.omega22.at(x), spec.omega0.at(x)), 1e-14);
      EXPECT_LE(max_abs_diff(z.A.at(x), spec.A.at(x)), 1e-14);
    }
  }
}

TEST(ZeroSection, CandidateAgreesWithLiftOnZeroSection) {
  testkit::RandomFields rf(11);
  for (std::size_t d = 1; d <= 3; ++d) {
    const auto spec = rf.spec(d);
    const auto cand = darboux_candidate(spec.omega1, spec.omega0, spec.A, spec.conn);
    const auto O = lift_two_form(spec);
    for (int s = 0; s < 10; ++s) {
      const TangentPoint p{rf.point(d), Point(d, 0.0)};
      EXPECT_LE(max_abs_diff(cand.at(p), O.at(p)), 1e-12);
    }
  }
}

TEST(ZeroSection, CandidateEqualsLiftEverywhereWhenClosed) {
  // Codazzi A, parallel omega0, flat connection, closed omega1: the lift is the candidate off the zero section too.
  const auto s = build_fixture("exp-codazzi").spec();
  const auto cand = darboux_candidate(s.omega1, s.omega0, s.A, s.conn);
  testkit::RandomFields rf(12);
  for (int k = 0; k < 10; ++k) {
    const auto p = rf.tangent_point(2);
    EXPECT_LE(max_abs_diff(cand.at(p), lift_two_form(s).at(p)), 1e-12);
  }
}

TEST(Lift, DimensionMismatchThrows) {
  const LiftSpec bad{Connection::flat(2), TwoForm::zero(3), TwoForm::zero(2), CovariantTwoTensor::identity(2)};
  EXPECT_THROW(lift_two_form(bad), DimensionError);
}
