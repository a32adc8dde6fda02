#include <gtest/gtest.h>

#include <random>

#include "resolve/parse.hpp"
#include "resolve/polymatrix.hpp"
#include "support/oracles.hpp"

using namespace resolve;

namespace {

Registry xyz() { return make_registry({"x", "y", "z"}); }

Polynomial P(const std::string& s, const Registry& r) { return parse_polynomial(s, r); }

Polynomial random_poly(std::mt19937& rng, const Registry& reg, int max_terms = 4, int max_exp = 3) {
  return testkit::random_polynomial(rng, reg, max_terms, max_exp);
}

}  // namespace

TEST(Registry, RejectsDuplicatesAndBadNames) {
  EXPECT_THROW(make_registry({"x", "x"}), std::invalid_argument);
  EXPECT_THROW(make_registry({"1x"}), std::invalid_argument);
  EXPECT_NO_THROW(make_registry({"a23_4", "u_a23_4", "x[1]", "y'"}));
}

TEST(Polynomial, CanonicalOrderIsGrevlex) {
  auto r = xyz();
  // grevlex with x > y > z: x^2 > x*y > y^2 > x*z > y*z > z^2
  Polynomial p = P("z^2 + y*z + x*z + y^2 + x*y + x^2", r);
  EXPECT_EQ(p.to_string(), "x^2 + x*y + y^2 + x*z + y*z + z^2");
  EXPECT_EQ(P("x*z^2 + y^3", r).to_string(), "y^3 + x*z^2");
}

TEST(Polynomial, Arithmetic) {
  auto r = xyz();
  EXPECT_EQ(P("(x+y)^2", r), P("x^2 + 2*x*y + y^2", r));
  EXPECT_EQ(P("(x-y)*(x+y)", r), P("x^2 - y^2", r));
  EXPECT_TRUE((P("x", r) - P("x", r)).is_zero());
  EXPECT_EQ(P("3/2*x", r) * Rational(2), P("3*x", r));
  EXPECT_EQ(P("x^3*y + x", r).derivative(0), P("3*x^2*y + 1", r));
}

TEST(Polynomial, RegistryMismatchThrows) {
  auto a = xyz();
  auto b = make_registry({"x", "w"});
  EXPECT_THROW(P("x", a) + P("x", b), RegistryMismatch);
  // Identical name lists count as the same registry.
  auto c = xyz();
  EXPECT_NO_THROW(P("x", a) + P("x", c));
}

TEST(Polynomial, SubstituteAndEmbed) {
  auto r = xyz();
  auto t = make_registry({"s", "t"});
  std::map<std::string, Polynomial> b{{"x", P("s*t", t)}, {"y", P("s - t", t)}, {"z", P("1", t)}};
  EXPECT_EQ(P("x + y^2 - z", r).substitute(b, t), P("s*t + s^2 - 2*s*t + t^2 - 1", t));
  auto big = make_registry({"w", "z", "y", "x"});
  EXPECT_EQ(P("x*y + z", r).embed(big), P("x*y + z", big));
}

TEST(Polynomial, ExactDivision) {
  auto r = xyz();
  auto q = P("x^3 - y^3", r).exact_divide(P("x - y", r));
  ASSERT_TRUE(q);
  EXPECT_EQ(*q, P("x^2 + x*y + y^2", r));
  EXPECT_FALSE(P("x^2 + 1", r).exact_divide(P("x - 1", r)));
}

TEST(Polynomial, Primitive) {
  auto r = xyz();
  EXPECT_EQ(P("-2/3*x + 4/9*y", r).primitive(), P("3*x - 2*y", r));
}

TEST(Parser, IndexNotationAndGreek) {
  auto r = make_registry({"l0", "l1", "P1", "a11_1", "a12_1", "a13_1", "a22_1", "a23_1", "a33_1"});
  Polynomial p = P("a^2_2[1]*a^3_3[1] - l1*a^2_3[1]^2", r);
  EXPECT_EQ(p, P("a22_1*a33_1 - l1*a23_1^2", r));
  // Symmetric convention: a^3_2 is a^2_3.
  EXPECT_EQ(P("a^3_2[1]", r), P("a23_1", r));
  EXPECT_EQ(P("\xCE\xBB" "1*a^1_1[1]", r), P("l1*a11_1", r));
  auto d = make_registry({"D_5", "d13_5"});
  EXPECT_EQ(P("D[5] + d^3_1[5]", d), P("D_5 + d13_5", d));
  EXPECT_EQ(P("delta^1_3[5]", d), P("d13_5", d));
}

TEST(Parser, Errors) {
  auto r = xyz();
  try {
    P("2x", r);
    FAIL() << "juxtaposition accepted";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position, 1u);
  }
  EXPECT_THROW(P("x +", r), ParseError);
  EXPECT_THROW(P("(x", r), ParseError);
  EXPECT_THROW(P("x)", r), ParseError);
  EXPECT_THROW(P("x^y", r), ParseError);
  EXPECT_THROW(P("x y", r), ParseError);
  EXPECT_THROW(P("w", r), UnknownVariable);
  EXPECT_THROW(P("", r), ParseError);
}

TEST(Parser, RoundTripRandom) {
  std::mt19937 rng(20240611);
  auto r = make_registry({"x", "y", "z", "a23_4", "l1"});
  for (int i = 0; i < 100; ++i) {
    Polynomial p = random_poly(rng, r, 6, 4);
    EXPECT_EQ(P(p.to_string(), r), p) << p.to_string();
  }
}

TEST(Polynomial, RingAxiomsRandom) {
  std::mt19937 rng(7);
  auto r = xyz();
  for (int i = 0; i < 500; ++i) {
    Polynomial a = random_poly(rng, r), b = random_poly(rng, r), c = random_poly(rng, r);
    ASSERT_EQ(a + b, b + a);
    ASSERT_EQ(a * b, b * a);
    ASSERT_EQ((a + b) + c, a + (b + c));
    ASSERT_EQ((a * b) * c, a * (b * c));
    ASSERT_EQ(a * (b + c), a * b + a * c);
    ASSERT_TRUE((a - a).is_zero());
    // Leibniz rule.
    ASSERT_EQ((a * b).derivative(1), a.derivative(1) * b + a * b.derivative(1));
    if (!b.is_zero()) {
      auto q = (a * b).exact_divide(b);
      ASSERT_TRUE(q);
      ASSERT_EQ(*q, a);
    }
  }
}

TEST(PolyMatrix, SymmetricDeterminant) {
  auto r = make_registry({"a11", "a12", "a13", "a22", "a23", "a33"});
  auto A = PolyMatrix::parse({{"a11", "a12", "a13"}, {"a12", "a22", "a23"}, {"a13", "a23", "a33"}}, r);
  Polynomial expected = P("a11*a22*a33 + 2*a12*a13*a23 - a11*a23^2 - a22*a13^2 - a33*a12^2", r);
  EXPECT_EQ(A.det_cofactor(), expected);
  EXPECT_EQ(A.det_bareiss(), expected);
}

TEST(PolyMatrix, NonSquareAndMinors) {
  auto r = xyz();
  auto M = PolyMatrix::parse({{"x", "y", "1"}, {"0", "z", "x"}}, r);
  EXPECT_THROW(M.det(), NotSquare);
  EXPECT_EQ(M.minor({0, 1}, {0, 1}), P("x*z", r));
  EXPECT_EQ(combinations(6, 3).size(), 20u);
}

TEST(PolyMatrix, CofactorAgreesWithBareissRandom) {
  std::mt19937 rng(99);
  auto r = xyz();
  for (int i = 0; i < 60; ++i) {
    std::size_t n = 1 + i % 5;
    PolyMatrix m(r, n, n);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) m(a, b) = random_poly(rng, r, 2, 1);
    ASSERT_EQ(m.det_cofactor(), m.det_bareiss());
    // det(M M^T) = det(M)^2
    if (n <= 3) {
      ASSERT_EQ((m * m.transpose()).det(), m.det().pow(2));
    }
  }
}
