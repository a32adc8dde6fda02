#include <gtest/gtest.h>

#include <random>

#include "resolve/deduce.hpp"
#include "resolve/ideal.hpp"
#include "resolve/parse.hpp"
#include "support/oracles.hpp"

using namespace resolve;

namespace {

Polynomial P(const std::string& s, const Registry& r) { return parse_polynomial(s, r); }

std::vector<Polynomial> Ps(std::initializer_list<const char*> ss, const Registry& r) {
  std::vector<Polynomial> out;
  for (auto s : ss) out.push_back(P(s, r));
  return out;
}

Polynomial random_poly(std::mt19937& rng, const Registry& reg) { return testkit::random_low_degree(rng, reg); }

}  // namespace

TEST(Groebner, MembershipWithWitness) {
  auto r = make_registry({"x", "y"});
  Ideal i{r, Ps({"x^2 - y", "y^2"}, r)};
  auto m = contains(i, P("x^4", r));
  ASSERT_TRUE(m.member);
  EXPECT_TRUE(verify_combination(i.gens, m.combiners, P("x^4", r)));
  EXPECT_FALSE(contains(i, P("x", r)).member);
}

TEST(Groebner, LexBasis) {
  auto r = make_registry({"x", "y"});
  GroebnerOptions o;
  o.order = MonomialOrder::lex();
  auto gb = groebner(Ps({"x^2 - y", "x*y - 1"}, r), r, o);
  // Sorted by increasing leading monomial in lex: y^3 - 1 < x - y^2.
  ASSERT_EQ(gb.basis.size(), 2u);
  EXPECT_EQ(gb.basis[0], P("y^3 - 1", r));
  EXPECT_EQ(gb.basis[1], P("x - y^2", r));
}

TEST(Groebner, UnitIdealAndCofactors) {
  auto r = make_registry({"x", "y"});
  GroebnerOptions o;
  o.track_cofactors = true;
  auto gens = Ps({"x*y - 1", "x"}, r);
  auto gb = groebner(gens, r, o);
  ASSERT_TRUE(gb.is_unit());
  EXPECT_TRUE(verify_combination(gens, gb.cofactors[0], gb.basis[0]));
}

TEST(Groebner, BudgetExceeded) {
  auto r = make_registry({"x", "y", "z"});
  GroebnerOptions o;
  o.max_spairs = 1;
  EXPECT_THROW(groebner(Ps({"x*y - z^2", "y*z - x^2", "x*z - y^2 + x"}, r), r, o), BudgetExceeded);
}

TEST(Groebner, AgreesWithNaiveOracleRandom) {
  std::mt19937 rng(424242);
  auto r = make_registry({"x", "y", "z"});
  int compared = 0;
  for (int i = 0; i < 100; ++i) {
    std::vector<Polynomial> gens;
    int n = 2 + i % 2;
    for (int k = 0; k < n; ++k) gens.push_back(random_poly(rng, r));
    MonomialOrder ord = (i % 3 == 0) ? MonomialOrder::lex()
                        : (i % 3 == 1) ? MonomialOrder::grevlex()
                                       : MonomialOrder::elimination({true, false, false});
    GroebnerOptions o;
    o.order = ord;
    o.track_cofactors = true;
    GroebnerBasis gb;
    try {
      gb = groebner(gens, r, o);
    } catch (const BudgetExceeded&) {
      continue;
    }
    // Every basis element is an explicit combination of the generators.
    for (std::size_t k = 0; k < gb.basis.size(); ++k)
      ASSERT_TRUE(verify_combination(gens, gb.cofactors[k], gb.basis[k]));
    // Every generator reduces to zero.
    for (auto& g : gens) ASSERT_TRUE(normal_form(gb, g).is_zero());
    auto oracle = testkit::naive_reduced_basis(gens, ord, r);
    if (oracle.empty() && !gb.basis.empty()) continue;  // oracle gave up
    ASSERT_EQ(oracle.size(), gb.basis.size()) << "case " << i;
    for (std::size_t k = 0; k < oracle.size(); ++k) ASSERT_EQ(oracle[k], gb.basis[k]) << "case " << i;
    ++compared;
  }
  EXPECT_GE(compared, 90);
}

TEST(Ideal, Saturate) {
  auto r = make_registry({"x", "y"});
  Ideal sat = saturate(Ideal{r, Ps({"x*y"}, r)}, P("x", r));
  ASSERT_EQ(sat.gens.size(), 1u);
  EXPECT_EQ(sat.gens[0], P("y", r));
  Ideal sat2 = saturate(Ideal{r, Ps({"x^2*y - x^3", "x*y^2"}, r)}, P("x", r));
  EXPECT_TRUE(contains(sat2, P("y", r)).member);
  EXPECT_TRUE(contains(sat2, P("x", r)).member);
}

TEST(Ideal, Eliminate) {
  auto r = make_registry({"t", "x", "y"});
  // Parametrised cuspidal cubic.
  Ideal e = eliminate(Ideal{r, Ps({"x - t^2", "y - t^3"}, r)}, {0});
  ASSERT_EQ(e.gens.size(), 1u);
  EXPECT_EQ(e.gens[0].primitive(), P("x^3 - y^2", r).primitive());
}

TEST(Ideal, IsUnitCertificate) {
  auto r = make_registry({"x"});
  LocalizedPresentation lp{r, {}, {P("x", r)}};
  auto res = is_unit(lp, {P("x", r)});
  ASSERT_EQ(res.verdict, Verdict::Certified);
  ASSERT_TRUE(res.certificate);
  EXPECT_TRUE(res.certificate->verify());
  EXPECT_EQ(is_unit(LocalizedPresentation{r, {}, {}}, {P("x", r)}).verdict, Verdict::NotCertified);
}

TEST(Deduction, SimpleChainAndReplay) {
  auto r = make_registry({"l", "P", "a", "b"});
  // l*P = 0 with l invertible forces P = 0; then a*b - P = 0 and exclusion
  // (P, a) gives a invertible, so b = 0; exclusion (b, l*P) is violated.
  Locus L{r, Ps({"l*P", "a*b - P"}, r), {"E1", "E2"}, {Ps({"P", "a"}, r), Ps({"b", "l*P"}, r)}, Ps({"l"}, r)};
  DeductionProver prover;
  auto d = prover.prove(L);
  ASSERT_TRUE(d);
  EXPECT_TRUE(verify_deduction(L, *d));
  std::string text = render_deduction(L, *d);
  EXPECT_NE(text.find("P = 0"), std::string::npos);
  EXPECT_NE(text.find("contradiction"), std::string::npos);
  // A tampered deduction is rejected.
  Deduction bad = *d;
  bad.front().var = r->index("a");
  EXPECT_FALSE(verify_deduction(L, bad));
}

TEST(Deduction, CaseSplitOnExclusion) {
  auto r = make_registry({"x", "y", "z"});
  // Away from x = y = 0: x*z = 0 and y*z = 0 force z = 0, contradicting z != 0.
  Locus L{r, Ps({"x*z", "y*z"}, r), {}, {Ps({"x", "y"}, r)}, Ps({"z"}, r)};
  auto d = DeductionProver().prove(L);
  ASSERT_TRUE(d);
  EXPECT_TRUE(verify_deduction(L, *d));
  // Without the exclusion the locus is nonempty; no proof exists.
  Locus open{r, Ps({"x*z", "y*z"}, r), {}, {}, Ps({"z"}, r)};
  EXPECT_FALSE(DeductionProver().prove(open));
}
