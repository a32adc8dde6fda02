#include <gtest/gtest.h>

#include "resolve/blowup.hpp"
#include "resolve/certify.hpp"

using namespace resolve;

namespace {

const Tower& tower() {
  static const Tower t = Tower::load();
  return t;
}

const std::vector<StepData>& steps() {
  static const auto s = load_steps();
  return s;
}

std::vector<Polynomial> center_of(int step, std::size_t which = 0) {
  const auto& st = find_step(steps(), step);
  return center_generators(tower().at(st.parent), st.centers.at(which));
}

ChartPresentation make_chart(std::vector<std::string> names, std::vector<std::string> mono, std::vector<std::string> eqs,
                             std::vector<std::vector<std::string>> excl = {}) {
  ChartPresentation c;
  c.name = "model";
  c.reg = make_registry(names);
  c.weights.assign(names.size(), Weight{});
  c.monomial = mono;
  for (auto& e : eqs) c.equations.push_back(c.parse(e));
  for (auto& ex : excl) {
    std::vector<Polynomial> g;
    for (auto& s : ex) g.push_back(c.parse(s));
    c.excluded.push_back(g);
  }
  return c;
}

}  // namespace

TEST(Cover, Pieces) {
  auto plain = make_chart({"x", "y"}, {"x"}, {});
  EXPECT_EQ(cover_pieces(plain).size(), 1u);
  auto two = make_chart({"x", "y", "z"}, {"x"}, {}, {{"x", "y"}, {"y", "z"}});
  // {x,y}, {x,z}, {y}, {y,z} after deduplication.
  EXPECT_EQ(cover_pieces(two).size(), 4u);
  // x*y - 1 = 0 makes the piece inverting nothing but requiring... every piece here is consistent.
  auto contra = make_chart({"x", "y"}, {"x"}, {"x"}, {{"x", "y"}});
  std::vector<std::string> notes;
  EXPECT_EQ(cover_pieces(contra, &notes).size(), 1u);
  EXPECT_EQ(notes.size(), 1u);
}

TEST(Semistable, ThreeConcurrentLinesAreRejected) {
  auto c = make_chart({"x", "y", "z"}, {"x", "y", "z"}, {"z - x - y"});
  auto r = semistable(c);
  EXPECT_FALSE(r.ok());
  ASSERT_FALSE(r.obstructions.empty());
  EXPECT_NE(r.obstructions.back().find("no admissible column"), std::string::npos) << r.obstructions.back();
  EXPECT_NE(r.obstructions.back().find(c.equations[0].to_string()), std::string::npos);
}

TEST(Semistable, RepeatedMonomialVariable) {
  auto c = make_chart({"x", "y"}, {"x", "x"}, {});
  EXPECT_FALSE(semistable(c).ok());
}

TEST(Semistable, ModelChartSweep) {
  for (int n = 1; n <= 6; ++n)
    for (int r = 1; r <= n; ++r)
      for (int m = 1; m <= 3 && r + m - 1 <= n; ++m) {
        std::vector<std::string> names{"lambda"};
        for (int i = 1; i <= n; ++i) names.push_back("T" + std::to_string(i));
        std::vector<std::string> mono{"lambda"};
        for (int i = 1; i <= r; ++i) mono.push_back("T" + std::to_string(i));
        std::vector<std::string> ex;
        for (int i = r; i <= r + m - 1; ++i) ex.push_back("T" + std::to_string(i));
        auto c = make_chart(names, mono, {}, {ex});
        auto cert = semistable(c);
        EXPECT_TRUE(cert.ok()) << n << " " << r << " " << m;
        EXPECT_TRUE(verify(c, cert));
      }
}

TEST(Semistable, ShippedCharts) {
  for (auto n : {"T0", "T1", "T2", "T3", "T4", "T5"}) {
    const auto& c = tower().at(n);
    auto cert = semistable(c);
    EXPECT_TRUE(cert.ok()) << n << ": " << (cert.obstructions.empty() ? "" : cert.obstructions[0]);
    EXPECT_TRUE(verify(c, cert)) << n;
  }
}

TEST(Centers, SmoothAndNormalCrossingsForEveryStep) {
  for (auto& st : steps()) {
    for (auto& center : st.centers) {
      auto c = center_chart(tower().at(st.parent), center);
      auto gens = center_generators(c, center);
      auto sc = smooth_center(c, gens, center.label);
      EXPECT_TRUE(sc.ok()) << "step " << st.step << ": " << (sc.obstructions.empty() ? "" : sc.obstructions[0]);
      EXPECT_TRUE(verify(c, sc)) << st.step;
      EXPECT_EQ(sc.rows, static_cast<int>(c.equations.size() + gens.size()));
      for (auto& nc : nc_intersection(c, gens, center.label)) {
        EXPECT_TRUE(nc.ok()) << nc.label << ": " << (nc.obstructions.empty() ? "" : nc.obstructions[0]);
        EXPECT_TRUE(verify(c, nc)) << nc.label;
      }
    }
  }
}

TEST(Centers, StepThreeQuadricRow) {
  const auto& c = tower().at("T1");
  auto rows = jacobian_rows(c, {c.parse("a22_1*a33_1 - l1*a23_1^2")});
  std::map<std::string, Polynomial> row(rows[0].second.begin(), rows[0].second.end());
  EXPECT_EQ(row.at("a22_1"), c.parse("a33_1"));
  EXPECT_EQ(row.at("a23_1"), c.parse("-2*l1*a23_1"));
  EXPECT_EQ(row.at("a33_1"), c.parse("a22_1"));
  // The l1 column is not zero.
  EXPECT_EQ(row.at("l1"), c.parse("-a23_1^2"));
}

TEST(Centers, StepSixRow) {
  const auto& c = tower().at("T4");
  auto gens = center_of(6);
  auto rows = jacobian_rows(c, {gens[1]});
  std::map<std::string, Polynomial> row(rows[0].second.begin(), rows[0].second.end());
  EXPECT_EQ(row.at("a33_4"), c.parse("m3*l4*d13_4^2"));
  EXPECT_EQ(row.at("d23_4"), c.parse("a23_4*d11_4"));
  // Agrees with a23 * d23 up to a multiple of d13.
  Polynomial diff = row.at("d11_4") - c.parse("a23_4*d23_4");
  EXPECT_TRUE(diff.exact_divide(c.var("d13_4")).has_value());
}

TEST(Centers, TamperedCertificateFailsVerification) {
  const auto& st = find_step(steps(), 4);
  auto c = center_chart(tower().at("T2"), st.centers.at(1));
  auto sc = smooth_center(c, center_generators(c, st.centers.at(1)), "B");
  ASSERT_TRUE(sc.ok());
  ASSERT_TRUE(verify(c, sc));

  auto bad_minor = sc;
  bad_minor.pieces[0].minor = bad_minor.pieces[0].minor * c.var("a22_2") + c.var("a11_2");
  EXPECT_FALSE(verify(c, bad_minor));

}

TEST(Centers, TamperedCombinationFailsVerification) {
  // On x*y = 1 the minor y is a unit only modulo the equation.
  auto c = make_chart({"x", "y"}, {}, {"x*y - 1"});
  auto cert = jacobian_certificate(c, "xy", c.equations, {"E1"}, {0}, c.equations, cover_pieces(c));
  ASSERT_TRUE(cert.ok());
  ASSERT_TRUE(cert.pieces[0].witness.combination.has_value());
  EXPECT_TRUE(verify(c, cert));
  auto& comb = *cert.pieces[0].witness.combination;
  comb.combiners[0] += Polynomial::constant(c.reg, 1).embed(comb.reg);
  EXPECT_FALSE(verify(c, cert));
}

TEST(Centers, FirstGeneratorMustBeP) {
  const auto& c = tower().at("T1");
  EXPECT_THROW(smooth_center(c, {c.var("a11_1")}), std::invalid_argument);
}
