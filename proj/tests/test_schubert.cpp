#include <gtest/gtest.h>

#include <random>

#include "resolve/schubert.hpp"

using namespace resolve;
using namespace resolve::schubert;

namespace {

std::size_t rank_of(std::vector<std::vector<Rational>> m) {
  std::size_t rank = 0;
  const std::size_t cols = m.empty() ? 0 : m[0].size();
  for (std::size_t c = 0; c < cols && rank < m.size(); ++c) {
    std::size_t piv = rank;
    while (piv < m.size() && m[piv][c] == 0) ++piv;
    if (piv == m.size()) continue;
    std::swap(m[piv], m[rank]);
    for (std::size_t r = 0; r < m.size(); ++r) {
      if (r == rank || m[r][c] == 0) continue;
      Rational f = m[r][c] / m[rank][c];
      for (std::size_t k = c; k < cols; ++k) m[r][k] -= f * m[rank][k];
    }
    ++rank;
  }
  return rank;
}

// Symmetric matrix entries (a11, a12, a13, a22, a23, a33) of a generic
// point of the cell of S inside the big cell, with p = 0.
std::vector<Rational> sample_point(const std::string& key, std::mt19937& rng) {
  std::uniform_int_distribution<int> d(1, 9);
  auto r = [&]() -> Rational { return Rational(d(rng)); };
  Rational s = r(), t = r(), u = r(), c = r(), e = r();
  if (key == "{1,2,3}") return {r(), r(), r(), r(), r(), r()};
  if (key == "{1,2,4}") {
    // Rank two: v v^T + e w w^T.
    Rational v[3] = {s, t, u}, w[3] = {r(), r(), r()};
    auto at = [&](int i, int j) -> Rational { return v[i] * v[j] + e * w[i] * w[j]; };
    return {at(0, 0), at(0, 1), at(0, 2), at(1, 1), at(1, 2), at(2, 2)};
  }
  if (key == "{1,3,5}") return {s, t * s, u, t * t * s, t * u, c};
  if (key == "{1,4,5}") return {c * s * s, c * s * t, c * s * u, c * t * t, c * t * u, c * u * u};
  if (key == "{2,3,6}") return {0, 0, 0, s, t, u};
  if (key == "{2,4,6}") return {0, 0, 0, c * s * s, c * s * t, c * t * t};
  if (key == "{3,5,6}") return {0, 0, 0, 0, 0, s};
  return {0, 0, 0, 0, 0, 0};
}

}  // namespace

TEST(Frame, Invariants) {
  for (int g = 1; g <= 4; ++g) {
    auto f = frame(g);
    const std::size_t n = 2 * static_cast<std::size_t>(g);
    EXPECT_EQ(f.K * f.K, PolyMatrix::identity(f.reg, static_cast<std::size_t>(g)));
    PolyMatrix minusJ = f.J.map([](const Polynomial& x) { return -x; }, f.reg);
    EXPECT_EQ(f.J.transpose(), minusJ);
    PolyMatrix pw = PolyMatrix::identity(f.reg, n);
    for (std::size_t k = 0; k < n; ++k) pw = pw * f.Pi;
    PolyMatrix pid = PolyMatrix::identity(f.reg, n).map(
        [&](const Polynomial& x) { return x * Polynomial::variable(f.reg, "p"); }, f.reg);
    EXPECT_EQ(pw, pid) << "Pi^{2g} = p at g=" << g;
  }
}

TEST(Schubert, Enumerate) {
  EXPECT_EQ(enumerate_isotropic(2), (std::vector<IsotropicSubset>{{1, 2}, {1, 3}, {2, 4}, {3, 4}}));
  auto g3 = enumerate_isotropic(3);
  EXPECT_EQ(g3.size(), 8u);
  EXPECT_EQ(enumerate_isotropic(1).size(), 2u);
  // Every enumerated span is J-isotropic.
  for (int g = 1; g <= 4; ++g) {
    auto f = frame(g);
    for (auto& s : enumerate_isotropic(g))
      for (int a : s)
        for (int b : s) EXPECT_TRUE(f.J(static_cast<std::size_t>(a - 1), static_cast<std::size_t>(b - 1)).is_zero());
  }
  EXPECT_FALSE(is_isotropic({1, 5, 6}, 3));
}

TEST(Schubert, Dimension) {
  EXPECT_EQ(dimension({4, 5, 6}, 3), 0);
  EXPECT_EQ(dimension({1, 2, 3}, 3), 6);
  EXPECT_EQ(dimension({1, 4, 5}, 3), 3);
  EXPECT_EQ(dimension({2, 3, 6}, 3), 3);
}

TEST(Schubert, BruhatIsPartialOrder) {
  EXPECT_TRUE(bruhat_leq({1, 2}, {3, 4}));
  EXPECT_FALSE(bruhat_leq({1, 4, 5}, {2, 3, 6}));
  EXPECT_FALSE(bruhat_leq({2, 3, 6}, {1, 4, 5}));
  for (int g = 1; g <= 4; ++g) {
    auto all = enumerate_isotropic(g);
    for (auto& a : all) {
      EXPECT_TRUE(bruhat_leq(a, a));
      for (auto& b : all) {
        if (bruhat_leq(a, b) && bruhat_leq(b, a)) {
          EXPECT_EQ(a, b);
        }
        for (auto& c : all) {
          if (bruhat_leq(a, b) && bruhat_leq(b, c)) {
            EXPECT_TRUE(bruhat_leq(a, c));
          }
        }
      }
    }
  }
}

TEST(Schubert, HasseDiagrams) {
  auto h2 = hasse(2);
  ASSERT_EQ(h2.covers.size(), 3u);
  EXPECT_EQ(label(h2.covers[0].first), "{3,4}");
  EXPECT_EQ(label(h2.covers[2].second), "{1,2}");

  auto h3 = hasse(3);
  EXPECT_EQ(h3.nodes.size(), 8u);
  std::set<std::string> edges;
  for (auto& [a, b] : h3.covers) edges.insert(label(a) + "-" + label(b));
  std::set<std::string> expected{"{4,5,6}-{3,5,6}", "{3,5,6}-{2,4,6}", "{2,4,6}-{1,4,5}", "{2,4,6}-{2,3,6}",
                                 "{1,4,5}-{1,3,5}", "{2,3,6}-{1,3,5}", "{1,3,5}-{1,2,4}", "{1,2,4}-{1,2,3}"};
  EXPECT_EQ(edges, expected);
  std::vector<int> dims;
  for (auto& s : h3.nodes) dims.push_back(dimension(s, 3));
  EXPECT_EQ(dims, (std::vector<int>{0, 1, 2, 3, 3, 4, 5, 6}));
  EXPECT_EQ(hasse(1).covers.size(), 1u);

  for (int g = 1; g <= 4; ++g) {
    auto h = hasse(g);
    for (auto& [a, b] : h.covers) EXPECT_EQ(dimension(b, g), dimension(a, g) + 1);
  }
  std::string dot = to_dot(h3);
  EXPECT_NE(dot.find("\"{2,4,6}\" -> \"{1,4,5}\""), std::string::npos);
  EXPECT_EQ(to_json(h3)["edges"].size(), 8u);
}

TEST(BigCell, IsotropyOfSymmetricPoints) {
  auto reg = big_cell_registry(3);
  auto f = frame(3, reg);
  PolyMatrix A = symmetric_matrix(3, reg);
  PolyMatrix AK = A.stack(f.K);
  PolyMatrix form = AK.transpose() * f.J * AK;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_TRUE(form(i, j).is_zero());
  // A non-symmetric matrix fails: the form is A^T - A.
  PolyMatrix B = A;
  B(0, 1) = B(0, 1) + Polynomial::constant(reg, 1);
  PolyMatrix BK = B.stack(f.K);
  PolyMatrix form2 = BK.transpose() * f.J * BK;
  EXPECT_FALSE(form2(0, 1).is_zero());
}

TEST(BigCell, TableEntries) {
  auto reg = big_cell_registry(3);
  auto v = [&](const char* n) { return Polynomial::variable(reg, n); };
  EXPECT_EQ(big_cell_ideal(3, {2, 3, 6}).gens, (std::vector<Polynomial>{v("a11"), v("a12"), v("a13"), v("p")}));
  ASSERT_EQ(big_cell_ideal(3, {1, 2, 4}).gens.size(), 2u);
  EXPECT_EQ(big_cell_ideal(3, {1, 2, 3}).gens, (std::vector<Polynomial>{v("p")}));
  EXPECT_THROW(big_cell_ideal(3, {1, 5, 6}), std::invalid_argument);
  EXPECT_THROW(big_cell_ideal(4, {1, 2, 3, 4}), std::invalid_argument);
}

TEST(BigCell, GenericDimensionMatchesSchubertDimension) {
  std::mt19937 rng(2024);
  auto reg = big_cell_registry(3);
  for (auto& s : enumerate_isotropic(3)) {
    Ideal I = big_cell_ideal(3, s);
    for (int trial = 0; trial < 3; ++trial) {
      auto a = sample_point(label(s), rng);
      std::vector<Rational> pt(a.begin(), a.end());
      pt.push_back(0);  // special fibre
      std::vector<std::vector<Rational>> jac;
      for (auto& g : I.gens) {
        ASSERT_EQ(g.evaluate(pt), 0) << label(s) << " " << g;
        std::vector<Rational> row;
        for (std::size_t k = 0; k < 6; ++k) row.push_back(g.derivative(k).evaluate(pt));
        jac.push_back(row);
      }
      EXPECT_EQ(6 - static_cast<int>(rank_of(jac)), dimension(s, 3)) << label(s);
    }
  }
}
