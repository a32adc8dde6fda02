#include <gtest/gtest.h>

#include <chrono>

#include "resolve/pluecker.hpp"

using namespace resolve;
using namespace resolve::pluecker;

namespace {

const Tower& tower() {
  static const Tower t = Tower::load();
  return t;
}

Workspace fresh() { return Workspace(tower(), load()); }

const Workspace& shared() {
  static const Workspace w = fresh();
  return w;
}

Polynomial big(const std::string& s) { return parse_polynomial(s, schubert::big_cell_registry(3)); }

}  // namespace

TEST(ModelMatrix, ShiftsRowsByPi) {
  PolyMatrix m1 = model_matrix(1);
  EXPECT_EQ(m1(0, 0), big("p"));
  EXPECT_EQ(m1(1, 0), big("a11"));
  EXPECT_EQ(m1(4, 2), big("1"));
  EXPECT_EQ(m1(5, 1), big("1"));
  // Pi^3 [A; K] = [pK; A].
  PolyMatrix m3 = model_matrix(3);
  auto reg = schubert::big_cell_registry(3);
  auto f = schubert::frame(3, reg);
  PolyMatrix pk = f.K;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) pk(i, j) = pk(i, j) * big("p");
  EXPECT_EQ(m3, pk.stack(schubert::symmetric_matrix(3, reg)));
}

TEST(ModelMatrix, SecondStepBookkeeping) {
  PolyMatrix m = model_matrix(2);
  const char* b0[5][2] = {{"0", "p"}, {"p", "0"}, {"a11", "a12"}, {"a12", "a22"}, {"a13", "a23"}};
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 2; ++j) EXPECT_EQ(m(i, j), big(b0[i][j])) << i << "," << j;
  // The last column enters through row 6 with a unit entry.
  EXPECT_EQ(m(5, 2), big("1"));
  EXPECT_EQ(m(5, 0), big("0"));
  EXPECT_EQ(m(5, 1), big("0"));
}

TEST(MTable, SecondStepGolden) {
  const std::map<Index, std::string> golden = {
      {{1, 2}, "-p^2"},         {{1, 3}, "-p*a11"},       {{1, 4}, "-p*a12"},
      {{1, 5}, "-p*a13"},       {{2, 3}, "p*a12"},        {{2, 4}, "p*a22"},
      {{2, 5}, "p*a23"},        {{3, 4}, "a11*a22 - a12^2"},
      {{3, 5}, "a11*a23 - a12*a13"}, {{4, 5}, "a12*a23 - a13*a22"}};
  std::vector<Index> ix;
  for (auto& [k, v] : golden) ix.push_back(k);
  for (auto& [k, m] : m_table(2, ix)) EXPECT_EQ(m, big(golden.at(k))) << index_string(k);
}

TEST(MTable, ThirdStepGolden) {
  auto m = [](Index ix) { return minor(model_matrix(3), ix); };
  EXPECT_EQ(m({1, 2, 3}), big("-p^3"));
  EXPECT_EQ(m({1, 2, 4}), big("-p^2*a11"));
  EXPECT_EQ(m({1, 2, 6}), big("-p^2*a13"));
  EXPECT_EQ(m({2, 3, 4}), m({1, 2, 6}));
  EXPECT_EQ(m({1, 3, 4}), -m({1, 2, 5}));
  EXPECT_EQ(m({3, 5, 6}), big("p*(a22*a33 - a23^2)"));
  EXPECT_EQ(m({4, 5, 6}), schubert::symmetric_matrix(3, schubert::big_cell_registry(3)).det());
  // Forced by the determinant: rows (0,0,p), (0,p,0), (a12,a22,a23).
  EXPECT_EQ(m({1, 2, 5}), big("-p^2*a12"));
}

TEST(MTable, PlueckerRelations) {
  EXPECT_TRUE(pluecker_relations(2, {1, 2, 3, 4, 5}).empty());
  EXPECT_TRUE(pluecker_relations(3, {1, 2, 3, 4, 5, 6}).empty());
}

TEST(Identities, CofactorRelationsAndDeterminant) {
  auto rs = shared().verify_cofactor_identities();
  ASSERT_EQ(rs.size(), 4u);
  for (auto& r : rs) EXPECT_TRUE(r.ok) << r.label << ": residual " << r.residual;
}

TEST(Identities, DroppingAFactorLeavesAResidual) {
  Workspace w = fresh();
  auto& s = w.mutable_data().identities.at(0);
  ASSERT_NE(s.lhs.find("l2*"), std::string::npos);
  s.lhs.erase(s.lhs.find("l2*"), 3);
  auto r = w.verify_identity(w.data().identities.at(0));
  EXPECT_FALSE(r.ok);
  EXPECT_NE(r.residual, "0");
}

TEST(Factorization, AllTables) {
  const std::size_t sizes[] = {4, 10, 20};
  for (int k = 1; k <= 3; ++k) {
    auto rs = shared().verify_factorization(k);
    EXPECT_EQ(rs.size(), sizes[k - 1]);
    for (auto& r : rs) EXPECT_TRUE(r.ok) << r.table << " " << r.label << ": residual " << r.residual;
  }
}

TEST(Factorization, DefinitionsReproduceCofactorPullbacks) {
  const auto& t = shared().data().table(3);
  for (Index ix : {Index{1, 4, 5}, Index{2, 4, 6}, Index{2, 5, 6}})
    EXPECT_TRUE(shared().verify_entry(t, ix).ok) << index_string(ix);
}

TEST(Mutations, SeededFaultsAreCaught) {
  for (std::string table : {"identities", "k=1", "k=2", "k=3"})
    for (unsigned seed : {1u, 2u, 3u}) {
      Workspace w = fresh();
      auto m = seed_mutation(w, table, seed);
      ASSERT_NE(m.before, m.after) << table << " " << seed;
      bool caught = false;
      if (table == "identities") {
        for (auto& r : w.verify_cofactor_identities()) caught = caught || !r.ok;
      } else {
        for (auto& r : w.verify_factorization(table.back() - '0')) caught = caught || !r.ok;
      }
      EXPECT_TRUE(caught) << table << " seed " << seed << ": " << m.where << " " << m.what;
    }
}

TEST(Nonvanishing, FirstStepFromTheExclusion) {
  auto c = verify_nonvanishing(shared(), 1);
  EXPECT_TRUE(c.ok());
  EXPECT_TRUE(c.verify());
  EXPECT_EQ(c.targets.size(), 4u);
}

TEST(Nonvanishing, SecondStepTriple) {
  auto c = verify_nonvanishing(shared(), 2);
  EXPECT_TRUE(c.ok());
  EXPECT_TRUE(c.verify());
  ASSERT_EQ(c.targets.size(), 3u);
  const auto& t4 = tower().at("T4");
  EXPECT_EQ(c.targets[0], t4.parse("P4*a23_4"));
  EXPECT_EQ(c.targets[1], t4.parse("-d23_4"));
  EXPECT_EQ(c.targets[2], t4.parse("d13_4"));
}

TEST(Nonvanishing, ThirdStepByDeduction) {
  auto c = verify_nonvanishing(shared(), 3);
  ASSERT_TRUE(c.ok());
  ASSERT_TRUE(c.deduction.has_value());
  EXPECT_EQ(c.targets.size(), 20u);
  auto t0 = std::chrono::steady_clock::now();
  EXPECT_TRUE(c.verify());
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 10.0);
  std::string text = c.render();
  EXPECT_NE(text.find("P5 is invertible"), std::string::npos) << text;
  EXPECT_NE(text.find("d11_5 = 0"), std::string::npos) << text;
}

TEST(Nonvanishing, TamperedCertificateFails) {
  auto c = verify_nonvanishing(shared(), 2);
  ASSERT_TRUE(c.verify());
  auto bad = c;
  bad.targets[0] = bad.targets[0] * tower().at("T4").var("l4");
  EXPECT_FALSE(bad.verify());
  auto d = verify_nonvanishing(shared(), 3);
  d.targets.push_back(tower().at("T5").var("l1"));
  EXPECT_FALSE(d.verify());
}

TEST(Nonvanishing, DroppingTargetsBreaksTheCertificate) {
  Workspace w = fresh();
  auto& t = w.mutable_data().tables.at(1);
  t.nonvanishing = {{3, 5}, {4, 5}};
  auto c = verify_nonvanishing(w, 2);
  EXPECT_FALSE(c.ok());
}
