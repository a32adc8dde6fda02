#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sys/wait.h>

#include "resolve/driver.hpp"

using namespace resolve;
namespace fs = std::filesystem;

namespace {

const driver::Context& context() {
  static const driver::Context c = driver::Context::load();
  return c;
}

struct Run {
  int code = -1;
  std::string out;
};

Run cli(const std::string& args, const std::string& env = "") {
  std::string cmd = env + " " + RESOLVE_CLI_PATH + std::string(" ") + args + " 2>&1";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, p)) r.out.append(buf, n);
  int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("resolve-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int n = 0;
    return n;
  }
};

// A copy of the shipped data with pluecker.json edited by `edit`.
fs::path mutated_data(const TempDir& t, const std::function<void(nlohmann::json&)>& edit) {
  fs::path d = t.path / "data";
  fs::copy(data_dir(), d);
  auto j = read_json_file(d / "pluecker.json");
  edit(j);
  std::ofstream(d / "pluecker.json") << j.dump(2);
  return d;
}

}  // namespace

TEST(Catalogue, NamesAreUniqueAndCoverEveryStep) {
  auto goals = driver::catalogue(context());
  std::set<std::string> names;
  for (auto& g : goals) EXPECT_TRUE(names.insert(g.name).second) << g.name;
  for (int k = 1; k <= 6; ++k)
    for (auto what : {"replay", "smooth", "nc"}) EXPECT_TRUE(names.count("step:" + std::to_string(k) + ":" + what));
  for (int k = 0; k <= 5; ++k) {
    EXPECT_TRUE(names.count("chart:T" + std::to_string(k)));
    EXPECT_TRUE(names.count("semistable:T" + std::to_string(k)));
  }
  EXPECT_THROW(driver::find_goal(goals, "step:7:smooth"), driver::UnknownGoal);
}

TEST(Run, ReportsAreIndependentOfThreadCount) {
  auto goals = driver::catalogue(context());
  std::vector<driver::Goal> plan;
  for (auto prefix : {"schubert:", "chart:T0", "chart:T1", "chart:T2", "identities:", "factorization:", "relations:",
                      "nonvanishing:", "step:3:", "semistable:T2"})
    for (auto& g : driver::select(goals, prefix)) plan.push_back(g);
  auto one = driver::report("subset", driver::run(context(), plan, 1)).dump(2);
  auto four = driver::report("subset", driver::run(context(), plan, 4)).dump(2);
  EXPECT_EQ(one, four);
  auto j = nlohmann::json::parse(one);
  EXPECT_EQ(j["schema"], 1);
  EXPECT_EQ(j["summary"]["fail"], 0);
  EXPECT_EQ(j["summary"]["pass"], static_cast<int>(plan.size()));
}

TEST(Run, ExitCodes) {
  driver::GoalResult pass{"a", driver::Status::Pass, {}, 0};
  driver::GoalResult fail{"b", driver::Status::Fail, {}, 0};
  driver::GoalResult open{"c", driver::Status::Inconclusive, {}, 0};
  EXPECT_EQ(driver::exit_code({pass}), 0);
  EXPECT_EQ(driver::exit_code({pass, open}), 3);
  EXPECT_EQ(driver::exit_code({open, fail}), 2);
}

TEST(Run, ThrowingGoalIsAFailure) {
  driver::Goal g{"boom", "", [](const driver::Context&) -> driver::Outcome { throw std::runtime_error("boom"); }};
  auto r = driver::run(context(), {g});
  EXPECT_EQ(r[0].status, driver::Status::Fail);
  EXPECT_EQ(r[0].detail["error"], "boom");
}

TEST(Cli, SchubertHasse) {
  auto dot = cli("schubert hasse --g 3 --format dot");
  ASSERT_EQ(dot.code, 0) << dot.out;
  std::size_t nodes = 0, edges = 0;
  std::istringstream in(dot.out);
  for (std::string line; std::getline(in, line);) {
    nodes += line.find("[label=") != std::string::npos;
    edges += line.find("->") != std::string::npos;
  }
  EXPECT_EQ(nodes, 8u);
  EXPECT_EQ(edges, 8u);
  EXPECT_NE(dot.out.find("\"{2,4,6}\" -> \"{1,4,5}\""), std::string::npos);
  auto js = cli("schubert hasse --g 2 --format json");
  ASSERT_EQ(js.code, 0);
  auto j = nlohmann::json::parse(js.out);
  EXPECT_EQ(j["nodes"].size(), 4u);
  EXPECT_EQ(j["edges"].size(), 3u);
}

TEST(Cli, IdentitiesPassAndWriteReport) {
  TempDir t;
  auto rep = t.path / "r.json";
  auto r = cli("verify identities --step 5 --report " + rep.string());
  EXPECT_EQ(r.code, 0) << r.out;
  auto j = nlohmann::json::parse(slurp(rep));
  ASSERT_EQ(j["goals"].size(), 2u);
  EXPECT_EQ(j["goals"][0]["goal"], "identities:det A4");
  EXPECT_EQ(j["goals"][1]["goal"], "factorization:k=2");
  EXPECT_TRUE(fs::exists(t.path / "r.timing.json"));
}

TEST(Cli, MutatedIdentityFailsWithResidual) {
  TempDir t;
  auto d = mutated_data(t, [](nlohmann::json& j) {
    for (auto& id : j["identities"])
      if (id["label"] == "det A4") id["rhs"] = "l2*n3^2*Delta";
  });
  auto rep = t.path / "r.json";
  auto r = cli("verify identities --step 5 --report " + rep.string(), "RESOLVE_DATA_DIR=" + d.string());
  EXPECT_EQ(r.code, 2) << r.out;
  auto j = nlohmann::json::parse(slurp(rep));
  auto& check = j["goals"][0]["detail"]["checks"][0];
  EXPECT_EQ(j["goals"][0]["status"], "fail");
  EXPECT_FALSE(check["ok"].get<bool>());
  EXPECT_NE(check["residual"], "0");
}

TEST(Cli, MalformedDataIsAUsageError) {
  TempDir t;
  fs::path d = t.path / "data";
  fs::copy(data_dir(), d);
  std::ofstream(d / "pluecker.json") << "{\"schema\": 1, \"tables\": [";
  auto r = cli("verify nonvanishing --k 1 --report ''", "RESOLVE_DATA_DIR=" + d.string());
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("pluecker.json"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("byte"), std::string::npos) << r.out;
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(cli("").code, 1);
  EXPECT_EQ(cli("verify step 9").code, 1);
  EXPECT_EQ(cli("verify chart T9 --report ''").code, 1);
  auto r = cli("explain no-such-goal");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("unknown goal"), std::string::npos);
}

TEST(Cli, BudgetExhaustionIsInconclusive) {
  auto r = cli("verify semistable T5 --budget-spairs 2 --report ''");
  EXPECT_EQ(r.code, 3) << r.out;
  EXPECT_NE(r.out.find("inconclusive  semistable:T5"), std::string::npos);
}

TEST(Explain, StepThreeMatrix) {
  auto r = cli("explain step:3:smooth");
  ASSERT_EQ(r.code, 0) << r.out;
  for (auto col : {"d/d\xCE\xBB" "0", "d/d\xCE\xBB" "1", "d/dP1", "d/da^1_1[1]", "d/da^3_3[1]"})
    EXPECT_NE(r.out.find(col), std::string::npos) << col;
  // The quadric row: a^3_3[1], -2 lambda1 a^2_3[1], a^2_2[1] in the a22, a23, a33 columns.
  std::istringstream in(r.out);
  std::string quadric;
  for (std::string line; std::getline(in, line);)
    if (line.rfind("h5", 0) == 0) quadric = line;
  ASSERT_FALSE(quadric.empty());
  auto b = quadric.find("-2*\xCE\xBB" "1*a^2_3[1]");
  auto c = quadric.rfind("a^2_2[1]");
  ASSERT_NE(b, std::string::npos) << quadric;
  EXPECT_LT(quadric.find("  a^3_3[1]"), b);
  EXPECT_LT(b, c);
}

TEST(Explain, StepSixRow) {
  auto r = cli("explain step:6:smooth");
  ASSERT_EQ(r.code, 0) << r.out;
  const auto& t4 = context().tower.at("T4");
  for (auto e : {"m3*l4*d13_4^2", "a23_4*d11_4"})
    EXPECT_NE(r.out.find(driver::detail::notation(t4.parse(e).to_string())), std::string::npos) << e;
  EXPECT_NE(r.out.find("certified, codimension 5 in 16"), std::string::npos);
}

TEST(Explain, ThirdNonvanishingDeduction) {
  auto r = cli("explain nonvanishing:k=3");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("\xCE\x94[5] = 0"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("P5 is invertible"), std::string::npos);
  EXPECT_NE(r.out.find("contradiction"), std::string::npos);
}

TEST(Explain, OtherGoalsPrintTheirDetail) {
  auto text = driver::explain(context(), "identities:det A4");
  EXPECT_EQ(text.rfind("identities:det A4: pass", 0), 0u) << text;
  EXPECT_THROW(driver::explain(context(), "nope"), driver::UnknownGoal);
}

TEST(Notation, RoundTripsThroughTheParser) {
  const auto& t5 = context().tower.at("T5");
  for (std::size_t v = 0; v < t5.reg->size(); ++v) {
    const auto& n = t5.reg->name(v);
    EXPECT_EQ(canonical_name(notation_name(n)), n);
  }
  EXPECT_EQ(notation_name("a23_1"), "a^2_3[1]");
  EXPECT_EQ(notation_name("D_5"), "\xCE\x94[5]");
}
