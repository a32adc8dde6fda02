#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <regex>
#include <sstream>
#include <thread>

#include "resolve/action.hpp"
#include "resolve/blowup.hpp"
#include "resolve/certify.hpp"
#include "resolve/chart.hpp"
#include "resolve/parse.hpp"
#include "resolve/pluecker.hpp"
#include "resolve/schubert.hpp"

namespace resolve::driver {

enum class Status { Pass, Fail, Inconclusive };

inline const char* status_name(Status s) {
  switch (s) {
    case Status::Pass: return "pass";
    case Status::Fail: return "fail";
    case Status::Inconclusive: return "inconclusive";
  }
  return "?";
}

struct UnknownGoal : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  unsigned jobs = 1;
  std::size_t budget_spairs = 1'000'000;
};

/// Everything a goal may read. Loaded once, shared read-only by workers.
struct Context {
  std::filesystem::path dir;
  Tower tower;
  std::vector<StepData> steps;
  std::vector<SymplecticElement> elements;
  pluecker::Data pluecker;
  Options options;

  static Context load(const std::filesystem::path& dir = data_dir(), Options o = {}) {
    Context c;
    c.dir = dir;
    c.tower = Tower::load(dir);
    c.steps = load_steps(dir / "centers.json");
    c.elements = load_elements(dir / "elements.json");
    c.pluecker = pluecker::load(dir / "pluecker.json");
    c.options = o;
    return c;
  }

  GroebnerOptions groebner() const {
    GroebnerOptions g;
    g.max_spairs = options.budget_spairs;
    return g;
  }
  JacobianOptions jacobian() const {
    JacobianOptions j;
    j.groebner = groebner();
    return j;
  }
};

struct Outcome {
  Status status = Status::Pass;
  nlohmann::json detail = nlohmann::json::object();
};

struct Goal {
  std::string name;
  std::string chart;  // chart the goal lives on, empty when not chart-bound
  std::function<Outcome(const Context&)> run;
};

struct GoalResult {
  std::string name;
  Status status = Status::Pass;
  nlohmann::json detail;
  double seconds = 0;
};

namespace detail {

inline Status pass_if(bool b) { return b ? Status::Pass : Status::Fail; }

inline Status from_verdict(Verdict v, bool verified) {
  if (v == Verdict::Inconclusive) return Status::Inconclusive;
  return pass_if(v == Verdict::Certified && verified);
}

inline Status worst(Status a, Status b) {
  if (a == Status::Fail || b == Status::Fail) return Status::Fail;
  if (a == Status::Inconclusive || b == Status::Inconclusive) return Status::Inconclusive;
  return Status::Pass;
}

inline std::string chart_name(int k) { return "T" + std::to_string(k); }

// Three lines through a point: the smallest chart that is not semistable.
inline ChartPresentation triple_point_chart() {
  ChartPresentation c;
  c.name = "triple-point";
  c.reg = make_registry({"x", "y", "z"});
  c.weights.assign(3, Weight{});
  c.monomial = {"x", "y", "z"};
  c.equations = {c.parse("z - x - y")};
  return c;
}

inline Outcome schubert_goal(int g) {
  auto p = schubert::hasse(g);
  Outcome o;
  o.detail = schubert::to_json(p);
  bool graded = true;
  for (auto& [a, b] : p.covers) graded = graded && schubert::dimension(b, g) == schubert::dimension(a, g) + 1;
  std::size_t expect_nodes = std::size_t{1} << g;
  o.status = pass_if(graded && p.nodes.size() == expect_nodes &&
                     schubert::dimension(p.nodes.back(), g) == g * (g + 1) / 2);
  return o;
}

inline Outcome chart_goal(const Context& ctx, const std::string& name) {
  Outcome o;
  const auto& c = ctx.tower.at(name);
  auto v = validate(c);
  auto pb = pullback_check(ctx.tower, name, ctx.groebner());
  o.detail["ambient"] = c.reg->size();
  o.detail["validate"] = v.to_json();
  o.detail["pullback"] = pb.to_json();
  o.status = pass_if(v.ok && pb.ok);
  return o;
}

// Blowing up the origin of the plane t2 = t3 = 0 inside the model chart
// Z[t1, t2, t3]/(t1 t2 - p) gives the two-variable model again on the
// relevant chart.
inline Outcome model_replay_goal() {
  ChartPresentation c;
  c.name = "model";
  c.reg = make_registry({"t1", "t2", "t3"});
  c.weights.assign(3, Weight{});
  c.monomial = {"t1", "t2"};
  CenterSpec s;
  s.chart = "model";
  s.scaling = "lambda";
  s.generators = {{c.var("t2"), c.parse("1"), "T2"}, {c.var("t3"), c.parse("1"), "T3"}};
  s.rename = {{"t1", "T1"}};
  auto b = blowup_step(c, s, "model1");
  Outcome o;
  auto v = validate(b);
  o.detail["chart"] = chart_to_json(b);
  o.detail["validate"] = v.to_json();
  bool shape = b.monomial == std::vector<std::string>{"T1", "lambda", "T2"} && b.equations.empty() &&
               b.excluded.size() == 1 && b.excluded[0] == std::vector<Polynomial>{b.var("T2"), b.var("T3")};
  o.status = pass_if(v.ok && shape);
  return o;
}

inline Outcome replay_goal(const Context& ctx, int k) {
  auto r = replay_step(ctx.tower, find_step(ctx.steps, k));
  Outcome o;
  o.detail = r.report.to_json();
  o.status = pass_if(r.ok());
  return o;
}

inline Outcome smooth_goal(const Context& ctx, int k) {
  const auto& st = find_step(ctx.steps, k);
  Outcome o;
  o.detail["centers"] = nlohmann::json::array();
  for (auto& center : st.centers) {
    auto c = center_chart(ctx.tower.at(st.parent), center);
    auto cert = smooth_center(c, center_generators(c, center), center.label, ctx.jacobian());
    o.status = worst(o.status, from_verdict(cert.verdict, verify(c, cert)));
    o.detail["centers"].push_back(cert.to_json());
  }
  return o;
}

inline Outcome nc_goal(const Context& ctx, int k) {
  const auto& st = find_step(ctx.steps, k);
  Outcome o;
  o.detail["strata"] = nlohmann::json::array();
  for (auto& center : st.centers) {
    auto c = center_chart(ctx.tower.at(st.parent), center);
    for (auto& cert : nc_intersection(c, center_generators(c, center), center.label, ctx.jacobian())) {
      o.status = worst(o.status, from_verdict(cert.verdict, verify(c, cert)));
      o.detail["strata"].push_back(cert.to_json());
    }
  }
  return o;
}

inline Outcome semistable_goal(const Context& ctx, const ChartPresentation& c) {
  auto cert = semistable(c, ctx.jacobian());
  return {from_verdict(cert.verdict, verify(c, cert)), cert.to_json()};
}

// Passes when the chart is rejected with a named obstruction.
inline Outcome semistable_control_goal(const Context& ctx) {
  auto c = triple_point_chart();
  auto cert = semistable(c, ctx.jacobian());
  Outcome o{Status::Pass, cert.to_json()};
  o.detail["expected"] = "rejected";
  o.status = pass_if(cert.verdict == Verdict::NotCertified && !cert.obstructions.empty());
  return o;
}

inline Outcome identity_results(const std::vector<pluecker::IdentityResult>& rs) {
  Outcome o;
  o.detail["checks"] = nlohmann::json::array();
  for (auto& r : rs) {
    o.detail["checks"].push_back(r.to_json());
    if (!r.ok) o.status = Status::Fail;
  }
  return o;
}

inline Outcome relations_goal(int k) {
  std::vector<int> rows(static_cast<std::size_t>(k + 3));
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<int>(i) + 1;
  auto bad = pluecker::pluecker_relations(k, rows);
  Outcome o;
  o.detail["failing"] = bad;
  o.status = pass_if(bad.empty());
  return o;
}

inline Outcome nonvanishing_goal(const Context& ctx, int k) {
  pluecker::Workspace w(ctx.tower, ctx.pluecker);
  pluecker::NonvanishingOptions opts;
  opts.groebner = ctx.groebner();
  auto cert = pluecker::verify_nonvanishing(w, k, opts);
  return {from_verdict(cert.verdict, cert.verify()), cert.to_json()};
}

inline nlohmann::json point_json(const std::map<std::string, Rational>& pt) {
  nlohmann::json j = nlohmann::json::object();
  for (auto& [x, v] : pt) j[x] = v.get_str();
  return j;
}

inline Outcome cover_goal(const Context& ctx, std::size_t elements, bool expect_cover) {
  const auto& t1 = ctx.tower.at("T1");
  std::vector<SymplecticElement> els(ctx.elements.begin(),
                                     ctx.elements.begin() + static_cast<std::ptrdiff_t>(std::min(elements, ctx.elements.size())));
  auto r = covering_check(ctx.tower, "T1", t1.var("a23_1"), els, ctx.groebner());
  Outcome o;
  o.detail["verdict"] = verdict_name(r.verdict);
  o.detail["opens"] = nlohmann::json::array();
  for (auto& op : r.opens) o.detail["opens"].push_back({{"element", op.element}, {"function", op.function.to_string()}});
  o.detail["pieces"] = r.certificates.size();
  o.detail["notes"] = r.notes;
  if (r.refutation) o.detail["refutation"] = point_json(*r.refutation);
  if (expect_cover)
    o.status = from_verdict(r.verdict, r.verify());
  else if (r.verdict == Verdict::Inconclusive)
    o.status = Status::Inconclusive;
  else
    o.status = pass_if(r.verdict == Verdict::NotCertified && r.refutation.has_value());
  if (!expect_cover) o.detail["expected"] = "refuted";
  return o;
}

}  // namespace detail

/// The full plan, in report order.
inline std::vector<Goal> catalogue(const Context& ctx) {
  using namespace detail;
  std::vector<Goal> g;
  for (int n : {2, 3}) g.push_back({"schubert:g=" + std::to_string(n), "", [n](const Context&) { return schubert_goal(n); }});
  for (int k = 0; k <= 5; ++k) {
    std::string c = chart_name(k);
    g.push_back({"chart:" + c, c, [c](const Context& x) { return chart_goal(x, c); }});
  }
  g.push_back({"replay:model", "", [](const Context&) { return model_replay_goal(); }});
  for (auto& st : ctx.steps) {
    int k = st.step;
    std::string pre = "step:" + std::to_string(k) + ":";
    g.push_back({pre + "replay", st.child, [k](const Context& x) { return replay_goal(x, k); }});
    g.push_back({pre + "smooth", st.parent, [k](const Context& x) { return smooth_goal(x, k); }});
    g.push_back({pre + "nc", st.parent, [k](const Context& x) { return nc_goal(x, k); }});
  }
  for (int k = 0; k <= 5; ++k) {
    std::string c = chart_name(k);
    g.push_back({"semistable:" + c, c, [c](const Context& x) { return semistable_goal(x, x.tower.at(c)); }});
  }
  g.push_back({"semistable:control", "", [](const Context& x) { return semistable_control_goal(x); }});
  for (std::size_t i = 0; i < ctx.pluecker.identities.size(); ++i) {
    const auto& s = ctx.pluecker.identities[i];
    g.push_back({"identities:" + s.label, s.chart, [i](const Context& x) {
                   pluecker::Workspace w(x.tower, x.pluecker);
                   return identity_results({w.verify_identity(x.pluecker.identities[i])});
                 }});
  }
  for (auto& t : ctx.pluecker.tables) {
    int k = t.k;
    g.push_back({"factorization:k=" + std::to_string(k), t.chart, [k](const Context& x) {
                   pluecker::Workspace w(x.tower, x.pluecker);
                   return identity_results(w.verify_factorization(k));
                 }});
  }
  for (int k : {2, 3})
    g.push_back({"relations:k=" + std::to_string(k), "", [k](const Context&) { return relations_goal(k); }});
  for (int k : {1, 2, 3})
    g.push_back({"nonvanishing:k=" + std::to_string(k), "", [k](const Context& x) { return nonvanishing_goal(x, k); }});
  g.push_back({"cover:T1", "T1", [](const Context& x) { return cover_goal(x, x.elements.size(), true); }});
  g.push_back({"cover:T1:without-g5", "T1", [](const Context& x) { return cover_goal(x, 4, false); }});
  return g;
}

inline const Goal& find_goal(const std::vector<Goal>& goals, const std::string& name) {
  for (auto& g : goals)
    if (g.name == name) return g;
  throw UnknownGoal("unknown goal '" + name + "'");
}

/// Goals whose name starts with `prefix`, optionally restricted to a chart.
inline std::vector<Goal> select(const std::vector<Goal>& goals, const std::string& prefix,
                                const std::optional<std::string>& chart = std::nullopt) {
  std::vector<Goal> out;
  for (auto& g : goals)
    if (g.name.rfind(prefix, 0) == 0 && (!chart || g.chart == *chart)) out.push_back(g);
  return out;
}

inline GoalResult run_goal(const Context& ctx, const Goal& g) {
  GoalResult r;
  r.name = g.name;
  auto t0 = std::chrono::steady_clock::now();
  try {
    Outcome o = g.run(ctx);
    r.status = o.status;
    r.detail = std::move(o.detail);
  } catch (const BudgetExceeded& e) {
    r.status = Status::Inconclusive;
    r.detail = {{"budget", e.what()}};
  } catch (const std::exception& e) {
    r.status = Status::Fail;
    r.detail = {{"error", e.what()}};
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

/// Runs the goals on `jobs` threads. Results come back in plan order.
inline std::vector<GoalResult> run(const Context& ctx, const std::vector<Goal>& goals, unsigned jobs = 1) {
  std::vector<GoalResult> out(goals.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < goals.size();) out[i] = run_goal(ctx, goals[i]);
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(goals.size())));
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return out;
}

/// Deterministic report: no timings, no thread counts.
inline nlohmann::json report(const std::string& command, const std::vector<GoalResult>& results) {
  nlohmann::json j;
  j["schema"] = 1;
  j["command"] = command;
  std::map<std::string, int> counts{{"pass", 0}, {"fail", 0}, {"inconclusive", 0}};
  j["goals"] = nlohmann::json::array();
  for (auto& r : results) {
    j["goals"].push_back({{"goal", r.name}, {"status", status_name(r.status)}, {"detail", r.detail}});
    ++counts[status_name(r.status)];
  }
  j["summary"] = counts;
  return j;
}

inline nlohmann::json timing(const std::vector<GoalResult>& results, unsigned jobs, double wall) {
  nlohmann::json j;
  j["jobs"] = jobs;
  j["wall_seconds"] = wall;
  for (auto& r : results) j["goals"][r.name] = r.seconds;
  return j;
}

inline int exit_code(const std::vector<GoalResult>& results) {
  bool inconclusive = false;
  for (auto& r : results) {
    if (r.status == Status::Fail) return 2;
    inconclusive = inconclusive || r.status == Status::Inconclusive;
  }
  return inconclusive ? 3 : 0;
}

// ---------------------------------------------------------------------------
// explain

namespace detail {

inline std::string notation(const std::string& expr) {
  static const std::regex ident("[A-Za-z_][A-Za-z0-9_]*");
  std::string out;
  auto it = std::sregex_iterator(expr.begin(), expr.end(), ident);
  std::size_t at = 0;
  for (; it != std::sregex_iterator(); ++it) {
    out += expr.substr(at, static_cast<std::size_t>(it->position()) - at);
    out += notation_name(it->str());
    at = static_cast<std::size_t>(it->position() + it->length());
  }
  return out + expr.substr(at);
}

inline std::size_t width(const std::string& s) {
  std::size_t n = 0;
  for (unsigned char c : s) n += (c & 0xC0) != 0x80;
  return n;
}

inline std::string pad(const std::string& s, std::size_t w) { return s + std::string(w - std::min(w, width(s)), ' '); }

/// Jacobian of `gens` with one labelled column per chart coordinate.
inline std::string jacobian_table(const ChartPresentation& c, const std::vector<Polynomial>& gens,
                                  const std::vector<std::string>& labels) {
  const std::size_t n = c.reg->size();
  std::vector<std::vector<std::string>> cells(gens.size() + 1, std::vector<std::string>(n + 1));
  cells[0][0] = "";
  for (std::size_t v = 0; v < n; ++v) cells[0][v + 1] = "d/d" + notation_name(c.reg->name(v));
  for (std::size_t i = 0; i < gens.size(); ++i) {
    cells[i + 1][0] = labels[i];
    for (std::size_t v = 0; v < n; ++v) cells[i + 1][v + 1] = notation(gens[i].derivative(v).to_string());
  }
  std::vector<std::size_t> w(n + 1, 0);
  for (auto& row : cells)
    for (std::size_t k = 0; k <= n; ++k) w[k] = std::max(w[k], width(row[k]));
  std::ostringstream os;
  for (auto& row : cells) {
    std::string line;
    for (std::size_t k = 0; k <= n; ++k) line += pad(row[k], w[k]) + (k == n ? "" : "  ");
    while (!line.empty() && line.back() == ' ') line.pop_back();
    os << line << "\n";
  }
  return os.str();
}

inline std::string explain_step(const Context& ctx, int k, bool nc) {
  const auto& st = find_step(ctx.steps, k);
  std::ostringstream os;
  for (auto& center : st.centers) {
    auto c = center_chart(ctx.tower.at(st.parent), center);
    auto gens = center_generators(c, center);
    os << "step " << k << ", center " << center.label << " on " << c.name;
    if (!center.restrict.empty()) {
      os << " where";
      for (auto& u : center.restrict) os << " " << notation(u);
      os << " is invertible";
    }
    os << "\n";
    std::vector<Polynomial> rows = c.equations;
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < c.equations.size(); ++i)
      labels.push_back(i < c.equation_labels.size() && !c.equation_labels[i].empty() ? c.equation_labels[i]
                                                                                      : "E" + std::to_string(i + 1));
    for (std::size_t i = 0; i < gens.size(); ++i) {
      rows.push_back(gens[i]);
      labels.push_back("h" + std::to_string(i + 1) + " = " + notation(gens[i].to_string()));
    }
    os << "\njacobian\n" << jacobian_table(c, rows, labels) << "\n";
    std::vector<JacobianCertificate> certs;
    if (nc)
      certs = nc_intersection(c, gens, center.label, ctx.jacobian());
    else
      certs.push_back(smooth_center(c, gens, center.label, ctx.jacobian()));
    for (auto& cert : certs) {
      os << cert.label << ": " << verdict_name(cert.verdict) << ", codimension " << cert.rows << " in " << cert.ambient
         << "\n";
      for (auto& p : cert.pieces) {
        os << "  piece " << notation(p.piece.label());
        if (p.witness.kind == MinorWitness::Kind::Misses) {
          os << ": the center does not meet this piece\n";
          continue;
        }
        os << ": rows";
        for (auto& r : p.rows) os << " " << r;
        os << ", columns";
        for (auto& col : p.cols) os << " " << notation_name(col);
        os << "\n    minor " << notation(p.minor.to_string()) << " (" << MinorWitness::kind_name(p.witness.kind) << ")\n";
      }
      for (auto& ob : cert.obstructions) os << "  obstruction: " << ob << "\n";
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace detail

/// Human-readable derivation for one goal of the catalogue.
inline std::string explain(const Context& ctx, const std::string& name) {
  auto goals = catalogue(ctx);
  const Goal& g = find_goal(goals, name);
  std::smatch m;
  static const std::regex step_re("step:([1-6]):(smooth|nc)");
  if (std::regex_match(name, m, step_re)) return detail::explain_step(ctx, std::stoi(m[1]), m[2] == "nc");
  static const std::regex nv_re("nonvanishing:k=([1-3])");
  if (std::regex_match(name, m, nv_re)) {
    pluecker::Workspace w(ctx.tower, ctx.pluecker);
    pluecker::NonvanishingOptions opts;
    opts.groebner = ctx.groebner();
    auto cert = pluecker::verify_nonvanishing(w, std::stoi(m[1]), opts);
    return detail::notation(cert.render());
  }
  auto r = run_goal(ctx, g);
  return g.name + ": " + status_name(r.status) + "\n" + r.detail.dump(2) + "\n";
}

}  // namespace resolve::driver
