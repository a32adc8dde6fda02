#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "resolve/deduce.hpp"
#include "resolve/ideal.hpp"
#include "resolve/parse.hpp"

namespace resolve {

using Weight = std::vector<int>;

inline std::string weight_string(const Weight& w) {
  std::string s = "(";
  for (std::size_t i = 0; i < w.size(); ++i) s += (i ? "," : "") + std::to_string(w[i]);
  return s + ")";
}

/// Affine chart of the tower: coordinates with torus weights, the monomial
/// whose product is p, equations, excluded closed sets and the map to the
/// parent chart.
struct ChartPresentation {
  std::string name;
  std::string parent;
  int torus_rank = 0;
  int ambient_dimension = 0;
  Registry reg;
  std::vector<Weight> weights;
  std::vector<std::string> monomial;
  std::vector<Polynomial> equations;
  std::vector<std::string> equation_labels;
  std::vector<std::vector<Polynomial>> excluded;
  // parent variable -> image in this chart, in file order
  std::vector<std::pair<std::string, Polynomial>> substitution;

  Polynomial var(std::string_view n) const { return Polynomial::variable(reg, n); }
  Polynomial parse(std::string_view text) const { return parse_polynomial(text, reg); }
  const std::string& p_variable() const { return monomial.back(); }

  std::vector<std::string> scaling() const { return {monomial.begin(), monomial.end() - 1}; }

  bool is_monomial_variable(std::size_t v) const {
    return std::find(monomial.begin(), monomial.end(), reg->name(v)) != monomial.end();
  }

  Polynomial monomial_product() const {
    Polynomial m = Polynomial::constant(reg, 1);
    for (auto& n : monomial) m *= var(n);
    return m;
  }

  Weight weight_of(const Monomial& m) const {
    Weight w(static_cast<std::size_t>(torus_rank), 0);
    for (std::size_t v = 0; v < reg->size(); ++v)
      for (std::size_t k = 0; k < w.size(); ++k) w[k] += static_cast<int>(m[v]) * weights[v][k];
    return w;
  }

  // Common weight of all terms, or nullopt when f is not homogeneous.
  std::optional<Weight> homogeneous_weight(const Polynomial& f) const {
    if (f.is_zero()) return Weight(static_cast<std::size_t>(torus_rank), 0);
    Weight w = weight_of(f.terms()[0].mono);
    for (auto& t : f.terms())
      if (weight_of(t.mono) != w) return std::nullopt;
    return w;
  }

  // Single-generator exclusions: functions invertible on the whole chart.
  std::vector<Polynomial> units() const {
    std::vector<Polynomial> u;
    for (auto& e : excluded)
      if (e.size() == 1) u.push_back(e[0]);
    return u;
  }

  Locus locus() const { return Locus{reg, equations, equation_labels, excluded, {}}; }
};

// ---------------------------------------------------------------------------
// JSON

inline ChartPresentation chart_from_json(const nlohmann::json& j) {
  ChartPresentation c;
  try {
    c.name = j.at("name").get<std::string>();
    c.parent = j.value("parent", std::string());
    c.torus_rank = j.at("torus_rank").get<int>();
    c.ambient_dimension = j.value("ambient_dimension", 0);
    std::vector<std::string> names;
    for (auto& v : j.at("variables")) {
      names.push_back(v.at("name").get<std::string>());
      c.weights.push_back(v.at("weights").get<Weight>());
    }
    c.reg = make_registry(names);
    c.monomial = j.at("monomial").get<std::vector<std::string>>();
    for (auto& n : c.monomial)
      if (!c.reg->contains(n)) throw DataError("monomial variable '" + n + "' is not a coordinate");
    for (auto& e : j.value("equations", nlohmann::json::array())) {
      if (e.is_object()) {
        c.equations.push_back(c.parse(e.at("expr").get<std::string>()));
        c.equation_labels.push_back(e.value("label", std::string()));
      } else {
        c.equations.push_back(c.parse(e.get<std::string>()));
        c.equation_labels.push_back("E" + std::to_string(c.equations.size()));
      }
    }
    for (auto& ex : j.value("excluded", nlohmann::json::array())) {
      std::vector<Polynomial> gens;
      for (auto& g : ex) gens.push_back(c.parse(g.get<std::string>()));
      c.excluded.push_back(std::move(gens));
    }
    const nlohmann::json subst = j.value("substitution", nlohmann::json::object());
    for (auto& [k, v] : subst.items())
      c.substitution.push_back({k, c.parse(v.get<std::string>())});
  } catch (const nlohmann::json::exception& e) {
    throw DataError("chart " + (c.name.empty() ? std::string("?") : c.name) + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError("chart " + c.name + ": " + e.what());
  } catch (const ParseError& e) {
    throw DataError("chart " + c.name + ": " + e.what());
  }
  return c;
}

inline nlohmann::json chart_to_json(const ChartPresentation& c) {
  nlohmann::json j;
  j["schema"] = 1;
  j["name"] = c.name;
  if (!c.parent.empty()) j["parent"] = c.parent;
  j["torus_rank"] = c.torus_rank;
  if (c.ambient_dimension) j["ambient_dimension"] = c.ambient_dimension;
  j["variables"] = nlohmann::json::array();
  for (std::size_t v = 0; v < c.reg->size(); ++v) j["variables"].push_back({{"name", c.reg->name(v)}, {"weights", c.weights[v]}});
  j["monomial"] = c.monomial;
  j["equations"] = nlohmann::json::array();
  for (auto& e : c.equations) j["equations"].push_back(e.to_string());
  j["excluded"] = nlohmann::json::array();
  for (auto& ex : c.excluded) {
    nlohmann::json g = nlohmann::json::array();
    for (auto& p : ex) g.push_back(p.to_string());
    j["excluded"].push_back(g);
  }
  j["substitution"] = nlohmann::json::object();
  for (auto& [k, v] : c.substitution) j["substitution"][k] = v.to_string();
  return j;
}

// Parses a file, reporting the byte offset of syntax errors.
inline nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    nlohmann::json j = nlohmann::json::parse(in);
    if (j.is_object() && j.contains("schema") && j["schema"] != 1)
      throw DataError(path.string() + ": unsupported schema version " + j["schema"].dump());
    return j;
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(path.string() + ": malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

inline std::filesystem::path data_dir() {
  if (const char* env = std::getenv("RESOLVE_DATA_DIR"); env && *env) return env;
#ifdef RESOLVE_DEFAULT_DATA_DIR
  return RESOLVE_DEFAULT_DATA_DIR;
#else
  return "data";
#endif
}

// ---------------------------------------------------------------------------
// Validation

struct CheckReport {
  bool ok = true;
  std::vector<std::string> issues;
  std::vector<std::string> notes;

  void fail(std::string s) {
    ok = false;
    issues.push_back(std::move(s));
  }
  nlohmann::json to_json() const { return {{"ok", ok}, {"issues", issues}, {"notes", notes}}; }
};

inline CheckReport validate(const ChartPresentation& c) {
  CheckReport r;
  const std::size_t n = c.reg->size();
  if (c.ambient_dimension && static_cast<int>(n) != c.ambient_dimension)
    r.fail(c.name + ": " + std::to_string(n) + " coordinates, ambient dimension " + std::to_string(c.ambient_dimension));
  if (c.weights.size() != n) r.fail(c.name + ": weight table has wrong length");
  for (std::size_t v = 0; v < std::min(n, c.weights.size()); ++v)
    if (static_cast<int>(c.weights[v].size()) != c.torus_rank)
      r.fail(c.name + ": weight of " + c.reg->name(v) + " has length " + std::to_string(c.weights[v].size()));
  if (!r.ok) return r;
  if (c.monomial.empty()) r.fail(c.name + ": empty monomial relation");
  std::set<std::string> seen;
  for (auto& m : c.monomial)
    if (!seen.insert(m).second) r.fail(c.name + ": monomial variable " + m + " repeated; the special fibre would not be reduced");
  Weight mw = c.weight_of(c.monomial_product().terms()[0].mono);
  if (mw != Weight(static_cast<std::size_t>(c.torus_rank), 0))
    r.fail(c.name + ": monomial " + c.monomial_product().to_string() + " has weight " + weight_string(mw));
  auto check = [&](const Polynomial& f, const std::string& what) {
    if (f.is_zero()) return;
    Weight w = c.weight_of(f.terms()[0].mono);
    for (auto& t : f.terms()) {
      Weight wt = c.weight_of(t.mono);
      if (wt != w) {
        r.fail(c.name + ": " + what + " " + f.to_string() + " is not homogeneous: term " +
               Polynomial::monomial(c.reg, t.mono, t.coef).to_string() + " has weight " + weight_string(wt) +
               ", leading term " + weight_string(w));
        return;
      }
    }
  };
  for (std::size_t i = 0; i < c.equations.size(); ++i) check(c.equations[i], "equation");
  for (auto& ex : c.excluded)
    for (auto& g : ex) check(g, "excluded generator");
  if (!c.parent.empty() && c.reg->contains("p")) r.fail(c.name + ": p must be represented by the monomial");
  r.notes.push_back(std::to_string(n) + " coordinates, torus rank " + std::to_string(c.torus_rank));
  return r;
}

// ---------------------------------------------------------------------------
// Tower

class Tower {
 public:
  Tower() = default;

  static Tower load(const std::filesystem::path& dir = data_dir(),
                    const std::vector<std::string>& names = {"L0", "T0", "T1", "T2", "T3", "T4", "T5"}) {
    Tower t;
    for (auto& n : names) t.add(chart_from_json(read_json_file(dir / (n + ".json"))));
    return t;
  }

  void add(ChartPresentation c) {
    std::string n = c.name;
    order_.push_back(n);
    charts_.insert_or_assign(n, std::move(c));
  }

  bool has(const std::string& n) const { return charts_.count(n) > 0; }
  const ChartPresentation& at(const std::string& n) const {
    auto it = charts_.find(n);
    if (it == charts_.end()) throw DataError("unknown chart '" + n + "'");
    return it->second;
  }
  ChartPresentation& mut(const std::string& n) {
    auto it = charts_.find(n);
    if (it == charts_.end()) throw DataError("unknown chart '" + n + "'");
    return it->second;
  }
  const std::vector<std::string>& names() const { return order_; }

  // Root first, chart last.
  std::vector<std::string> ancestry(const std::string& n) const {
    std::vector<std::string> chain{n};
    while (!at(chain.back()).parent.empty()) {
      const std::string& p = at(chain.back()).parent;
      if (!has(p)) throw DataError("chart " + chain.back() + " has dangling parent '" + p + "'");
      if (chain.size() > charts_.size()) throw DataError("cycle in chart parents");
      chain.push_back(p);
    }
    return {chain.rbegin(), chain.rend()};
  }

  /// Images in `chart` of every coordinate of `ancestor`.
  std::map<std::string, Polynomial> composed_substitution(const std::string& ancestor, const std::string& chart) const {
    auto chain = ancestry(chart);
    auto it = std::find(chain.begin(), chain.end(), ancestor);
    if (it == chain.end()) throw DataError(ancestor + " is not an ancestor of " + chart);
    const ChartPresentation& a = at(ancestor);
    std::map<std::string, Polynomial> img;
    for (auto& n : a.reg->names()) img.emplace(n, a.var(n));
    for (++it; it != chain.end(); ++it) {
      const ChartPresentation& c = at(*it);
      std::map<std::string, Polynomial> step(c.substitution.begin(), c.substitution.end());
      for (auto& [k, v] : img) v = v.substitute(step, c.reg);
    }
    return img;
  }

  Polynomial pullback(const std::string& ancestor, const std::string& chart, const Polynomial& f) const {
    auto img = composed_substitution(ancestor, chart);
    return f.substitute(img, at(chart).reg);
  }

  std::string root(const std::string& chart) const { return ancestry(chart).front(); }

  /// Expressions of the big-cell coordinates a_ij and p on the chart.
  std::map<std::string, Polynomial> total_substitution(const std::string& chart) const {
    return composed_substitution(root(chart), chart);
  }

 private:
  std::map<std::string, ChartPresentation> charts_;
  std::vector<std::string> order_;
};

// ---------------------------------------------------------------------------
// Pullback consistency

struct MembershipCheck {
  bool member = false;
  Polynomial residual;
  std::string note;
};

/// f in the chart ideal, first plainly, then with the chart's units
/// inverted (the charts live over localisations).
inline MembershipCheck chart_ideal_contains(const ChartPresentation& c, const Polynomial& f,
                                            const GroebnerOptions& opts = {}) {
  MembershipCheck m;
  GroebnerOptions o = opts;
  o.track_cofactors = false;
  GroebnerBasis gb = groebner(c.equations, c.reg, o);
  m.residual = normal_form(gb, f);
  if (m.residual.is_zero()) {
    m.member = true;
    return m;
  }
  auto units = c.units();
  if (units.empty()) return m;
  std::vector<std::string> extra;
  for (std::size_t k = 0; k < units.size(); ++k) extra.push_back(fresh_name(*c.reg, "_u" + std::to_string(k)));
  Registry ext = extend_registry(c.reg, extra);
  std::vector<Polynomial> gens;
  for (auto& e : c.equations) gens.push_back(e.embed(ext));
  for (std::size_t k = 0; k < units.size(); ++k)
    gens.push_back(Polynomial::variable(ext, extra[k]) * units[k].embed(ext) - Polynomial::constant(ext, 1));
  GroebnerBasis gb2 = groebner(gens, ext, o);
  Polynomial r = normal_form(gb2, f.embed(ext));
  if (r.is_zero()) {
    m.member = true;
    m.note = "member after inverting the chart units";
  }
  return m;
}

/// Locus of points of `c` where all of `gens` vanish, minus the exclusions.
inline Locus restricted_locus(const ChartPresentation& c, const std::vector<Polynomial>& gens,
                              const std::string& label = "restriction") {
  Locus l = c.locus();
  for (auto& g : gens) {
    l.equations.push_back(g);
    l.labels.push_back(label);
  }
  return l;
}

/// Open piece of a chart where one chosen generator of each exclusion is
/// inverted. The pieces over all choices cover the chart.
struct CoverPiece {
  std::vector<Polynomial> inverted;

  std::string label() const {
    std::string s = "{";
    for (std::size_t i = 0; i < inverted.size(); ++i) s += (i ? ", " : "") + inverted[i].to_string();
    return s + "}";
  }
};

/// Cartesian product of one generator per exclusion, deduplicated; pieces
/// on which the equations and inversions generate 1 are dropped.
/// Pieces of the cover by the exclusions. With `drop_empty`, pieces shown
/// empty by a Groebner computation are dropped.
inline std::vector<CoverPiece> cover_pieces(const ChartPresentation& c, std::vector<std::string>* notes = nullptr,
                                            const GroebnerOptions& opts = {}, bool drop_empty = true) {
  std::vector<std::vector<Polynomial>> partial{{}};
  for (auto& ex : c.excluded) {
    std::vector<std::vector<Polynomial>> next;
    for (auto& pre : partial)
      for (auto& g : ex) {
        auto v = pre;
        if (std::find(v.begin(), v.end(), g) == v.end()) v.push_back(g);
        next.push_back(std::move(v));
      }
    partial = std::move(next);
  }
  std::set<std::set<std::string>> seen;
  std::vector<CoverPiece> out;
  for (auto& inv : partial) {
    std::set<std::string> key;
    for (auto& g : inv) key.insert(g.to_string());
    if (!seen.insert(key).second) continue;
    CoverPiece piece{inv};
    if (!drop_empty) {
      out.push_back(std::move(piece));
      continue;
    }
    auto r = is_unit(LocalizedPresentation{c.reg, c.equations, inv}, {}, opts);
    if (r.verdict == Verdict::Certified) {
      if (notes) notes->push_back("piece " + piece.label() + " is empty and dropped");
      continue;
    }
    out.push_back(std::move(piece));
  }
  return out;
}

inline CheckReport pullback_check(const Tower& t, const std::string& name, const GroebnerOptions& opts = {}) {
  CheckReport r;
  const ChartPresentation& c = t.at(name);
  if (c.parent.empty()) {
    r.notes.push_back(name + " is the root chart");
    return r;
  }
  const ChartPresentation& par = t.at(c.parent);
  std::map<std::string, Polynomial> step(c.substitution.begin(), c.substitution.end());
  for (auto& [k, v] : step)
    if (!par.reg->contains(k)) r.fail(name + ": substitution of unknown parent variable " + k);
  for (std::size_t v = 0; v < par.reg->size(); ++v)
    if (!step.count(par.reg->name(v)) && !c.reg->contains(par.reg->name(v)))
      r.fail(name + ": parent variable " + par.reg->name(v) + " has no image");
  if (!r.ok) return r;

  // Weights: the image of x has weight (w(x), 0, ..., 0).
  for (std::size_t v = 0; v < par.reg->size(); ++v) {
    Polynomial img = par.var(par.reg->name(v)).substitute(step, c.reg);
    auto w = c.homogeneous_weight(img);
    Weight want = par.weights[v];
    want.resize(static_cast<std::size_t>(c.torus_rank), 0);
    if (!w || *w != want)
      r.fail(name + ": image " + img.to_string() + " of " + par.reg->name(v) + " has weight " +
             (w ? weight_string(*w) : std::string("(inhomogeneous)")) + ", expected " + weight_string(want));
  }
  Polynomial pm = par.monomial_product().substitute(step, c.reg);
  if (pm != c.monomial_product())
    r.fail(name + ": parent monomial maps to " + pm.to_string() + ", not " + c.monomial_product().to_string());

  for (std::size_t i = 0; i < par.equations.size(); ++i) {
    Polynomial img = par.equations[i].substitute(step, c.reg);
    auto m = chart_ideal_contains(c, img, opts);
    if (!m.member)
      r.fail(name + ": parent equation " + par.equations[i].to_string() + " leaves residual " + m.residual.to_string());
    else if (!m.note.empty())
      r.notes.push_back("parent equation " + std::to_string(i) + ": " + m.note);
  }
  // Each parent exclusion pulls back into the union of this chart's exclusions.
  for (auto& ex : par.excluded) {
    std::vector<Polynomial> img;
    for (auto& g : ex) img.push_back(g.substitute(step, c.reg));
    auto proof = prove_empty(restricted_locus(c, img, "pulled-back exclusion"));
    std::string s;
    for (auto& g : ex) s += (s.empty() ? "" : ", ") + g.to_string();
    if (!proof)
      r.fail(name + ": preimage of excluded set (" + s + ") is not shown to be excluded");
    else if (!proof->verify())
      r.fail(name + ": exclusion proof for (" + s + ") failed re-verification");
  }
  return r;
}

/// Pull `downstairs` back from `ancestor` to `chart`, add the chart
/// equations, and saturate by every scaling variable introduced since.
inline Ideal strict_transform(const Tower& t, const std::string& chart, const std::string& ancestor,
                              const Ideal& downstairs, const GroebnerOptions& opts = {}) {
  const ChartPresentation& c = t.at(chart);
  const ChartPresentation& a = t.at(ancestor);
  if (!same_registry(downstairs.reg, a.reg)) throw RegistryMismatch("downstairs ideal is not over " + ancestor);
  auto img = t.composed_substitution(ancestor, chart);
  Ideal i{c.reg, c.equations};
  for (auto& g : downstairs.gens) i.gens.push_back(g.substitute(img, c.reg));
  auto old = a.scaling();
  for (auto& s : c.scaling()) {
    if (std::find(old.begin(), old.end(), s) != old.end()) continue;
    i = saturate(i, c.var(s), opts);
  }
  return i;
}

}  // namespace resolve
