#pragma once

#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "resolve/certify.hpp"
#include "resolve/chart.hpp"
#include "resolve/deduce.hpp"
#include "resolve/polymatrix.hpp"
#include "resolve/schubert.hpp"

namespace resolve::pluecker {

using Index = std::vector<int>;  // 1-based row indices

inline std::string index_string(const Index& ix) {
  std::string s;
  for (std::size_t i = 0; i < ix.size(); ++i) s += (i ? "," : "") + std::to_string(ix[i]);
  return s;
}

inline Index parse_index(const std::string& s) {
  Index ix;
  std::size_t at = 0;
  while (at < s.size()) {
    std::size_t end = s.find(',', at);
    if (end == std::string::npos) end = s.size();
    try {
      ix.push_back(std::stoi(s.substr(at, end - at)));
    } catch (const std::exception&) {
      throw DataError("bad row index '" + s + "'");
    }
    at = end + 1;
  }
  return ix;
}

struct ChartDefinitions {
  std::vector<std::string> inverses;                          // chart variables declared invertible
  std::vector<std::pair<std::string, std::string>> defs;      // name := expression, in order
};

struct IdentitySpec {
  std::string label, chart, lhs, rhs;
  std::vector<std::vector<std::string>> matrix;  // when present the left side is lhs * det(matrix)
};

/// One Grassmannian target: m = unit * M for every listed row subset.
struct TableSpec {
  int k = 0;
  std::string chart, unit;
  std::vector<std::pair<Index, std::string>> M;
  std::vector<Index> nonvanishing;

  const std::string& entry(const Index& ix) const {
    for (auto& [i, e] : M)
      if (i == ix) return e;
    throw DataError("no M entry " + index_string(ix) + " for k=" + std::to_string(k));
  }
};

struct Data {
  std::map<std::string, ChartDefinitions> definitions;
  std::vector<IdentitySpec> identities;
  std::vector<TableSpec> tables;

  const TableSpec& table(int k) const {
    for (auto& t : tables)
      if (t.k == k) return t;
    throw DataError("no table for k=" + std::to_string(k));
  }
};

inline Data load(const std::filesystem::path& file = data_dir() / "pluecker.json") {
  auto j = read_json_file(file);
  Data d;
  try {
    for (auto& [chart, v] : j.at("definitions").items()) {
      ChartDefinitions cd;
      cd.inverses = v.value("inverses", std::vector<std::string>{});
      for (auto& p : v.at("defs")) cd.defs.emplace_back(p.at(0).get<std::string>(), p.at(1).get<std::string>());
      d.definitions.emplace(chart, std::move(cd));
    }
    for (auto& i : j.at("identities")) {
      IdentitySpec s{i.at("label"), i.at("chart"), i.at("lhs"), i.at("rhs"), {}};
      if (i.contains("matrix")) s.matrix = i.at("matrix").get<std::vector<std::vector<std::string>>>();
      d.identities.push_back(std::move(s));
    }
    for (auto& t : j.at("tables")) {
      TableSpec s;
      s.k = t.at("k").get<int>();
      s.chart = t.at("chart").get<std::string>();
      s.unit = t.at("unit").get<std::string>();
      for (auto& [ix, e] : t.at("M").items()) s.M.emplace_back(parse_index(ix), e.get<std::string>());
      std::sort(s.M.begin(), s.M.end());
      for (auto& ix : t.at("nonvanishing")) s.nonvanishing.push_back(parse_index(ix.get<std::string>()));
      for (auto& [ix, e] : s.M)
        if (static_cast<int>(ix.size()) != s.k) throw DataError("M index " + index_string(ix) + " has wrong size");
      d.tables.push_back(std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(file.string() + ": " + e.what());
  }
  return d;
}

// ---------------------------------------------------------------------------
// Chart context: chart variables plus one inverse variable inv_x per declared
// unit x, with the relations x * inv_x - 1 added to the equations.

class ChartContext {
 public:
  ChartContext(const ChartPresentation& c, const ChartDefinitions& defs) : chart_(&c), defs_(defs) {
    std::vector<std::string> extra;
    for (auto& x : defs.inverses) {
      if (!c.reg->contains(x)) throw DataError(c.name + ": declared unit " + x + " is not a coordinate");
      extra.push_back("inv_" + x);
    }
    ext_ = extend_registry(c.reg, extra);
    std::vector<std::string> names = extra;
    for (auto& [n, e] : defs.defs) names.push_back(n);
    parse_reg_ = extend_registry(c.reg, names);
    for (auto& e : c.equations) gens_.push_back(e.embed(ext_));
    for (auto& x : defs.inverses)
      gens_.push_back(Polynomial::variable(ext_, "inv_" + x) * c.var(x).embed(ext_) - Polynomial::constant(ext_, 1));
    for (auto& [n, e] : defs.defs) values_.emplace(n, expand(e));
  }

  const ChartPresentation& chart() const { return *chart_; }
  const Registry& registry() const { return ext_; }
  const std::vector<Polynomial>& generators() const { return gens_; }

  /// Parses an expression that may use defined names and inv_ variables.
  Polynomial expand(const std::string& text) const {
    Polynomial f = parse_polynomial(text, parse_reg_);
    return f.substitute(values_, ext_);
  }

  Polynomial embed(const Polynomial& f) const { return f.embed(ext_); }

  Polynomial reduce(const Polynomial& f, const GroebnerOptions& opts = {}) const {
    if (!gb_) {
      GroebnerOptions o = opts;
      o.track_cofactors = false;
      gb_ = std::make_shared<GroebnerBasis>(groebner(gens_, ext_, o));
    }
    return normal_form(*gb_, f);
  }

  /// Multiplies away the inverse variables: the result lives on the chart
  /// and vanishes exactly where f does (the cleared factors are units).
  Polynomial clear_inverses(const Polynomial& f) const {
    Polynomial g = f;
    for (auto& x : defs_.inverses) {
      std::size_t u = ext_->index("inv_" + x), v = ext_->index(x);
      unsigned e = 0;
      for (auto& t : g.terms()) e = std::max(e, t.mono[u]);
      std::vector<Term> out;
      for (auto t : g.terms()) {
        unsigned a = t.mono[u];
        t.mono.set(u, 0);
        t.mono.set(v, t.mono[v] + (e - a));
        out.push_back(t);
      }
      g = Polynomial::from_terms(ext_, out);
    }
    return g.embed(chart_->reg);
  }

 private:
  const ChartPresentation* chart_;
  ChartDefinitions defs_;
  Registry ext_, parse_reg_;
  std::vector<Polynomial> gens_;
  std::map<std::string, Polynomial> values_;
  mutable std::shared_ptr<GroebnerBasis> gb_;
};

// ---------------------------------------------------------------------------
// Model matrices

/// Pi^k [A; K] over the big-cell registry.
inline PolyMatrix model_matrix(int k, int g = 3) {
  auto reg = schubert::big_cell_registry(g);
  auto f = schubert::frame(g, reg);
  PolyMatrix m = schubert::symmetric_matrix(g, reg).stack(f.K);
  for (int i = 0; i < k; ++i) m = f.Pi * m;
  return m;
}

/// Signed minor on the given rows (in the given order) and the first
/// `index.size()` columns.
inline Polynomial minor(const PolyMatrix& m, const Index& rows) {
  std::vector<std::size_t> rs, cs;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rs.push_back(static_cast<std::size_t>(rows[i] - 1));
    cs.push_back(i);
  }
  return m.submatrix(rs, cs).det();
}

/// The m coordinates of step k on the big cell: k x k minors of the first k
/// columns of Pi^k [A; K].
inline std::vector<std::pair<Index, Polynomial>> m_table(int k, const std::vector<Index>& indices) {
  PolyMatrix m = model_matrix(k);
  std::vector<std::pair<Index, Polynomial>> out;
  for (auto& ix : indices) out.emplace_back(ix, minor(m, ix));
  return out;
}

inline std::vector<Index> indices(const TableSpec& t) {
  std::vector<Index> out;
  for (auto& [ix, e] : t.M) out.push_back(ix);
  return out;
}

/// Three-term Pluecker relations among the k x k minors of the first k
/// columns of Pi^k [A; K] on `rows`: for a common (k-2)-set S and
/// i < j < l < n outside S, m(S,i,j) m(S,l,n) - m(S,i,l) m(S,j,n) +
/// m(S,i,n) m(S,j,l) = 0. Returns the failures.
inline std::vector<std::string> pluecker_relations(int k, const std::vector<int>& rows) {
  PolyMatrix m = model_matrix(k);
  std::vector<std::string> bad;
  if (k < 2) return bad;
  const std::size_t n = rows.size();
  for (auto& s : combinations(n, static_cast<std::size_t>(k - 2)))
    for (auto& q : combinations(n, 4)) {
      bool overlap = false;
      for (auto a : s)
        for (auto b : q) overlap = overlap || a == b;
      if (overlap) continue;
      auto mm = [&](std::size_t x, std::size_t y) {
        Index ix;
        for (auto a : s) ix.push_back(rows[a]);
        ix.push_back(rows[x]);
        ix.push_back(rows[y]);
        return minor(m, ix);
      };
      Polynomial r = mm(q[0], q[1]) * mm(q[2], q[3]) - mm(q[0], q[2]) * mm(q[1], q[3]) + mm(q[0], q[3]) * mm(q[1], q[2]);
      if (!r.is_zero()) {
        Index ix;
        for (auto a : s) ix.push_back(rows[a]);
        for (auto b : q) ix.push_back(rows[b]);
        bad.push_back(index_string(ix));
      }
    }
  return bad;
}

// ---------------------------------------------------------------------------
// Identity checks

struct IdentityResult {
  std::string table, label;
  bool ok = false;
  std::string lhs, rhs, residual;

  nlohmann::json to_json() const {
    return {{"table", table}, {"label", label}, {"ok", ok}, {"lhs", lhs}, {"rhs", rhs}, {"residual", residual}};
  }
};

/// lhs - rhs reduced modulo the chart ideal with the declared inverses.
inline IdentityResult check_difference(const ChartContext& ctx, std::string table, std::string label,
                                       const Polynomial& lhs, const Polynomial& rhs) {
  IdentityResult r;
  r.table = std::move(table);
  r.label = std::move(label);
  r.lhs = lhs.to_string();
  r.rhs = rhs.to_string();
  Polynomial res = ctx.reduce(lhs - rhs);
  r.ok = res.is_zero();
  r.residual = res.to_string();
  return r;
}

inline Polynomial identity_lhs(const ChartContext& ctx, const IdentitySpec& s) {
  Polynomial lhs = ctx.expand(s.lhs);
  if (!s.matrix.empty()) {
    PolyMatrix m(ctx.registry(), s.matrix.size(), s.matrix.size());
    for (std::size_t i = 0; i < s.matrix.size(); ++i) {
      if (s.matrix[i].size() != s.matrix.size()) throw DataError(s.label + ": matrix is not square");
      for (std::size_t j = 0; j < s.matrix.size(); ++j) m(i, j) = ctx.expand(s.matrix[i][j]);
    }
    lhs = lhs * m.det();
  }
  return lhs;
}

/// Owns the chart contexts for one tower and one data set.
class Workspace {
 public:
  Workspace(const Tower& t, Data d) : tower_(&t), data_(std::move(d)) {}

  const Data& data() const { return data_; }
  Data& mutable_data() {
    contexts_.clear();
    return data_;
  }
  const Tower& tower() const { return *tower_; }

  const ChartContext& context(const std::string& chart) const {
    auto it = contexts_.find(chart);
    if (it != contexts_.end()) return *it->second;
    static const ChartDefinitions none;
    auto d = data_.definitions.find(chart);
    auto ctx = std::make_shared<ChartContext>(tower_->at(chart), d == data_.definitions.end() ? none : d->second);
    return *contexts_.emplace(chart, ctx).first->second;
  }

  IdentityResult verify_identity(const IdentitySpec& s) const {
    const auto& ctx = context(s.chart);
    return check_difference(ctx, "identities", s.label, identity_lhs(ctx, s), ctx.expand(s.rhs));
  }

  std::vector<IdentityResult> verify_cofactor_identities() const {
    std::vector<IdentityResult> out;
    for (auto& s : data_.identities) out.push_back(verify_identity(s));
    return out;
  }

  /// m(ix) pulled back to the chart.
  Polynomial pulled_minor(const TableSpec& t, const Index& ix) const {
    const auto& ctx = context(t.chart);
    auto total = tower_->total_substitution(t.chart);
    Polynomial m = minor(model_matrix(t.k), ix);
    return ctx.embed(m.substitute(total, ctx.chart().reg));
  }

  IdentityResult verify_entry(const TableSpec& t, const Index& ix) const {
    const auto& ctx = context(t.chart);
    Polynomial rhs = ctx.expand(t.unit) * ctx.expand(t.entry(ix));
    return check_difference(ctx, "k=" + std::to_string(t.k), "m" + index_string(ix), pulled_minor(t, ix), rhs);
  }

  std::vector<IdentityResult> verify_factorization(int k) const {
    const auto& t = data_.table(k);
    std::vector<IdentityResult> out;
    for (auto& [ix, e] : t.M) out.push_back(verify_entry(t, ix));
    return out;
  }

 private:
  const Tower* tower_;
  Data data_;
  mutable std::map<std::string, std::shared_ptr<ChartContext>> contexts_;
};

// ---------------------------------------------------------------------------
// Seeded faults

struct Mutation {
  std::string where, what;
  std::string before, after;
};

/// Alters one term of `text` (as a polynomial over `reg`): a sign flip, a
/// dropped variable factor or an extra variable factor. Deterministic in the
/// generator state.
inline std::pair<std::string, std::string> mutate_expression(const std::string& text, const Registry& reg,
                                                             std::mt19937& rng) {
  Polynomial f = parse_polynomial(text, reg);
  if (f.is_zero()) return {"1", "replace 0 by 1"};
  auto terms = f.terms();
  std::uniform_int_distribution<std::size_t> pick_term(0, terms.size() - 1);
  std::uniform_int_distribution<int> pick_kind(0, 2);
  Term& t = terms[pick_term(rng)];
  std::string what;
  int kind = pick_kind(rng);
  std::vector<std::size_t> present;
  for (std::size_t v = 0; v < reg->size(); ++v)
    if (t.mono[v]) present.push_back(v);
  if (kind == 1 && present.empty()) kind = 0;
  if (kind == 0) {
    t.coef = -t.coef;
    what = "flip the sign of a term";
  } else if (kind == 1) {
    std::uniform_int_distribution<std::size_t> pv(0, present.size() - 1);
    std::size_t v = present[pv(rng)];
    t.mono.set(v, t.mono[v] - 1);
    what = "drop a factor " + reg->name(v);
  } else {
    std::uniform_int_distribution<std::size_t> pv(0, reg->size() - 1);
    std::size_t v = pv(rng);
    t.mono.set(v, t.mono[v] + 1);
    what = "multiply a term by " + reg->name(v);
  }
  return {Polynomial::from_terms(reg, terms).to_string(), what};
}

/// Replaces one entry of the chosen table by a mutated expression. Table
/// "identities" mutates the left side of an identity; "k=1".."k=3" an M entry.
inline Mutation seed_mutation(Workspace& w, const std::string& table, unsigned seed) {
  std::mt19937 rng(seed);
  Data& d = w.mutable_data();
  auto parse_reg = [&](const std::string& chart) {
    const auto& c = w.tower().at(chart);
    std::vector<std::string> names;
    auto it = d.definitions.find(chart);
    if (it != d.definitions.end()) {
      for (auto& x : it->second.inverses) names.push_back("inv_" + x);
      for (auto& [n, e] : it->second.defs) names.push_back(n);
    }
    return extend_registry(c.reg, names);
  };
  Mutation m;
  if (table == "identities") {
    std::uniform_int_distribution<std::size_t> pick(0, d.identities.size() - 1);
    auto& s = d.identities[pick(rng)];
    m.where = s.label;
    m.before = s.lhs;
    std::tie(s.lhs, m.what) = mutate_expression(s.lhs, parse_reg(s.chart), rng);
    m.after = s.lhs;
    return m;
  }
  for (auto& t : d.tables)
    if ("k=" + std::to_string(t.k) == table) {
      std::uniform_int_distribution<std::size_t> pick(0, t.M.size() - 1);
      auto& [ix, e] = t.M[pick(rng)];
      m.where = table + " M" + index_string(ix);
      m.before = e;
      std::tie(e, m.what) = mutate_expression(e, parse_reg(t.chart), rng);
      m.after = e;
      return m;
    }
  throw std::invalid_argument("unknown table " + table);
}

// ---------------------------------------------------------------------------
// Non-vanishing

struct NonvanishingCertificate {
  int k = 0;
  std::string chart;
  Verdict verdict = Verdict::NotCertified;
  std::vector<std::string> target_labels;
  std::vector<Polynomial> targets;  // on the chart, inverses cleared
  std::vector<std::pair<CoverPiece, CombinationCertificate>> pieces;
  std::optional<EmptinessProof> deduction;
  std::vector<std::string> notes;

  bool ok() const { return verdict == Verdict::Certified; }

  /// Replays every combination, or the deduction, from scratch.
  bool verify() const {
    if (!ok()) return false;
    if (deduction) {
      if (!deduction->verify()) return false;
      // The deduction must concern exactly the targets on the chart.
      const auto& eqs = deduction->locus.equations;
      for (auto& t : targets)
        if (std::find(eqs.begin(), eqs.end(), t) == eqs.end()) return false;
      return true;
    }
    for (auto& [piece, cert] : pieces) {
      if (!cert.verify()) return false;
      // Generators: equations, then targets, then the inverse relations.
      std::size_t base = cert.generators.size() - piece.inverted.size() - targets.size();
      for (std::size_t i = 0; i < targets.size(); ++i)
        if (cert.generators[base + i] != targets[i].embed(cert.reg)) return false;
    }
    return !pieces.empty();
  }

  std::string render() const {
    std::string s = "k=" + std::to_string(k) + " on " + chart + ": " + verdict_name(verdict) + "\n";
    s += "targets:";
    for (std::size_t i = 0; i < targets.size(); ++i) s += " " + target_labels[i];
    s += "\n";
    for (auto& n : notes) s += "note: " + n + "\n";
    if (deduction) s += deduction->render();
    for (auto& [piece, cert] : pieces) {
      std::size_t nz = 0;
      for (auto& c : cert.combiners) nz += !c.is_zero();
      s += "piece " + piece.label() + ": combination with " + std::to_string(nz) + " nonzero combiners\n";
    }
    return s;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["k"] = k;
    j["chart"] = chart;
    j["verdict"] = verdict_name(verdict);
    j["targets"] = nlohmann::json::array();
    for (std::size_t i = 0; i < targets.size(); ++i)
      j["targets"].push_back({{"label", target_labels[i]}, {"expr", targets[i].to_string()}});
    j["notes"] = notes;
    if (deduction) j["deduction"] = deduction->render();
    j["pieces"] = nlohmann::json::array();
    for (auto& [piece, cert] : pieces) {
      nlohmann::json p;
      for (auto& g : piece.inverted) p["inverted"].push_back(g.to_string());
      for (auto& c : cert.combiners) p["combiners"].push_back(c.to_string());
      j["pieces"].push_back(p);
    }
    return j;
  }
};

struct NonvanishingOptions {
  bool prefer_deduction = false;  // use the case-split prover instead of per-piece combinations
  GroebnerOptions groebner;
};

/// The designated M coordinates have no common zero on the chart.
inline NonvanishingCertificate verify_nonvanishing(const Workspace& w, int k, NonvanishingOptions o = {}) {
  const auto& t = w.data().table(k);
  const auto& ctx = w.context(t.chart);
  const auto& c = ctx.chart();
  NonvanishingCertificate cert;
  cert.k = k;
  cert.chart = t.chart;
  for (auto& ix : t.nonvanishing) {
    cert.target_labels.push_back("M" + index_string(ix));
    cert.targets.push_back(ctx.clear_inverses(ctx.expand(t.entry(ix))));
  }
  if (k == 3) o.prefer_deduction = true;
  if (o.prefer_deduction) {
    Locus l = restricted_locus(c, cert.targets, "M");
    for (std::size_t i = 0; i < cert.targets.size(); ++i) l.labels[c.equations.size() + i] = cert.target_labels[i];
    if (auto p = prove_empty(l)) {
      cert.deduction = std::move(p);
      cert.verdict = Verdict::Certified;
    } else {
      cert.verdict = Verdict::Inconclusive;
      cert.notes.push_back("deduction search exhausted its budget");
    }
    return cert;
  }
  auto pieces = cover_pieces(c, nullptr, o.groebner, false);
  cert.verdict = Verdict::Certified;
  for (auto& piece : pieces) {
    auto r = is_unit(LocalizedPresentation{c.reg, c.equations, piece.inverted}, cert.targets, o.groebner);
    if (r.verdict == Verdict::Certified) {
      cert.pieces.emplace_back(piece, std::move(*r.certificate));
      continue;
    }
    cert.notes.push_back("piece " + piece.label() + ": " + verdict_name(r.verdict) + " " + r.note);
    if (r.verdict == Verdict::NotCertified) cert.verdict = Verdict::NotCertified;
    else if (cert.verdict == Verdict::Certified) cert.verdict = Verdict::Inconclusive;
  }
  cert.notes.push_back(std::to_string(pieces.size()) + " cover pieces");
  return cert;
}

}  // namespace resolve::pluecker
