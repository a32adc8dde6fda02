#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "resolve/chart.hpp"
#include "resolve/deduce.hpp"
#include "resolve/polymatrix.hpp"

namespace resolve {

/// Why a minor is invertible on a cover piece (restricted to the ideal).
struct MinorWitness {
  enum class Kind { Constant, UnitMonomial, Combination, Deduction, MinorsGenerate, Misses, NoRows };
  Kind kind = Kind::Constant;
  std::optional<CombinationCertificate> combination;
  std::optional<EmptinessProof> deduction;
  std::vector<Polynomial> minors;  // MinorsGenerate only

  static const char* kind_name(Kind k) {
    switch (k) {
      case Kind::Constant: return "constant";
      case Kind::UnitMonomial: return "unit-monomial";
      case Kind::Combination: return "combination";
      case Kind::Deduction: return "deduction";
      case Kind::MinorsGenerate: return "minors-generate-unit-ideal";
      case Kind::Misses: return "piece-misses-locus";
      case Kind::NoRows: return "no-rows";
    }
    return "?";
  }
};

struct PieceCertificate {
  CoverPiece piece;
  std::vector<std::string> rows;
  std::vector<std::string> cols;
  Polynomial minor;
  MinorWitness witness;
  std::vector<Polynomial> ideal;  // the locus the minor is a unit on

  nlohmann::json to_json(const std::string& chart) const {
    nlohmann::json j;
    j["chart"] = chart;
    j["piece"] = {{"inverted", nlohmann::json::array()}};
    for (auto& g : piece.inverted) j["piece"]["inverted"].push_back(g.to_string());
    j["rows"] = rows;
    j["cols"] = cols;
    j["minor"] = minor.to_string();
    nlohmann::json w;
    w["kind"] = MinorWitness::kind_name(witness.kind);
    if (witness.combination) w["generators"] = witness.combination->generators.size();
    if (witness.deduction) w["steps"] = witness.deduction->deduction.size();
    if (!witness.minors.empty()) {
      w["minors"] = nlohmann::json::array();
      for (auto& m : witness.minors) w["minors"].push_back(m.to_string());
    }
    j["witness"] = w;
    return j;
  }
};

struct JacobianCertificate {
  std::string chart;
  std::string label;
  Verdict verdict = Verdict::Certified;
  int rows = 0;
  int ambient = 0;
  std::vector<PieceCertificate> pieces;
  std::vector<std::string> obstructions;
  std::vector<std::string> notes;

  bool ok() const { return verdict == Verdict::Certified; }
  nlohmann::json to_json() const {
    nlohmann::json j;
    j["chart"] = chart;
    j["label"] = label;
    j["verdict"] = verdict_name(verdict);
    j["codimension"] = rows;
    j["ambient"] = ambient;
    j["pieces"] = nlohmann::json::array();
    for (auto& p : pieces) j["pieces"].push_back(p.to_json(chart));
    j["obstructions"] = obstructions;
    if (!notes.empty()) j["notes"] = notes;
    return j;
  }
};

namespace detail {

inline bool is_unit_monomial(const Polynomial& f, const std::vector<bool>& unit_var) {
  if (f.terms().size() != 1) return false;
  const Monomial& m = f.terms()[0].mono;
  for (std::size_t v = 0; v < unit_var.size(); ++v)
    if (m[v] && !unit_var[v]) return false;
  return true;
}

// Variables invertible on a piece: every variable of a monomial that is
// inverted, and chart-wide monomial units.
inline std::vector<bool> piece_unit_vars(const ChartPresentation& c, const CoverPiece& piece) {
  std::vector<bool> u(c.reg->size(), false);
  auto mark = [&](const Polynomial& g) {
    if (g.terms().size() != 1) return;
    for (std::size_t v = 0; v < u.size(); ++v)
      if (g.terms()[0].mono[v]) u[v] = true;
  };
  for (auto& g : piece.inverted) mark(g);
  for (auto& g : c.units()) mark(g);
  return u;
}

inline std::optional<MinorWitness> unit_witness(const ChartPresentation& c, const CoverPiece& piece,
                                                const std::vector<Polynomial>& ideal, const Polynomial& d,
                                                const std::vector<bool>& unit_var, const GroebnerOptions& opts) {
  MinorWitness w;
  if (d.is_zero()) return std::nullopt;
  if (d.is_constant()) return w;
  if (is_unit_monomial(d, unit_var)) {
    w.kind = MinorWitness::Kind::UnitMonomial;
    return w;
  }
  GroebnerOptions o = opts;
  o.max_spairs = std::min<std::size_t>(o.max_spairs, 20000);
  auto r = is_unit(LocalizedPresentation{c.reg, ideal, piece.inverted}, {d}, o);
  if (r.verdict == Verdict::Certified) {
    w.kind = MinorWitness::Kind::Combination;
    w.combination = std::move(r.certificate);
    return w;
  }
  if (r.verdict == Verdict::Inconclusive) {
    Locus l{c.reg, ideal, {}, {}, piece.inverted};
    l.equations.push_back(d);
    if (auto p = prove_empty(l)) {
      w.kind = MinorWitness::Kind::Deduction;
      w.deduction = std::move(p);
      return w;
    }
  }
  return std::nullopt;
}

}  // namespace detail

struct JacobianOptions {
  std::size_t max_minors = 60;
  std::size_t max_collected = 400;
  bool fallback = true;  // Groebner and deduction witnesses when no cheap minor exists
  GroebnerOptions groebner;
};

/// On every cover piece of `c` that meets V(ideal), finds a maximal minor
/// of the Jacobian of `rows`, in columns `cols`, invertible on
/// piece cap V(ideal).
inline JacobianCertificate jacobian_certificate(const ChartPresentation& c, const std::string& label,
                                                const std::vector<Polynomial>& rows,
                                                const std::vector<std::string>& row_labels,
                                                const std::vector<std::size_t>& cols,
                                                const std::vector<Polynomial>& ideal,
                                                const std::vector<CoverPiece>& pieces,
                                                const JacobianOptions& o = {}) {
  JacobianCertificate out;
  out.chart = c.name;
  out.label = label;
  out.rows = static_cast<int>(rows.size());
  out.ambient = static_cast<int>(c.reg->size());
  const std::size_t k = rows.size();
  std::vector<std::string> col_names;
  for (auto v : cols) col_names.push_back(c.reg->name(v));

  if (k > cols.size()) {
    out.verdict = Verdict::NotCertified;
    out.obstructions.push_back(label + ": " + std::to_string(k) + " rows but only " + std::to_string(cols.size()) +
                               " admissible columns");
    for (std::size_t i = 0; i < k; ++i) {
      bool any = false;
      for (auto v : cols) any = any || rows[i].depends_on(v);
      if (!any)
        out.obstructions.push_back(label + ": row " + row_labels[i] + " = " + rows[i].to_string() +
                                   " has no admissible column");
    }
    return out;
  }
  // Jacobian restricted to the admissible columns.
  std::vector<std::vector<Polynomial>> jac(k);
  for (std::size_t i = 0; i < k; ++i)
    for (auto v : cols) jac[i].push_back(rows[i].derivative(v));

  for (auto& piece : pieces) {
    if (k == 0) {
      PieceCertificate pc{piece, {}, {}, Polynomial::constant(c.reg, 1), {}, ideal};
      pc.witness.kind = MinorWitness::Kind::NoRows;
      out.pieces.push_back(std::move(pc));
      continue;
    }
    auto unit_var = detail::piece_unit_vars(c, piece);
    auto score = [&](const Polynomial& e) {
      if (e.is_zero()) return 0;
      if (e.is_constant()) return 3;
      if (detail::is_unit_monomial(e, unit_var)) return 2;
      return 1;
    };
    // Rows with the fewest usable columns are assigned first.
    std::vector<std::size_t> order(k);
    for (std::size_t i = 0; i < k; ++i) order[i] = i;
    std::vector<std::vector<std::size_t>> cand(k);
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < cols.size(); ++j)
        if (score(jac[i][j])) cand[i].push_back(j);
      std::stable_sort(cand[i].begin(), cand[i].end(),
                       [&](std::size_t a, std::size_t b) { return score(jac[i][a]) > score(jac[i][b]); });
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return cand[a].size() < cand[b].size(); });

    std::set<std::vector<std::size_t>> tried;
    std::vector<Polynomial> minors;
    std::vector<std::vector<std::size_t>> minor_cols;
    std::optional<PieceCertificate> found;
    std::vector<std::size_t> chosen(k);
    std::vector<bool> used(cols.size(), false);
    // The cheap pass accepts only constant or unit-monomial minors; the
    // second pass just collects nonzero minors.
    bool cheap = true;
    std::function<void(std::size_t)> dfs = [&](std::size_t depth) {
      if (found || tried.size() >= (cheap ? o.max_minors : o.max_collected)) return;
      if (depth == k) {
        std::vector<std::size_t> cs(chosen.begin(), chosen.end());
        std::sort(cs.begin(), cs.end());
        if (!tried.insert(cs).second) return;
        PolyMatrix m(c.reg, k, k);
        for (std::size_t i = 0; i < k; ++i)
          for (std::size_t j = 0; j < k; ++j) m(i, j) = jac[i][cs[j]];
        Polynomial d = m.det();
        if (d.is_zero()) return;
        if (!cheap) {
          minors.push_back(d);
          minor_cols.push_back(cs);
          return;
        }
        if (d.is_constant() || detail::is_unit_monomial(d, unit_var)) {
          PieceCertificate pc{piece, row_labels, {}, d, {}, ideal};
          if (!d.is_constant()) pc.witness.kind = MinorWitness::Kind::UnitMonomial;
          for (auto j : cs) pc.cols.push_back(col_names[j]);
          found = std::move(pc);
        }
        return;
      }
      std::size_t r = order[depth];
      for (auto j : cand[r]) {
        if (used[j]) continue;
        if (cheap && score(jac[r][j]) < 2) continue;
        used[j] = true;
        chosen[r] = j;
        dfs(depth + 1);
        used[j] = false;
        if (found) return;
      }
    };
    dfs(0);
    if (found) {
      out.pieces.push_back(std::move(*found));
      continue;
    }
    if (!o.fallback) {
      out.verdict = Verdict::NotCertified;
      out.obstructions.push_back(label + " on piece " + piece.label() + ": no constant or unit-monomial minor");
      continue;
    }
    auto meets = is_unit(LocalizedPresentation{c.reg, ideal, piece.inverted}, {}, o.groebner);
    if (meets.verdict == Verdict::Certified) {
      PieceCertificate pc{piece, row_labels, {}, Polynomial::constant(c.reg, 1), {}, ideal};
      pc.witness.kind = MinorWitness::Kind::Misses;
      pc.witness.combination = std::move(meets.certificate);
      out.pieces.push_back(std::move(pc));
      continue;
    }
    // Out of budget: the piece stays open rather than failing.
    bool budget = meets.verdict == Verdict::Inconclusive;
    cheap = false;
    tried.clear();
    dfs(0);
    if (!minors.empty()) {
      auto r = is_unit(LocalizedPresentation{c.reg, ideal, piece.inverted}, minors, o.groebner);
      budget = budget || r.verdict == Verdict::Inconclusive;
      if (r.verdict == Verdict::Certified) {
        PieceCertificate pc{piece, row_labels, {}, minors[0], {}, ideal};
        pc.witness.kind = MinorWitness::Kind::MinorsGenerate;
        pc.witness.combination = std::move(r.certificate);
        pc.witness.minors = minors;
        found = std::move(pc);
      }
    }
    // Last resort: a single minor shown invertible by deduction.
    for (std::size_t i = 0; !found && !budget && i < minors.size() && i < o.max_minors; ++i)
      if (auto w = detail::unit_witness(c, piece, ideal, minors[i], unit_var, o.groebner)) {
        PieceCertificate pc{piece, row_labels, {}, minors[i], std::move(*w), ideal};
        for (auto j : minor_cols[i]) pc.cols.push_back(col_names[j]);
        found = std::move(pc);
      }
    if (found) {
      out.pieces.push_back(std::move(*found));
    } else if (budget) {
      if (out.verdict == Verdict::Certified) out.verdict = Verdict::Inconclusive;
      out.notes.push_back(label + " on piece " + piece.label() + ": Groebner budget exhausted");
    } else {
      out.verdict = Verdict::NotCertified;
      out.obstructions.push_back(label + " on piece " + piece.label() + ": no invertible maximal minor among " +
                                 std::to_string(minors.size()) + " nonzero candidates");
    }
  }
  return out;
}

inline std::vector<std::size_t> all_columns(const ChartPresentation& c) {
  std::vector<std::size_t> cols(c.reg->size());
  for (std::size_t v = 0; v < cols.size(); ++v) cols[v] = v;
  return cols;
}

/// The center V(eqs, center) is smooth of codimension #eqs + #center in the
/// ambient space on every cover piece.
inline JacobianCertificate smooth_center(const ChartPresentation& c, const std::vector<Polynomial>& center,
                                         const std::string& label = "center", const JacobianOptions& o = {}) {
  if (center.empty() || center[0] != c.var(c.p_variable()))
    throw std::invalid_argument("center must start with the P variable " + c.p_variable() + " of " + c.name);
  std::vector<Polynomial> rows = c.equations;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < c.equations.size(); ++i)
    labels.push_back(i < c.equation_labels.size() && !c.equation_labels[i].empty() ? c.equation_labels[i]
                                                                                    : "E" + std::to_string(i + 1));
  for (std::size_t i = 0; i < center.size(); ++i) {
    rows.push_back(center[i]);
    labels.push_back("h" + std::to_string(i + 1));
  }
  auto pieces = cover_pieces(c, nullptr, o.groebner, false);
  return jacobian_certificate(c, label, rows, labels, all_columns(c), rows, pieces, o);
}

/// For every set S of scaling variables, the center meets the stratum
/// {lambda = 0 for lambda in S} smoothly in the expected codimension, or
/// not at all.
inline std::vector<JacobianCertificate> nc_intersection(const ChartPresentation& c, const std::vector<Polynomial>& center,
                                                        const std::string& label = "center",
                                                        const JacobianOptions& o = {}) {
  auto scal = c.scaling();
  std::vector<Polynomial> rows = c.equations;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < c.equations.size(); ++i)
    labels.push_back(i < c.equation_labels.size() && !c.equation_labels[i].empty() ? c.equation_labels[i]
                                                                                    : "E" + std::to_string(i + 1));
  for (std::size_t i = 0; i < center.size(); ++i) {
    rows.push_back(center[i]);
    labels.push_back("h" + std::to_string(i + 1));
  }
  auto pieces = cover_pieces(c, nullptr, o.groebner, false);
  std::vector<JacobianCertificate> out;
  for (std::size_t mask = 0; mask < (std::size_t{1} << scal.size()); ++mask) {
    std::vector<std::size_t> cols;
    std::vector<Polynomial> ideal = rows;
    std::set<std::size_t> zero;
    std::string tag = label + " with {";
    for (std::size_t i = 0; i < scal.size(); ++i)
      if (mask >> i & 1) {
        zero.insert(c.reg->index(scal[i]));
        ideal.push_back(c.var(scal[i]));
        tag += (tag.back() == '{' ? "" : ",") + scal[i];
      }
    tag += "} = 0";
    for (std::size_t v = 0; v < c.reg->size(); ++v)
      if (!zero.count(v)) cols.push_back(v);
    // Pieces inverting a variable of S miss the stratum outright.
    std::vector<CoverPiece> live;
    for (auto& p : pieces) {
      bool dead = false;
      for (auto& g : p.inverted)
        if (g.terms().size() == 1)
          for (auto v : zero) dead = dead || g.terms()[0].mono[v] > 0;
      if (!dead) live.push_back(p);
    }
    out.push_back(jacobian_certificate(c, tag, rows, labels, cols, ideal, live, o));
  }
  return out;
}

/// Etale-local form Z[t]/(lambda_1 ... P - p): the equations admit an
/// invertible maximal minor away from the monomial columns on every piece,
/// and the monomial variables are distinct.
inline JacobianCertificate semistable(const ChartPresentation& c, const JacobianOptions& o = {}) {
  std::set<std::string> mono(c.monomial.begin(), c.monomial.end());
  if (mono.size() != c.monomial.size()) {
    JacobianCertificate r;
    r.chart = c.name;
    r.label = "semistable";
    r.verdict = Verdict::NotCertified;
    r.obstructions.push_back("monomial variable repeated: the special fibre is not reduced");
    return r;
  }
  std::vector<std::size_t> cols;
  for (std::size_t v = 0; v < c.reg->size(); ++v)
    if (!mono.count(c.reg->name(v))) cols.push_back(v);
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < c.equations.size(); ++i)
    labels.push_back(i < c.equation_labels.size() && !c.equation_labels[i].empty() ? c.equation_labels[i]
                                                                                    : "E" + std::to_string(i + 1));
  auto pieces = cover_pieces(c, nullptr, o.groebner, false);
  auto r = jacobian_certificate(c, "semistable", c.equations, labels, cols, c.equations, pieces, o);
  return r;
}

/// Re-checks a certificate: each witness is re-verified by expansion or
/// replay, and its claimed facts are compared with the stated ideal.
inline bool verify_piece(const ChartPresentation& c, const PieceCertificate& p) {
  using K = MinorWitness::Kind;
  const auto& w = p.witness;
  switch (w.kind) {
    case K::NoRows: return true;
    case K::Constant: return p.minor.is_constant() && !p.minor.is_zero();
    case K::UnitMonomial: return detail::is_unit_monomial(p.minor, detail::piece_unit_vars(c, p.piece));
    case K::Deduction: {
      if (!w.deduction || !w.deduction->verify()) return false;
      auto eqs = w.deduction->locus.equations;
      return std::find(eqs.begin(), eqs.end(), p.minor) != eqs.end();
    }
    case K::Combination:
    case K::Misses:
    case K::MinorsGenerate: {
      if (!w.combination || !w.combination->verify()) return false;
      const auto& gens = w.combination->generators;
      const Registry& ext = w.combination->reg;
      std::size_t at = 0;
      for (auto& g : p.ideal)
        if (at >= gens.size() || gens[at++] != g.embed(ext)) return false;
      std::vector<Polynomial> targets;
      if (w.kind == K::Combination) targets = {p.minor};
      if (w.kind == K::MinorsGenerate) targets = w.minors;
      for (auto& t : targets)
        if (at >= gens.size() || gens[at++] != t.embed(ext)) return false;
      // Inverse relations u_k * g_k - 1 for the piece's inverted elements.
      for (std::size_t k = 0; k < p.piece.inverted.size(); ++k, ++at) {
        if (at >= gens.size()) return false;
        Polynomial expect = Polynomial::variable(ext, c.reg->size() + k) * p.piece.inverted[k].embed(ext) -
                            Polynomial::constant(ext, 1);
        if (gens[at] != expect) return false;
      }
      return at == gens.size();
    }
  }
  return false;
}

inline bool verify(const ChartPresentation& c, const JacobianCertificate& cert) {
  if (!cert.ok()) return false;
  for (auto& p : cert.pieces)
    if (!verify_piece(c, p)) return false;
  return true;
}

/// Nonzero Jacobian entries of each generator, for display.
inline std::vector<std::pair<std::string, std::vector<std::pair<std::string, Polynomial>>>> jacobian_rows(
    const ChartPresentation& c, const std::vector<Polynomial>& gens) {
  std::vector<std::pair<std::string, std::vector<std::pair<std::string, Polynomial>>>> out;
  for (auto& g : gens) {
    std::vector<std::pair<std::string, Polynomial>> row;
    for (std::size_t v = 0; v < c.reg->size(); ++v) {
      Polynomial d = g.derivative(v);
      if (!d.is_zero()) row.push_back({c.reg->name(v), d});
    }
    out.push_back({g.to_string(), row});
  }
  return out;
}

}  // namespace resolve
