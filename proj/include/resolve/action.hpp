#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "resolve/chart.hpp"
#include "resolve/polymatrix.hpp"
#include "resolve/schubert.hpp"

namespace resolve {

using Substitution = std::map<std::string, Polynomial>;

/// Element of Sp_2g over Z[p], over the big-cell registry.
struct SymplecticElement {
  std::string name;
  int g = 3;
  PolyMatrix matrix;

  bool preserves_form() const {
    auto f = schubert::frame(g, matrix.registry());
    return matrix.transpose() * f.J * matrix == f.J;
  }
  SymplecticElement operator*(const SymplecticElement& o) const {
    return {name + "*" + o.name, g, matrix * o.matrix};
  }
};

inline SymplecticElement identity_element(int g = 3) {
  auto reg = schubert::big_cell_registry(g);
  return {"id", g, PolyMatrix::identity(reg, 2 * static_cast<std::size_t>(g))};
}

inline std::vector<SymplecticElement> load_elements(const std::filesystem::path& file = data_dir() / "elements.json") {
  auto j = read_json_file(file);
  std::vector<SymplecticElement> out;
  try {
    for (auto& e : j.at("elements")) {
      int g = e.at("g").get<int>();
      auto reg = schubert::big_cell_registry(g);
      const std::size_t n = 2 * static_cast<std::size_t>(g);
      PolyMatrix m(reg, n, n);
      auto rows = e.at("matrix");
      if (rows.size() != n) throw DataError("element " + e.at("name").get<std::string>() + " has wrong size");
      for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != n) throw DataError("element " + e.at("name").get<std::string>() + " has wrong size");
        for (std::size_t k = 0; k < n; ++k) m(i, k) = parse_polynomial(rows[i][k].get<std::string>(), reg);
      }
      SymplecticElement el{e.at("name").get<std::string>(), g, m};
      if (!el.preserves_form()) throw DataError("element " + el.name + " does not preserve the symplectic form");
      out.push_back(std::move(el));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(file.string() + ": " + e.what());
  }
  return out;
}

inline const SymplecticElement& find_element(const std::vector<SymplecticElement>& els, const std::string& name) {
  for (auto& e : els)
    if (e.name == name) return e;
  throw DataError("unknown group element '" + name + "'");
}

/// Thrown when an element does not act by polynomials on a chart.
struct ActionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline PolyMatrix adjugate(const PolyMatrix& b) {
  const std::size_t n = b.rows();
  PolyMatrix adj(b.registry(), n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<std::size_t> rows, cols;
      for (std::size_t k = 0; k < n; ++k) {
        if (k != j) rows.push_back(k);
        if (k != i) cols.push_back(k);
      }
      Polynomial m = n == 1 ? Polynomial::constant(b.registry(), 1) : b.minor(rows, cols);
      adj(i, j) = (i + j) % 2 ? -m : m;
    }
  return adj;
}

}  // namespace detail

/// Action on the big cell: e [A; K] = [A''; B], A -> A'' B^{-1} K.
/// Requires det B to be a nonzero constant.
inline Substitution act_big_cell(const SymplecticElement& e) {
  const Registry& reg = e.matrix.registry();
  const std::size_t g = static_cast<std::size_t>(e.g);
  auto f = schubert::frame(e.g, reg);
  PolyMatrix AK = schubert::symmetric_matrix(e.g, reg).stack(f.K);
  PolyMatrix img = e.matrix * AK;
  std::vector<std::size_t> top, bottom, all;
  for (std::size_t i = 0; i < g; ++i) {
    top.push_back(i);
    bottom.push_back(g + i);
    all.push_back(i);
  }
  PolyMatrix A2 = img.submatrix(top, all), B = img.submatrix(bottom, all);
  Polynomial d = B.det();
  if (!d.is_constant() || d.is_zero())
    throw ActionError(e.name + ": bottom block has determinant " + d.to_string() + ", not a nonzero constant");
  Rational inv = Rational(1) / d.constant_value();
  PolyMatrix res = A2 * detail::adjugate(B) * f.K;
  Substitution out;
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t j = i; j < g; ++j) {
      if (res(i, j) != res(j, i)) throw ActionError(e.name + ": image is not symmetric");
      out.emplace("a" + std::to_string(i + 1) + std::to_string(j + 1), res(i, j) * inv);
    }
  out.emplace("p", Polynomial::variable(reg, "p"));
  return out;
}

/// outer after inner: x -> outer[x] with inner substituted.
inline Substitution compose(const Substitution& outer, const Substitution& inner, const Registry& target) {
  Substitution out;
  for (auto& [x, f] : outer) out.emplace(x, f.substitute(inner, target));
  return out;
}

/// Induced substitution on the coordinates of a tower chart. Coordinates
/// x with total substitution m * x (m a monomial) map to the image of the
/// corresponding big-cell coordinate divided by m; scaling variables are
/// fixed. Other coordinates are not covered and raise ActionError.
inline Substitution act(const Tower& t, const SymplecticElement& e, const std::string& chart) {
  Substitution big = act_big_cell(e);
  const ChartPresentation& c = t.at(chart);
  if (c.parent.empty()) {
    Substitution out;
    for (auto& [x, f] : big) out.emplace(x, f.embed(c.reg));
    return out;
  }
  Substitution total = t.total_substitution(chart);
  Substitution pulled;
  for (auto& [x, f] : big) pulled.emplace(x, f.substitute(total, c.reg));
  Substitution out;
  auto scal = c.scaling();
  for (std::size_t v = 0; v < c.reg->size(); ++v) {
    const std::string& x = c.reg->name(v);
    if (std::find(scal.begin(), scal.end(), x) != scal.end()) {
      out.emplace(x, c.var(x));
      continue;
    }
    std::optional<std::string> source;
    Monomial m;
    for (auto& [y, f] : total) {
      if (f.terms().size() != 1 || !f.depends_on(v)) continue;
      Monomial mono = f.terms()[0].mono;
      if (mono[v] != 1 || f.terms()[0].coef != 1) continue;
      Monomial rest = mono;
      rest.set(v, 0);
      bool scaling_only = true;
      for (std::size_t k = 0; k < c.reg->size(); ++k)
        if (rest[k] && std::find(scal.begin(), scal.end(), c.reg->name(k)) == scal.end()) scaling_only = false;
      if (scaling_only) {
        source = y;
        m = rest;
        break;
      }
    }
    if (!source) throw ActionError(e.name + " on " + chart + ": coordinate " + x + " is not a rescaled big-cell coordinate");
    Polynomial img = pulled.at(*source);
    for (auto& term : img.terms())
      if (!m.divides(term.mono))
        throw ActionError(e.name + " on " + chart + ": image of " + x + " is not divisible by " +
                          Polynomial::monomial(c.reg, m, Rational(1)).to_string());
    out.emplace(x, img.divide_monomial(m));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Covering by translates

struct TranslatedOpen {
  std::string element;
  Polynomial function;  // the open is where this does not vanish
};

struct CoveringResult {
  Verdict verdict = Verdict::NotCertified;
  std::vector<TranslatedOpen> opens;
  std::vector<std::pair<CoverPiece, CombinationCertificate>> certificates;
  std::optional<std::map<std::string, Rational>> refutation;
  std::vector<std::string> notes;

  bool verify() const {
    for (auto& [piece, cert] : certificates)
      if (!cert.verify()) return false;
    return verdict == Verdict::Certified;
  }
};

/// Search for a point with coordinates in {0, 1, -1} on the chart, outside
/// every exclusion, where all `fs` vanish. Points of smallest support come
/// first; among those, points with the most vanishing scaling variables
/// (deepest in the special fibre) win.
inline std::optional<std::map<std::string, Rational>> search_point(const ChartPresentation& c,
                                                                   const std::vector<Polynomial>& fs,
                                                                   std::size_t max_points = 2'000'000) {
  const std::size_t n = c.reg->size();
  auto scal = c.scaling();
  std::size_t visited = 0;
  std::vector<Rational> pt(n, 0);
  auto vanish = [&](const Polynomial& f) { return f.evaluate(pt) == 0; };
  auto admissible = [&]() {
    if (!std::all_of(c.equations.begin(), c.equations.end(), vanish) || !std::all_of(fs.begin(), fs.end(), vanish))
      return false;
    for (auto& ex : c.excluded)
      if (std::all_of(ex.begin(), ex.end(), vanish)) return false;
    return true;
  };
  for (std::size_t k = 0; k <= n && visited < max_points; ++k) {
    std::optional<std::vector<Rational>> best;
    int best_depth = -1;
    for (auto& support : combinations(n, k)) {
      for (std::size_t signs = 0; signs < (std::size_t{1} << k) && visited < max_points; ++signs, ++visited) {
        std::fill(pt.begin(), pt.end(), Rational(0));
        for (std::size_t i = 0; i < k; ++i) pt[support[i]] = (signs >> i) & 1 ? -1 : 1;
        if (!admissible()) continue;
        int depth = 0;
        for (auto& x : scal) depth += pt[c.reg->index(x)] == 0;
        if (depth > best_depth) {
          best_depth = depth;
          best = pt;
        }
      }
    }
    if (best) {
      std::map<std::string, Rational> out;
      for (std::size_t i = 0; i < n; ++i) out.emplace(c.reg->name(i), (*best)[i]);
      return out;
    }
  }
  return std::nullopt;
}

/// Shows that the translates of {base != 0} by the elements cover the
/// chart: on every cover piece the translated functions generate 1.
inline CoveringResult covering_check(const Tower& t, const std::string& chart, const Polynomial& base,
                                     const std::vector<SymplecticElement>& elements, const GroebnerOptions& opts = {}) {
  const ChartPresentation& c = t.at(chart);
  CoveringResult r;
  r.opens.push_back({"id", base});
  for (auto& e : elements) {
    auto sub = act(t, e, chart);
    r.opens.push_back({e.name, base.substitute(sub, c.reg)});
  }
  std::vector<Polynomial> fs;
  for (auto& o : r.opens) fs.push_back(o.function);
  auto pieces = cover_pieces(c, &r.notes, opts);
  r.verdict = Verdict::Certified;
  for (auto& piece : pieces) {
    auto u = is_unit(LocalizedPresentation{c.reg, c.equations, piece.inverted}, fs, opts);
    if (u.verdict == Verdict::Certified) {
      r.certificates.push_back({piece, *u.certificate});
      continue;
    }
    r.notes.push_back("piece " + piece.label() + ": " + verdict_name(u.verdict) + " " + u.note);
    if (u.verdict == Verdict::Inconclusive && r.verdict == Verdict::Certified) r.verdict = Verdict::Inconclusive;
    if (u.verdict == Verdict::NotCertified) r.verdict = Verdict::NotCertified;
  }
  if (r.verdict == Verdict::NotCertified) r.refutation = search_point(c, fs);
  return r;
}

}  // namespace resolve
