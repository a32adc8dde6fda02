#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "resolve/ideal.hpp"

namespace resolve {

/// A locally closed set: common zeros of `equations`, away from the common
/// zeros of each exclusion, where every element of `units` is nonzero.
struct Locus {
  Registry reg;
  std::vector<Polynomial> equations;
  std::vector<std::string> labels;
  std::vector<std::vector<Polynomial>> exclusions;
  std::vector<Polynomial> units;

  std::string label(std::size_t i) const {
    return i < labels.size() && !labels[i].empty() ? labels[i] : "eq" + std::to_string(i);
  }
};

/// Where a fact comes from. `Assumed` polynomials are zero by a case split,
/// `UnitPoly` indexes non-monomial units in the current state.
struct Source {
  enum class Origin { Equation, Assumed, UnitPoly, Exclusion };
  Origin origin = Origin::Equation;
  std::size_t index = 0;
  std::size_t sub = 0;

  bool operator==(const Source&) const = default;
};

/// One inference of a case-split proof that a Locus is empty. Each step is
/// re-checked by substitution and monomial factoring only.
struct DeductionStep {
  enum class Kind { Zero, Unit, Contradiction, SplitExclusion, SplitProduct, SplitVariable, Algebraic };
  Kind kind = Kind::Contradiction;
  Source source;
  std::size_t var = 0;
  unsigned exponent = 1;
  std::vector<std::vector<DeductionStep>> branches;
  // Algebraic closes a branch: 1 is a combination of the facts known there.
  std::shared_ptr<const CombinationCertificate> algebra;
};

using Deduction = std::vector<DeductionStep>;

inline DeductionStep make_step(DeductionStep::Kind k, Source s = {}, std::size_t var = 0, unsigned exponent = 1) {
  DeductionStep st;
  st.kind = k;
  st.source = s;
  st.var = var;
  st.exponent = exponent;
  return st;
}

namespace detail {

// p = content * g with g free of monomial factors.
struct Factored {
  Polynomial reduced;
  Monomial content;
  Polynomial rest;
};

}  // namespace detail

/// Knowledge at one node of a deduction: vanishing variables, nonvanishing
/// variables, assumed-zero polynomials and nonvanishing polynomials.
class DeductionState {
 public:
  explicit DeductionState(const Locus& l) : L(&l), zero_(l.reg->size(), false), unit_(l.reg->size(), false) {
    for (auto& u : l.units) assume_unit(u);
  }

  const Locus& locus() const { return *L; }
  bool is_zero_var(std::size_t v) const { return zero_[v]; }
  bool is_unit_var(std::size_t v) const { return unit_[v]; }

  Polynomial reduce(const Polynomial& p) const {
    Polynomial r = p;
    for (std::size_t v : p.support())
      if (zero_[v]) r = r.at_zero(v);
    return r;
  }

  const Polynomial& source_poly(const Source& s) const {
    switch (s.origin) {
      case Source::Origin::Equation: return L->equations.at(s.index);
      case Source::Origin::Assumed: return assumed_.at(s.index);
      case Source::Origin::UnitPoly: return unit_polys_.at(s.index);
      case Source::Origin::Exclusion: return L->exclusions.at(s.index).at(s.sub);
    }
    throw std::logic_error("bad source");
  }

  detail::Factored factor(const Polynomial& p) const {
    Polynomial r = reduce(p);
    Monomial c = r.monomial_content();
    Polynomial rest = r.is_zero() ? r : r.divide_monomial(c);
    return {r, c, rest};
  }

  // Non-unit variables of a monomial, in registry order.
  std::vector<std::size_t> nonunit_vars(const Monomial& m) const {
    std::vector<std::size_t> out;
    for (std::size_t v = 0; v < m.nvars(); ++v)
      if (m[v] && !unit_[v]) out.push_back(v);
    return out;
  }

  // True when g (free of monomial factors) is a nonzero constant or a
  // scalar multiple of the reduced rest of a known unit polynomial.
  bool rest_is_unit(const Polynomial& g) const {
    if (g.is_zero()) return false;
    if (g.is_constant()) return true;
    Polynomial pg = g.primitive();
    for (auto& u : unit_polys_) {
      auto f = factor(u);
      if (!f.rest.is_zero() && f.rest.primitive() == pg && nonunit_vars(f.content).empty()) return true;
    }
    return false;
  }

  bool is_unit(const Polynomial& p) const {
    auto f = factor(p);
    return !f.reduced.is_zero() && nonunit_vars(f.content).empty() && rest_is_unit(f.rest);
  }

  void assume_zero_var(std::size_t v) { zero_[v] = true; }
  void assume_unit_var(std::size_t v) { unit_[v] = true; }
  void assume_zero(const Polynomial& p) {
    if (p.is_monomial() && p.leading_term().mono.degree() == 1) {
      zero_[p.support()[0]] = true;
      return;
    }
    assumed_.push_back(p);
  }
  void assume_unit(const Polynomial& p) {
    auto f = factor(p);
    for (std::size_t v = 0; v < f.content.nvars(); ++v)
      if (f.content[v]) unit_[v] = true;
    if (!f.rest.is_zero() && !f.rest.is_constant()) unit_polys_.push_back(f.rest);
    if (f.reduced.is_zero()) unit_polys_.push_back(f.reduced);  // marks a contradiction
  }

  std::size_t assumed_count() const { return assumed_.size(); }
  std::size_t unit_poly_count() const { return unit_polys_.size(); }

  // Nonzero reduced generators of exclusion j, or nullopt if one of them is
  // already known to be a unit.
  std::optional<std::vector<std::size_t>> open_generators(std::size_t j) const {
    std::vector<std::size_t> out;
    const auto& ex = L->exclusions[j];
    for (std::size_t i = 0; i < ex.size(); ++i) {
      if (is_unit(ex[i])) return std::nullopt;
      if (!reduce(ex[i]).is_zero()) out.push_back(i);
    }
    return out;
  }

  // Polynomial facts of this node over a registry with one inverse
  // variable per known unit: equations, assumed zeros, vanishing variables
  // and u*f - 1 for every nonvanishing variable or polynomial.
  CombinationCertificate facts() const {
    std::vector<Polynomial> inv;
    std::vector<std::string> inv_labels;
    for (std::size_t v = 0; v < unit_.size(); ++v)
      if (unit_[v]) {
        inv.push_back(Polynomial::variable(L->reg, v));
        inv_labels.push_back(L->reg->name(v));
      }
    for (auto& u : unit_polys_) {
      inv.push_back(u);
      inv_labels.push_back(u.to_string());
    }
    std::vector<std::string> extra;
    std::vector<std::string> taken = L->reg->names();
    for (std::size_t k = 0; k < inv.size(); ++k) {
      std::string name = fresh_name(VarRegistry(taken), "_inv" + std::to_string(k));
      taken.push_back(name);
      extra.push_back(name);
    }
    CombinationCertificate c;
    c.reg = extend_registry(L->reg, extra);
    for (std::size_t i = 0; i < L->equations.size(); ++i) {
      c.generators.push_back(L->equations[i].embed(c.reg));
      c.labels.push_back(L->label(i));
    }
    for (auto& a : assumed_) {
      c.generators.push_back(a.embed(c.reg));
      c.labels.push_back("case assumption");
    }
    for (std::size_t v = 0; v < zero_.size(); ++v)
      if (zero_[v]) {
        c.generators.push_back(Polynomial::variable(c.reg, v));
        c.labels.push_back(L->reg->name(v) + " = 0");
      }
    for (std::size_t k = 0; k < inv.size(); ++k) {
      c.generators.push_back(Polynomial::variable(c.reg, extra[k]) * inv[k].embed(c.reg) - Polynomial::constant(c.reg, 1));
      c.labels.push_back(inv_labels[k] + " invertible");
    }
    return c;
  }

  // Checks a step against the current state and applies it. Splits are
  // checked by the caller, which owns the branch states.
  bool apply(const DeductionStep& st) {
    using K = DeductionStep::Kind;
    switch (st.kind) {
      case K::Zero: {
        if (!valid_source(st.source)) return false;
        auto f = factor(source_poly(st.source));
        if (f.reduced.is_zero() || !rest_is_unit(f.rest)) return false;
        auto nu = nonunit_vars(f.content);
        if (nu.size() != 1 || nu[0] != st.var || f.content[st.var] != st.exponent) return false;
        zero_[st.var] = true;
        return true;
      }
      case K::Unit: {
        if (!valid_source(st.source)) return false;
        if (st.source.origin == Source::Origin::Exclusion) {
          auto open = open_generators(st.source.index);
          if (!open || open->size() != 1 || (*open)[0] != st.source.sub) return false;
          assume_unit(source_poly(st.source));
          return true;
        }
        if (st.source.origin == Source::Origin::UnitPoly) {
          auto f = factor(source_poly(st.source));
          if (f.reduced.is_zero() || nonunit_vars(f.content).empty()) return false;
          for (std::size_t v : nonunit_vars(f.content)) unit_[v] = true;
          return true;
        }
        // Binomial m1 + c*m2 = 0 with m2 a unit: every variable of m1 is a unit.
        Polynomial r = reduce(source_poly(st.source));
        if (r.size() != 2) return false;
        for (int k = 0; k < 2; ++k) {
          const Monomial& a = r.terms()[k].mono;
          const Monomial& b = r.terms()[1 - k].mono;
          if (nonunit_vars(b).empty() && !nonunit_vars(a).empty()) {
            for (std::size_t v : nonunit_vars(a)) unit_[v] = true;
            return true;
          }
        }
        return false;
      }
      case K::Algebraic: {
        if (!st.algebra) return false;
        CombinationCertificate expect = facts();
        const auto& got = *st.algebra;
        if (!same_registry(expect.reg, got.reg) || got.generators.size() != expect.generators.size()) return false;
        for (std::size_t i = 0; i < got.generators.size(); ++i)
          if (got.generators[i] != expect.generators[i]) return false;
        return got.verify();
      }
      case K::Contradiction: {
        if (!valid_source(st.source)) return false;
        if (st.source.origin == Source::Origin::Exclusion) {
          auto open = open_generators(st.source.index);
          return open && open->empty();
        }
        auto f = factor(source_poly(st.source));
        if (st.source.origin == Source::Origin::UnitPoly) return f.reduced.is_zero();
        return !f.reduced.is_zero() && nonunit_vars(f.content).empty() && rest_is_unit(f.rest);
      }
      default: return false;
    }
  }

  // Child states of a split, or empty if the split is not applicable.
  std::vector<DeductionState> split(const DeductionStep& st) const {
    using K = DeductionStep::Kind;
    std::vector<DeductionState> out;
    if (st.kind == K::SplitVariable) {
      if (zero_[st.var] || unit_[st.var]) return out;
      DeductionState a = *this, b = *this;
      a.zero_[st.var] = true;
      b.unit_[st.var] = true;
      out.push_back(std::move(a));
      out.push_back(std::move(b));
      return out;
    }
    if (!valid_source(st.source)) return out;
    if (st.kind == K::SplitExclusion) {
      if (st.source.origin != Source::Origin::Exclusion) return out;
      auto open = open_generators(st.source.index);
      if (!open || open->size() < 2) return out;
      const auto& ex = L->exclusions[st.source.index];
      for (std::size_t k = 0; k < open->size(); ++k) {
        DeductionState s = *this;
        for (std::size_t l = 0; l < k; ++l) s.assume_zero(s.reduce(ex[(*open)[l]]));
        s.assume_unit(ex[(*open)[k]]);
        out.push_back(std::move(s));
      }
      return out;
    }
    if (st.kind == K::SplitProduct) {
      if (st.source.origin == Source::Origin::UnitPoly || st.source.origin == Source::Origin::Exclusion) return out;
      auto f = factor(source_poly(st.source));
      if (f.reduced.is_zero() || !rest_is_unit(f.rest)) return out;
      auto nu = nonunit_vars(f.content);
      if (nu.size() < 2) return out;
      for (std::size_t k = 0; k < nu.size(); ++k) {
        DeductionState s = *this;
        for (std::size_t l = 0; l < k; ++l) s.unit_[nu[l]] = true;
        s.zero_[nu[k]] = true;
        out.push_back(std::move(s));
      }
    }
    return out;
  }

 private:
  bool valid_source(const Source& s) const {
    switch (s.origin) {
      case Source::Origin::Equation: return s.index < L->equations.size();
      case Source::Origin::Assumed: return s.index < assumed_.size();
      case Source::Origin::UnitPoly: return s.index < unit_polys_.size();
      case Source::Origin::Exclusion:
        return s.index < L->exclusions.size() && s.sub < L->exclusions[s.index].size();
    }
    return false;
  }

  const Locus* L;
  std::vector<bool> zero_, unit_;
  std::vector<Polynomial> assumed_;
  std::vector<Polynomial> unit_polys_;
};

/// Re-check a deduction from the initial state of `l`.
inline bool verify_deduction(const Locus& l, const Deduction& d) {
  std::function<bool(DeductionState, const Deduction&)> run = [&](DeductionState s, const Deduction& steps) {
    using K = DeductionStep::Kind;
    for (std::size_t i = 0; i < steps.size(); ++i) {
      const auto& st = steps[i];
      bool last = i + 1 == steps.size();
      if (st.kind == K::SplitExclusion || st.kind == K::SplitProduct || st.kind == K::SplitVariable) {
        if (!last) return false;
        auto kids = s.split(st);
        if (kids.empty() || kids.size() != st.branches.size()) return false;
        for (std::size_t k = 0; k < kids.size(); ++k)
          if (!run(kids[k], st.branches[k])) return false;
        return true;
      }
      if (!s.apply(st)) return false;
      if (st.kind == K::Contradiction || st.kind == K::Algebraic) return last;
    }
    return false;
  };
  return run(DeductionState(l), d);
}

struct DeductionOptions {
  int max_depth = 12;
  std::size_t max_nodes = 20000;
  bool allow_variable_splits = false;
  // Close stalled nodes with a Groebner computation on the node's facts.
  bool algebraic_leaves = false;
  std::size_t leaf_spairs = 20000;
};

/// Search for a proof that the locus is empty: propagate vanishing and
/// nonvanishing facts, and split into cases on exclusions or on products
/// that must vanish when propagation stalls.
class DeductionProver {
 public:
  explicit DeductionProver(DeductionOptions o = {}) : opts_(o) {}

  std::optional<Deduction> prove(const Locus& l) {
    nodes_ = 0;
    return search(DeductionState(l), opts_.max_depth);
  }

 private:
  using K = DeductionStep::Kind;
  using O = Source::Origin;

  std::vector<Source> zero_sources(const DeductionState& s) const {
    std::vector<Source> out;
    for (std::size_t i = 0; i < s.locus().equations.size(); ++i) out.push_back({O::Equation, i, 0});
    for (std::size_t i = 0; i < s.assumed_count(); ++i) out.push_back({O::Assumed, i, 0});
    return out;
  }

  std::optional<DeductionStep> contradiction(const DeductionState& s) const {
    for (auto& src : zero_sources(s)) {
      DeductionStep st = make_step(K::Contradiction, src);
      if (DeductionState(s).apply(st)) return st;
    }
    for (std::size_t i = 0; i < s.unit_poly_count(); ++i) {
      DeductionStep st = make_step(K::Contradiction, Source{O::UnitPoly, i, 0});
      if (DeductionState(s).apply(st)) return st;
    }
    for (std::size_t j = 0; j < s.locus().exclusions.size(); ++j) {
      auto open = s.open_generators(j);
      if (open && open->empty()) return make_step(K::Contradiction, Source{O::Exclusion, j, 0});
    }
    return std::nullopt;
  }

  std::optional<DeductionStep> progress(const DeductionState& s) const {
    for (auto& src : zero_sources(s)) {
      auto f = s.factor(s.source_poly(src));
      if (f.reduced.is_zero() || !s.rest_is_unit(f.rest)) continue;
      auto nu = s.nonunit_vars(f.content);
      if (nu.size() == 1) return make_step(K::Zero, src, nu[0], f.content[nu[0]]);
    }
    for (std::size_t j = 0; j < s.locus().exclusions.size(); ++j) {
      auto open = s.open_generators(j);
      if (open && open->size() == 1) return make_step(K::Unit, Source{O::Exclusion, j, (*open)[0]});
    }
    for (std::size_t i = 0; i < s.unit_poly_count(); ++i) {
      DeductionStep st = make_step(K::Unit, Source{O::UnitPoly, i, 0});
      if (DeductionState(s).apply(st)) return st;
    }
    for (auto& src : zero_sources(s)) {
      DeductionStep st = make_step(K::Unit, src);
      if (s.reduce(s.source_poly(src)).size() == 2 && DeductionState(s).apply(st)) return st;
    }
    return std::nullopt;
  }

  std::vector<DeductionStep> split_candidates(const DeductionState& s) const {
    std::vector<std::pair<std::size_t, DeductionStep>> c;
    for (std::size_t j = 0; j < s.locus().exclusions.size(); ++j) {
      auto open = s.open_generators(j);
      if (open && open->size() >= 2) c.push_back({open->size(), make_step(K::SplitExclusion, Source{O::Exclusion, j, 0})});
    }
    for (auto& src : zero_sources(s)) {
      auto f = s.factor(s.source_poly(src));
      if (f.reduced.is_zero() || !s.rest_is_unit(f.rest)) continue;
      auto nu = s.nonunit_vars(f.content);
      if (nu.size() >= 2) c.push_back({nu.size(), make_step(K::SplitProduct, src)});
    }
    std::stable_sort(c.begin(), c.end(), [](auto& a, auto& b) { return a.first < b.first; });
    std::vector<DeductionStep> out;
    for (auto& [n, st] : c) out.push_back(st);
    if (opts_.allow_variable_splits)
      for (std::size_t v = 0; v < s.locus().reg->size(); ++v)
        if (!s.is_zero_var(v) && !s.is_unit_var(v)) {
          DeductionStep st = make_step(K::SplitVariable);
          st.var = v;
          out.push_back(st);
        }
    return out;
  }

  std::optional<Deduction> search(DeductionState s, int depth) {
    if (++nodes_ > opts_.max_nodes) return std::nullopt;
    Deduction steps;
    while (true) {
      if (auto c = contradiction(s)) {
        steps.push_back(*c);
        return steps;
      }
      auto p = progress(s);
      if (!p) break;
      if (!s.apply(*p)) return std::nullopt;
      steps.push_back(*p);
    }
    if (opts_.algebraic_leaves) {
      if (auto leaf = algebraic(s)) {
        steps.push_back(std::move(*leaf));
        return steps;
      }
    }
    if (depth <= 0) return std::nullopt;
    auto cands = split_candidates(s);
    std::size_t tried = 0;
    for (auto& cand : cands) {
      if (++tried > 4 || nodes_ > opts_.max_nodes) break;
      auto kids = s.split(cand);
      if (kids.empty()) continue;
      DeductionStep st = cand;
      bool ok = true;
      for (auto& kid : kids) {
        auto sub = search(kid, depth - 1);
        if (!sub) {
          ok = false;
          break;
        }
        st.branches.push_back(std::move(*sub));
      }
      if (ok) {
        steps.push_back(std::move(st));
        return steps;
      }
    }
    return std::nullopt;
  }

  std::optional<DeductionStep> algebraic(const DeductionState& s) const {
    CombinationCertificate c = s.facts();
    GroebnerOptions o;
    o.track_cofactors = true;
    o.max_spairs = opts_.leaf_spairs;
    try {
      GroebnerBasis gb = groebner(c.generators, c.reg, o);
      if (!gb.is_unit()) return std::nullopt;
      Rational k = gb.basis[0].constant_value();
      for (auto& q : gb.cofactors[0]) c.combiners.push_back(q * (Rational(1) / k));
    } catch (const BudgetExceeded&) {
      return std::nullopt;
    }
    if (!c.verify()) return std::nullopt;
    DeductionStep st = make_step(K::Algebraic);
    st.algebra = std::make_shared<const CombinationCertificate>(std::move(c));
    return st;
  }

  DeductionOptions opts_;
  std::size_t nodes_ = 0;
};

/// Human-readable rendering of a deduction, one inference per line.
inline std::string render_deduction(const Locus& l, const Deduction& d, int indent = 0) {
  std::ostringstream os;
  auto name = [&](std::size_t v) { return l.reg->name(v); };
  auto src = [&](const Source& s) -> std::string {
    switch (s.origin) {
      case Source::Origin::Equation: return l.label(s.index);
      case Source::Origin::Assumed: return "case assumption #" + std::to_string(s.index);
      case Source::Origin::UnitPoly: return "nonvanishing element #" + std::to_string(s.index);
      case Source::Origin::Exclusion: {
        std::string e = "exclusion (";
        for (std::size_t i = 0; i < l.exclusions[s.index].size(); ++i)
          e += (i ? ", " : "") + l.exclusions[s.index][i].to_string();
        return e + ")";
      }
    }
    return "?";
  };
  std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  for (auto& st : d) {
    using K = DeductionStep::Kind;
    switch (st.kind) {
      case K::Zero:
        os << pad << name(st.var) << " = 0" << (st.exponent > 1 ? " (from its power " + std::to_string(st.exponent) + ")" : "")
           << "  by " << src(st.source) << "\n";
        break;
      case K::Unit:
        if (st.source.origin == Source::Origin::Exclusion)
          os << pad << l.exclusions[st.source.index][st.source.sub].to_string() << " is invertible  by "
             << src(st.source) << "\n";
        else
          os << pad << "new invertible factors  by " << src(st.source) << "\n";
        break;
      case K::Contradiction: os << pad << "contradiction  by " << src(st.source) << "\n"; break;
      case K::Algebraic:
        os << pad << "1 = combination of " << st.algebra->generators.size() << " known facts (Groebner)\n";
        break;
      case K::SplitExclusion:
      case K::SplitProduct:
      case K::SplitVariable: {
        os << pad << "cases on "
           << (st.kind == K::SplitVariable ? name(st.var) : src(st.source)) << ":\n";
        for (std::size_t k = 0; k < st.branches.size(); ++k) {
          os << pad << "  case " << k + 1 << ":\n";
          os << render_deduction(l, st.branches[k], indent + 2);
        }
        break;
      }
    }
  }
  return os.str();
}

}  // namespace resolve

namespace resolve {

/// Proof that a locus is empty, re-checkable by verify_deduction.
struct EmptinessProof {
  Locus locus;
  Deduction deduction;

  bool verify() const { return verify_deduction(locus, deduction); }
  std::string render() const { return render_deduction(locus, deduction); }
};

struct EmptinessOptions {
  std::size_t deduction_nodes = 4000;
  // Second pass with Groebner leaves; 0 disables it.
  std::size_t algebraic_nodes = 400;
  std::size_t leaf_spairs = 20000;
};

/// Pure case analysis first, then case analysis closed by Groebner leaves.
inline std::optional<EmptinessProof> prove_empty(const Locus& l, const EmptinessOptions& o = {}) {
  DeductionOptions d;
  d.max_nodes = o.deduction_nodes;
  if (auto r = DeductionProver(d).prove(l)) return EmptinessProof{l, std::move(*r)};
  if (o.algebraic_nodes == 0) return std::nullopt;
  d.max_nodes = o.algebraic_nodes;
  d.max_depth = 8;
  d.algebraic_leaves = true;
  d.leaf_spairs = o.leaf_spairs;
  if (auto r = DeductionProver(d).prove(l)) return EmptinessProof{l, std::move(*r)};
  return std::nullopt;
}

}  // namespace resolve
