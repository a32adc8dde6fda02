#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "resolve/error.hpp"
#include "resolve/polynomial.hpp"

namespace resolve {

struct GroebnerOptions {
  MonomialOrder order = MonomialOrder::grevlex();
  std::size_t max_spairs = 1'000'000;
  unsigned max_degree = 40;
  bool track_cofactors = false;
};

/// Reduced Groebner basis together with, optionally, the expression of each
/// basis element in terms of the input generators.
struct GroebnerBasis {
  Registry reg;
  MonomialOrder order = MonomialOrder::grevlex();
  std::vector<Polynomial> generators;
  std::vector<Polynomial> basis;
  // cofactors[k][j]: basis[k] = sum_j cofactors[k][j] * generators[j]
  std::vector<std::vector<Polynomial>> cofactors;
  std::size_t spairs = 0;

  bool is_unit() const { return basis.size() == 1 && basis[0].is_constant() && !basis[0].is_zero(); }
  bool has_cofactors() const { return !cofactors.empty() || basis.empty(); }
};

namespace detail {

// Polynomial as a term vector sorted by an arbitrary order.
using TermVec = std::vector<Term>;

struct GbContext {
  const MonomialOrder& ord;
  Registry reg;

  void sort(TermVec& v) const {
    std::sort(v.begin(), v.end(), [&](const Term& a, const Term& b) { return ord.compare(a.mono, b.mono) > 0; });
  }

  // a - c*m*b, both sorted; the result stays sorted.
  TermVec sub_mul(const TermVec& a, std::size_t a_from, const TermVec& b, std::size_t b_from,
                  const Monomial& m, const Rational& c) const {
    TermVec r;
    r.reserve(a.size() - a_from + b.size() - b_from);
    std::size_t i = a_from, j = b_from;
    Monomial bm;
    bool have_b = false;
    auto load_b = [&]() {
      if (j < b.size()) {
        bm = b[j].mono * m;
        have_b = true;
      } else {
        have_b = false;
      }
    };
    load_b();
    while (i < a.size() || have_b) {
      int cmp;
      if (i == a.size())
        cmp = -1;
      else if (!have_b)
        cmp = 1;
      else
        cmp = ord.compare(a[i].mono, bm);
      if (cmp > 0) {
        r.push_back(a[i++]);
      } else if (cmp < 0) {
        r.push_back({bm, -c * b[j].coef});
        ++j;
        load_b();
      } else {
        Rational s = a[i].coef - c * b[j].coef;
        if (s != 0) r.push_back({bm, std::move(s)});
        ++i;
        ++j;
        load_b();
      }
    }
    return r;
  }
};

struct GbElem {
  TermVec t;
  unsigned sugar = 0;
  std::vector<Polynomial> cof;
};

struct GbPair {
  std::size_t i, j;
  Monomial lcm;
  unsigned sugar;
};

inline unsigned max_degree(const TermVec& v) {
  unsigned d = 0;
  for (auto& t : v) d = std::max(d, t.mono.degree());
  return d;
}

}  // namespace detail

class GroebnerEngine {
 public:
  GroebnerEngine(Registry reg, GroebnerOptions opts) : reg_(std::move(reg)), opts_(std::move(opts)), ctx_{opts_.order, reg_} {}

  GroebnerBasis run(const std::vector<Polynomial>& gens) {
    GroebnerBasis out;
    out.reg = reg_;
    out.order = opts_.order;
    out.generators = gens;
    ngens_ = gens.size();
    for (std::size_t k = 0; k < gens.size(); ++k) {
      if (!same_registry(gens[k].registry(), reg_)) throw RegistryMismatch("generator from another registry");
      if (gens[k].is_zero()) continue;
      detail::GbElem e;
      e.t = gens[k].terms();
      ctx_.sort(e.t);
      e.sugar = detail::max_degree(e.t);
      if (opts_.track_cofactors) {
        e.cof.assign(ngens_, Polynomial(reg_));
        e.cof[k] = Polynomial::constant(reg_, 1);
      }
      reduce(e);
      if (e.t.empty()) continue;
      if (finish_if_unit(e, out)) return out;
      make_monic(e);
      add(std::move(e));
    }
    while (!pairs_.empty()) {
      auto best = std::min_element(pairs_.begin(), pairs_.end(), [&](const detail::GbPair& a, const detail::GbPair& b) {
        if (a.sugar != b.sugar) return a.sugar < b.sugar;
        return opts_.order.compare(a.lcm, b.lcm) < 0;
      });
      detail::GbPair p = *best;
      *best = pairs_.back();
      pairs_.pop_back();
      if (++spairs_ > opts_.max_spairs)
        throw BudgetExceeded("S-pair budget of " + std::to_string(opts_.max_spairs) + " exceeded");
      if (p.lcm.degree() > opts_.max_degree)
        throw BudgetExceeded("degree budget of " + std::to_string(opts_.max_degree) + " exceeded");
      detail::GbElem s = spoly(p);
      reduce(s);
      if (s.t.empty()) continue;
      if (finish_if_unit(s, out)) return out;
      make_monic(s);
      add(std::move(s));
    }
    interreduce();
    std::sort(active_.begin(), active_.end(), [&](std::size_t a, std::size_t b) {
      return opts_.order.compare(store_[a].t[0].mono, store_[b].t[0].mono) < 0;
    });
    for (std::size_t idx : active_) {
      out.basis.push_back(Polynomial::from_terms(reg_, store_[idx].t));
      if (opts_.track_cofactors) out.cofactors.push_back(store_[idx].cof);
    }
    out.spairs = spairs_;
    return out;
  }

 private:
  bool finish_if_unit(detail::GbElem& e, GroebnerBasis& out) {
    if (!(e.t.size() == 1 && e.t[0].mono.is_one())) return false;
    make_monic(e);
    out.basis = {Polynomial::constant(reg_, 1)};
    if (opts_.track_cofactors) out.cofactors = {e.cof};
    out.spairs = spairs_;
    return true;
  }

  void make_monic(detail::GbElem& e) {
    Rational inv = Rational(1) / e.t[0].coef;
    if (inv == 1) return;
    for (auto& t : e.t) t.coef *= inv;
    for (auto& c : e.cof) c = c * inv;
  }

  detail::GbElem spoly(const detail::GbPair& p) {
    const auto& f = store_[p.i];
    const auto& g = store_[p.j];
    Monomial mf = f.t[0].mono.quotient_of(p.lcm);
    Monomial mg = g.t[0].mono.quotient_of(p.lcm);
    detail::GbElem s;
    // Both are monic: s = mf*f - mg*g with the leading terms cancelling.
    detail::TermVec a;
    a.reserve(f.t.size());
    for (std::size_t k = 1; k < f.t.size(); ++k) a.push_back({f.t[k].mono * mf, f.t[k].coef});
    s.t = ctx_.sub_mul(a, 0, g.t, 1, mg, Rational(1));
    s.sugar = p.sugar;
    if (opts_.track_cofactors) {
      s.cof.resize(ngens_);
      for (std::size_t k = 0; k < ngens_; ++k)
        s.cof[k] = f.cof[k].mul_term(mf, 1) - g.cof[k].mul_term(mg, 1);
    }
    return s;
  }

  // Full reduction against the active basis.
  void reduce(detail::GbElem& e) {
    detail::TermVec rem;
    detail::TermVec h = std::move(e.t);
    std::size_t pos = 0;
    while (pos < h.size()) {
      const Term& lt = h[pos];
      const detail::GbElem* red = nullptr;
      for (std::size_t idx : active_)
        if (store_[idx].t[0].mono.divides(lt.mono)) {
          red = &store_[idx];
          break;
        }
      if (!red) {
        rem.push_back(lt);
        ++pos;
        continue;
      }
      Monomial q = red->t[0].mono.quotient_of(lt.mono);
      Rational c = lt.coef;  // reducers are monic
      if (opts_.track_cofactors)
        for (std::size_t k = 0; k < ngens_; ++k)
          if (!red->cof[k].is_zero()) e.cof[k] -= red->cof[k].mul_term(q, c);
      e.sugar = std::max(e.sugar, red->sugar + q.degree());
      h = ctx_.sub_mul(h, pos + 1, red->t, 1, q, c);
      pos = 0;
    }
    e.t = std::move(rem);
  }

  void add(detail::GbElem h) {
    const std::size_t hi = store_.size();
    store_.push_back(std::move(h));
    const Monomial& t = store_[hi].t[0].mono;

    struct Cand {
      std::size_t g;
      Monomial lcm;
      bool coprime;
    };
    std::vector<Cand> c, d;
    for (std::size_t g : active_) {
      const Monomial& lg = store_[g].t[0].mono;
      c.push_back({g, t.lcm(lg), t.coprime(lg)});
    }
    for (std::size_t k = 0; k < c.size(); ++k) {
      bool keep = c[k].coprime;
      if (!keep) {
        keep = true;
        for (std::size_t l = k + 1; l < c.size() && keep; ++l)
          if (c[l].lcm.divides(c[k].lcm)) keep = false;
        for (auto& x : d)
          if (keep && x.lcm.divides(c[k].lcm)) keep = false;
      }
      if (keep) d.push_back(c[k]);
    }
    std::vector<detail::GbPair> kept;
    kept.reserve(pairs_.size() + d.size());
    for (auto& p : pairs_) {
      bool drop = t.divides(p.lcm) && !(store_[p.i].t[0].mono.lcm(t) == p.lcm) &&
                  !(store_[p.j].t[0].mono.lcm(t) == p.lcm);
      if (!drop) kept.push_back(p);
    }
    for (auto& x : d) {
      if (x.coprime) continue;
      const auto& g = store_[x.g];
      unsigned sh = store_[hi].sugar + store_[hi].t[0].mono.quotient_of(x.lcm).degree();
      unsigned sg = g.sugar + g.t[0].mono.quotient_of(x.lcm).degree();
      kept.push_back({x.g, hi, x.lcm, std::max(sh, sg)});
    }
    pairs_ = std::move(kept);
    std::vector<std::size_t> next;
    for (std::size_t g : active_)
      if (!t.divides(store_[g].t[0].mono)) next.push_back(g);
    next.push_back(hi);
    active_ = std::move(next);
  }

  void interreduce() {
    for (std::size_t k = 0; k < active_.size(); ++k) {
      std::size_t idx = active_[k];
      detail::GbElem e = std::move(store_[idx]);
      // Keep the leading term, reduce the tail by the other elements.
      Term lead = e.t[0];
      detail::TermVec tail(e.t.begin() + 1, e.t.end());
      std::vector<std::size_t> saved = active_;
      active_.erase(active_.begin() + static_cast<std::ptrdiff_t>(k));
      e.t = std::move(tail);
      reduce(e);
      active_ = std::move(saved);
      e.t.insert(e.t.begin(), lead);
      store_[idx] = std::move(e);
    }
  }

  Registry reg_;
  GroebnerOptions opts_;
  detail::GbContext ctx_;
  std::size_t ngens_ = 0;
  std::size_t spairs_ = 0;
  std::vector<detail::GbElem> store_;
  std::vector<std::size_t> active_;
  std::vector<detail::GbPair> pairs_;
};

inline GroebnerBasis groebner(const std::vector<Polynomial>& gens, const Registry& reg, GroebnerOptions opts = {}) {
  return GroebnerEngine(reg, std::move(opts)).run(gens);
}

/// Remainder of f modulo the basis (in the basis order). When `quotients`
/// is non-null it receives q_k with f = sum q_k * basis[k] + remainder.
inline Polynomial normal_form(const GroebnerBasis& gb, const Polynomial& f, std::vector<Polynomial>* quotients = nullptr) {
  detail::GbContext ctx{gb.order, gb.reg};
  std::vector<detail::TermVec> basis;
  for (auto& b : gb.basis) {
    detail::TermVec t = b.terms();
    ctx.sort(t);
    basis.push_back(std::move(t));
  }
  if (quotients) quotients->assign(gb.basis.size(), Polynomial(gb.reg));
  detail::TermVec h = f.terms();
  ctx.sort(h);
  detail::TermVec rem;
  std::size_t pos = 0;
  while (pos < h.size()) {
    const Term& lt = h[pos];
    std::size_t k = 0;
    while (k < basis.size() && !basis[k][0].mono.divides(lt.mono)) ++k;
    if (k == basis.size()) {
      rem.push_back(lt);
      ++pos;
      continue;
    }
    Monomial q = basis[k][0].mono.quotient_of(lt.mono);
    Rational c = lt.coef / basis[k][0].coef;
    if (quotients) (*quotients)[k] += Polynomial::monomial(gb.reg, q, c);
    h = ctx.sub_mul(h, pos + 1, basis[k], 1, q, c);
    pos = 0;
  }
  return Polynomial::from_terms(gb.reg, std::move(rem));
}

}  // namespace resolve
