#pragma once

// Shared helpers for the test programs: random polynomials and a naive
// Groebner basis oracle.

#include <algorithm>
#include <random>

#include "resolve/groebner.hpp"

namespace resolve::testkit {

inline Term naive_lead(const Polynomial& p, const MonomialOrder& ord) {
  const Term* best = &p.terms()[0];
  for (auto& t : p.terms())
    if (ord.compare(t.mono, best->mono) > 0) best = &t;
  return *best;
}

/// Full reduction of f by `basis`, first divisor wins.
inline Polynomial naive_normal_form(Polynomial f, const std::vector<Polynomial>& basis, const MonomialOrder& ord) {
  Polynomial rem(f.registry());
  while (!f.is_zero()) {
    Term lt = naive_lead(f, ord);
    bool hit = false;
    for (auto& b : basis) {
      if (b.is_zero()) continue;
      Term lb = naive_lead(b, ord);
      if (lb.mono.divides(lt.mono)) {
        f -= b.mul_term(lb.mono.quotient_of(lt.mono), lt.coef / lb.coef);
        hit = true;
        break;
      }
    }
    if (!hit) {
      Polynomial t = Polynomial::monomial(f.registry(), lt.mono, lt.coef);
      rem += t;
      f -= t;
    }
  }
  return rem;
}

// Textbook Buchberger without criteria, then reduction. Independent of the
// engine apart from the polynomial arithmetic.
inline std::vector<Polynomial> naive_reduced_basis(std::vector<Polynomial> g, const MonomialOrder& ord, const Registry& reg) {
  auto lead = [&](const Polynomial& p) { return naive_lead(p, ord); };
  auto reduce = [&](const Polynomial& f, const std::vector<Polynomial>& basis) {
    return naive_normal_form(f, basis, ord);
  };
  std::erase_if(g, [](const Polynomial& p) { return p.is_zero(); });
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) {
      Term a = lead(g[i]), b = lead(g[j]);
      Monomial l = a.mono.lcm(b.mono);
      Polynomial s = g[i].mul_term(a.mono.quotient_of(l), 1 / a.coef) - g[j].mul_term(b.mono.quotient_of(l), 1 / b.coef);
      Polynomial r = reduce(s, g);
      if (!r.is_zero()) g.push_back(r);
      if (g.size() > 200) return {};
    }
  // Minimal then reduced.
  std::vector<Polynomial> minimal;
  for (std::size_t i = 0; i < g.size(); ++i) {
    bool redundant = false;
    for (std::size_t j = 0; j < g.size() && !redundant; ++j) {
      if (i == j) continue;
      Monomial li = lead(g[i]).mono, lj = lead(g[j]).mono;
      if (lj.divides(li) && (!(lj == li) || j < i)) redundant = true;
    }
    if (!redundant) minimal.push_back(g[i] * (1 / lead(g[i]).coef));
  }
  std::vector<Polynomial> out;
  for (std::size_t i = 0; i < minimal.size(); ++i) {
    std::vector<Polynomial> others;
    for (std::size_t j = 0; j < minimal.size(); ++j)
      if (j != i) others.push_back(minimal[j]);
    Term lt = lead(minimal[i]);
    Polynomial tail = minimal[i] - Polynomial::monomial(reg, lt.mono, lt.coef);
    out.push_back(Polynomial::monomial(reg, lt.mono, lt.coef) + reduce(tail, others));
  }
  std::sort(out.begin(), out.end(), [&](const Polynomial& a, const Polynomial& b) {
    return ord.compare(lead(a).mono, lead(b).mono) < 0;
  });
  return out;
}

/// Random polynomial with at most `max_terms` terms, each exponent at most
/// `max_exp`, and coefficients a/b with |a| <= 5, 1 <= b <= max_den.
inline Polynomial random_polynomial(std::mt19937& rng, const Registry& reg, int max_terms = 4, int max_exp = 3,
                                    int max_den = 3, int min_terms = 0) {
  std::uniform_int_distribution<int> nterms(min_terms, max_terms), coef(-5, 5), den(1, max_den), ex(0, max_exp);
  std::vector<Term> t;
  int n = nterms(rng);
  for (int k = 0; k < n; ++k) {
    Monomial m(reg->size());
    for (std::size_t v = 0; v < reg->size(); ++v) m.set(v, static_cast<unsigned>(ex(rng)));
    t.push_back({m, make_rational(coef(rng), den(rng))});
  }
  return Polynomial::from_terms(reg, std::move(t));
}

/// Random polynomial of total degree at most `max_degree` with small
/// integer coefficients.
inline Polynomial random_low_degree(std::mt19937& rng, const Registry& reg, int max_terms = 3, unsigned max_degree = 2) {
  std::uniform_int_distribution<int> nterms(1, max_terms), coef(-3, 3);
  std::uniform_int_distribution<std::size_t> var(0, reg->size() - 1);
  std::uniform_int_distribution<unsigned> deg(0, max_degree);
  std::vector<Term> t;
  int n = nterms(rng);
  for (int k = 0; k < n; ++k) {
    Monomial m(reg->size());
    for (unsigned d = deg(rng); d > 0; --d) {
      std::size_t v = var(rng);
      m.set(v, m[v] + 1);
    }
    t.push_back({m, Rational(coef(rng))});
  }
  return Polynomial::from_terms(reg, std::move(t));
}

}  // namespace resolve::testkit
