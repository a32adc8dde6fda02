#pragma once

#include <optional>
#include <string>
#include <vector>

#include "resolve/groebner.hpp"

namespace resolve {

/// Finitely generated ideal of Q[vars].
struct Ideal {
  Registry reg;
  std::vector<Polynomial> gens;

  Ideal() = default;
  Ideal(Registry r, std::vector<Polynomial> g) : reg(std::move(r)), gens(std::move(g)) {
    for (auto& p : gens)
      if (!same_registry(p.registry(), reg)) throw RegistryMismatch("ideal generator from another registry");
  }
};

struct Membership {
  bool member = false;
  Polynomial remainder;
  // f = sum combiners[j] * gens[j] when member and a witness was requested.
  std::vector<Polynomial> combiners;

  explicit operator bool() const { return member; }
};

inline bool verify_combination(const std::vector<Polynomial>& gens, const std::vector<Polynomial>& comb,
                               const Polynomial& target) {
  if (gens.size() != comb.size()) return false;
  Polynomial sum(target.registry());
  for (std::size_t j = 0; j < gens.size(); ++j)
    if (!comb[j].is_zero()) sum += comb[j] * gens[j];
  return sum == target;
}

/// Membership test against a precomputed basis. With cofactors available the
/// witness is assembled and re-verified by expansion.
inline Membership contains(const GroebnerBasis& gb, const Polynomial& f) {
  Membership m;
  std::vector<Polynomial> q;
  const bool witness = !gb.cofactors.empty();
  m.remainder = normal_form(gb, f, witness ? &q : nullptr);
  m.member = m.remainder.is_zero();
  if (m.member && witness) {
    m.combiners.assign(gb.generators.size(), Polynomial(gb.reg));
    for (std::size_t k = 0; k < q.size(); ++k) {
      if (q[k].is_zero()) continue;
      for (std::size_t j = 0; j < gb.generators.size(); ++j)
        if (!gb.cofactors[k][j].is_zero()) m.combiners[j] += q[k] * gb.cofactors[k][j];
    }
    if (!verify_combination(gb.generators, m.combiners, f))
      throw std::logic_error("membership witness failed re-verification");
  }
  return m;
}

inline Membership contains(const Ideal& i, const Polynomial& f, bool witness = true, GroebnerOptions opts = {}) {
  if (!same_registry(i.reg, f.registry())) throw RegistryMismatch("membership test across registries");
  opts.track_cofactors = witness;
  return contains(groebner(i.gens, i.reg, opts), f);
}

/// Generators of (i : f^infinity) via <i, 1 - u f> followed by elimination
/// of the auxiliary variable u.
inline Ideal saturate(const Ideal& i, const Polynomial& f, GroebnerOptions opts = {}) {
  std::string u = fresh_name(*i.reg, "_sat");
  Registry ext = extend_registry(i.reg, {u});
  std::vector<Polynomial> gens;
  for (auto& g : i.gens) gens.push_back(g.embed(ext));
  Polynomial uf = Polynomial::variable(ext, u) * f.embed(ext);
  gens.push_back(Polynomial::constant(ext, 1) - uf);
  std::vector<bool> block(ext->size(), false);
  block.back() = true;
  opts.order = MonomialOrder::elimination(block);
  opts.track_cofactors = false;
  GroebnerBasis gb = groebner(gens, ext, opts);
  Ideal out{i.reg, {}};
  for (auto& b : gb.basis)
    if (!b.depends_on(ext->size() - 1)) out.gens.push_back(b.embed(i.reg));
  return out;
}

/// Generators of i intersected with the subring without `drop`.
inline Ideal eliminate(const Ideal& i, const std::vector<std::size_t>& drop, GroebnerOptions opts = {}) {
  std::vector<bool> block(i.reg->size(), false);
  for (auto v : drop) block.at(v) = true;
  opts.order = MonomialOrder::elimination(block);
  opts.track_cofactors = false;
  GroebnerBasis gb = groebner(i.gens, i.reg, opts);
  Ideal out{i.reg, {}};
  for (auto& b : gb.basis) {
    bool free = true;
    for (auto v : drop)
      if (b.depends_on(v)) free = false;
    if (free) out.gens.push_back(b);
  }
  return out;
}

/// Q[vars]/ideal with the listed elements inverted.
struct LocalizedPresentation {
  Registry reg;
  std::vector<Polynomial> ideal;
  std::vector<Polynomial> inverted;
};

/// Witness that 1 lies in an ideal: sum combiners[j] * generators[j] = 1,
/// where the generators live over a registry that may contain one
/// auxiliary inverse variable per inverted element (relation u*f - 1).
struct CombinationCertificate {
  Registry reg;
  std::vector<Polynomial> generators;
  std::vector<std::string> labels;
  std::vector<Polynomial> combiners;

  bool verify() const {
    return verify_combination(generators, combiners, Polynomial::constant(reg, 1));
  }
};

enum class Verdict { Certified, NotCertified, Inconclusive };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Certified: return "certified";
    case Verdict::NotCertified: return "not-certified";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

struct UnitResult {
  Verdict verdict = Verdict::NotCertified;
  std::optional<CombinationCertificate> certificate;
  std::string note;
};

/// Decide whether the targets generate the unit ideal of the localisation.
/// Inverted elements become relations u_f * f - 1 over an extended registry.
inline UnitResult is_unit(const LocalizedPresentation& lp, const std::vector<Polynomial>& targets,
                          GroebnerOptions opts = {}) {
  std::vector<std::string> extra;
  std::vector<std::string> taken = lp.reg->names();
  for (std::size_t k = 0; k < lp.inverted.size(); ++k) {
    std::string stem = "u" + std::to_string(k);
    VarRegistry probe(taken);
    std::string name = fresh_name(probe, stem);
    taken.push_back(name);
    extra.push_back(name);
  }
  Registry ext = extend_registry(lp.reg, extra);
  CombinationCertificate cert;
  cert.reg = ext;
  for (auto& g : lp.ideal) {
    cert.generators.push_back(g.embed(ext));
    cert.labels.push_back("relation");
  }
  for (auto& t : targets) {
    cert.generators.push_back(t.embed(ext));
    cert.labels.push_back("target");
  }
  for (std::size_t k = 0; k < lp.inverted.size(); ++k) {
    cert.generators.push_back(Polynomial::variable(ext, extra[k]) * lp.inverted[k].embed(ext) -
                              Polynomial::constant(ext, 1));
    cert.labels.push_back("inverse of " + lp.inverted[k].to_string());
  }
  opts.track_cofactors = true;
  UnitResult res;
  try {
    GroebnerBasis gb = groebner(cert.generators, ext, opts);
    if (!gb.is_unit()) {
      res.verdict = Verdict::NotCertified;
      res.note = "Groebner basis is not {1}";
      return res;
    }
    Rational c = gb.basis[0].constant_value();
    for (auto& p : gb.cofactors[0]) cert.combiners.push_back(p * (Rational(1) / c));
  } catch (const BudgetExceeded& e) {
    res.verdict = Verdict::Inconclusive;
    res.note = e.what();
    return res;
  }
  if (!cert.verify()) throw std::logic_error("unit certificate failed re-verification");
  res.verdict = Verdict::Certified;
  res.certificate = std::move(cert);
  return res;
}

}  // namespace resolve
