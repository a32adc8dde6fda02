#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "resolve/error.hpp"
#include "resolve/monomial.hpp"
#include "resolve/rational.hpp"
#include "resolve/registry.hpp"

namespace resolve {

struct Term {
  Monomial mono;
  Rational coef;
};

inline const MonomialOrder& canonical_order() {
  static const MonomialOrder ord = MonomialOrder::grevlex();
  return ord;
}

/// Sparse polynomial with exact rational coefficients. Terms are kept sorted
/// by grevlex (descending) with no zero coefficients, so structural equality
/// is mathematical equality.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(Registry reg) : reg_(std::move(reg)) {}

  static Polynomial constant(Registry reg, const Rational& c) {
    Polynomial p(std::move(reg));
    if (c != 0) p.terms_.push_back({Monomial(p.reg_->size()), c});
    return p;
  }
  static Polynomial variable(Registry reg, std::size_t v) {
    Polynomial p(std::move(reg));
    p.terms_.push_back({Monomial::variable(p.reg_->size(), v), Rational(1)});
    return p;
  }
  static Polynomial variable(Registry reg, std::string_view name) {
    std::size_t v = reg->index(name);
    return variable(std::move(reg), v);
  }
  static Polynomial monomial(Registry reg, const Monomial& m, const Rational& c = 1) {
    Polynomial p(std::move(reg));
    if (c != 0) p.terms_.push_back({m, c});
    return p;
  }
  // Terms in any order, duplicates allowed.
  static Polynomial from_terms(Registry reg, std::vector<Term> terms) {
    Polynomial p(std::move(reg));
    p.terms_ = std::move(terms);
    p.normalize();
    return p;
  }

  const Registry& registry() const { return reg_; }
  std::size_t nvars() const { return reg_ ? reg_->size() : 0; }
  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].mono.is_one()); }
  Rational constant_value() const {
    if (!is_constant()) throw std::logic_error("polynomial is not constant");
    return terms_.empty() ? Rational(0) : terms_[0].coef;
  }
  // Constant term (zero if absent).
  Rational constant_term() const {
    if (!terms_.empty() && terms_.back().mono.is_one()) return terms_.back().coef;
    return 0;
  }
  bool is_monomial() const { return terms_.size() == 1; }
  const Term& leading_term() const { return terms_.front(); }

  unsigned total_degree() const {
    unsigned d = 0;
    for (auto& t : terms_) d = std::max(d, t.mono.degree());
    return d;
  }
  unsigned degree_in(std::size_t v) const {
    unsigned d = 0;
    for (auto& t : terms_) d = std::max(d, t.mono[v]);
    return d;
  }
  bool depends_on(std::size_t v) const { return degree_in(v) > 0; }

  std::vector<std::size_t> support() const {
    std::vector<bool> used(nvars(), false);
    for (auto& t : terms_)
      for (std::size_t i = 0; i < nvars(); ++i)
        if (t.mono[i]) used[i] = true;
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < used.size(); ++i)
      if (used[i]) out.push_back(i);
    return out;
  }

  // Largest monomial dividing every term (one for the zero polynomial).
  Monomial monomial_content() const {
    if (terms_.empty()) return Monomial(nvars());
    Monomial g = terms_[0].mono;
    for (auto& t : terms_) g = g.gcd(t.mono);
    return g;
  }

  bool operator==(const Polynomial& o) const {
    if (terms_.size() != o.terms_.size()) return false;
    if (!terms_.empty()) check(o);
    for (std::size_t i = 0; i < terms_.size(); ++i)
      if (!(terms_[i].mono == o.terms_[i].mono) || terms_[i].coef != o.terms_[i].coef) return false;
    return true;
  }
  bool operator!=(const Polynomial& o) const { return !(*this == o); }

  Polynomial operator-() const {
    Polynomial r = *this;
    for (auto& t : r.terms_) t.coef = -t.coef;
    return r;
  }

  Polynomial operator+(const Polynomial& o) const { return merge(o, 1); }
  Polynomial operator-(const Polynomial& o) const { return merge(o, -1); }
  Polynomial& operator+=(const Polynomial& o) { return *this = merge(o, 1); }
  Polynomial& operator-=(const Polynomial& o) { return *this = merge(o, -1); }

  Polynomial operator*(const Polynomial& o) const {
    check(o);
    Polynomial r(reg_ ? reg_ : o.reg_);
    if (terms_.empty() || o.terms_.empty()) return r;
    if (o.terms_.size() == 1) return mul_term(o.terms_[0].mono, o.terms_[0].coef);
    if (terms_.size() == 1) return o.mul_term(terms_[0].mono, terms_[0].coef);
    std::unordered_map<Monomial, Rational, MonomialHash> acc;
    acc.reserve(terms_.size() * o.terms_.size());
    for (auto& a : terms_)
      for (auto& b : o.terms_) acc[a.mono * b.mono] += a.coef * b.coef;
    r.terms_.reserve(acc.size());
    for (auto& [m, c] : acc)
      if (c != 0) r.terms_.push_back({m, c});
    r.sort();
    return r;
  }
  Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

  Polynomial operator*(const Rational& c) const {
    if (c == 0) return Polynomial(reg_);
    Polynomial r = *this;
    for (auto& t : r.terms_) t.coef *= c;
    return r;
  }

  // Multiplication by c*m keeps the term order (grevlex is multiplicative).
  Polynomial mul_term(const Monomial& m, const Rational& c) const {
    Polynomial r(reg_);
    if (c == 0) return r;
    r.terms_.reserve(terms_.size());
    for (auto& t : terms_) r.terms_.push_back({t.mono * m, t.coef * c});
    return r;
  }

  Polynomial pow(unsigned e) const {
    Polynomial result = constant(reg_, 1);
    Polynomial base = *this;
    while (e) {
      if (e & 1) result *= base;
      e >>= 1;
      if (e) base *= base;
    }
    return result;
  }

  Polynomial derivative(std::size_t v) const {
    std::vector<Term> out;
    for (auto& t : terms_) {
      unsigned e = t.mono[v];
      if (!e) continue;
      Monomial m = t.mono;
      m.set(v, e - 1);
      out.push_back({m, t.coef * e});
    }
    return from_terms(reg_, std::move(out));
  }

  Rational evaluate(const std::vector<Rational>& point) const {
    if (point.size() != nvars()) throw std::invalid_argument("point has wrong dimension");
    Rational sum = 0;
    for (auto& t : terms_) {
      Rational v = t.coef;
      for (std::size_t i = 0; i < nvars() && v != 0; ++i)
        for (unsigned k = 0; k < t.mono[i]; ++k) v *= point[i];
      sum += v;
    }
    return sum;
  }

  // Replace variables by polynomials over `target`. Unbound variables are
  // carried over by name and must exist in `target`.
  Polynomial substitute(const std::map<std::size_t, Polynomial>& bind, const Registry& target) const {
    std::vector<std::optional<Polynomial>> image(nvars());
    for (std::size_t i = 0; i < nvars(); ++i) {
      auto it = bind.find(i);
      if (it != bind.end()) {
        if (!same_registry(it->second.registry(), target))
          throw RegistryMismatch("substitution image lives in another registry");
        image[i] = it->second;
      }
    }
    std::vector<std::size_t> carry(nvars(), 0);
    std::vector<bool> carried(nvars(), false);
    for (std::size_t i = 0; i < nvars(); ++i)
      if (!image[i] && depends_on(i)) {
        carry[i] = target->index(reg_->name(i));
        carried[i] = true;
      }
    // Cache powers of each image.
    std::vector<std::vector<Polynomial>> powers(nvars());
    auto power = [&](std::size_t v, unsigned e) -> const Polynomial& {
      auto& pw = powers[v];
      if (pw.empty()) pw.push_back(constant(target, 1));
      while (pw.size() <= e) pw.push_back(pw.back() * *image[v]);
      return pw[e];
    };
    std::unordered_map<Monomial, Rational, MonomialHash> acc;
    for (auto& t : terms_) {
      Monomial rest(target->size());
      Polynomial prod = constant(target, t.coef);
      for (std::size_t i = 0; i < nvars(); ++i) {
        unsigned e = t.mono[i];
        if (!e) continue;
        if (carried[i])
          rest.set(carry[i], rest[carry[i]] + e);
        else
          prod = prod * power(i, e);
      }
      for (auto& pt : prod.terms_) acc[pt.mono * rest] += pt.coef;
    }
    Polynomial r(target);
    for (auto& [m, c] : acc)
      if (c != 0) r.terms_.push_back({m, c});
    r.sort();
    return r;
  }

  Polynomial substitute(const std::map<std::string, Polynomial>& bind, const Registry& target) const {
    std::map<std::size_t, Polynomial> b;
    for (auto& [name, img] : bind)
      if (auto i = reg_->find(name)) b.emplace(*i, img);
    return substitute(b, target);
  }

  // Same polynomial over another registry containing every used variable.
  Polynomial embed(const Registry& target) const {
    if (same_registry(reg_, target)) {
      Polynomial r = *this;
      r.reg_ = target;
      return r;
    }
    std::vector<std::size_t> map(nvars(), 0);
    for (std::size_t v : support()) map[v] = target->index(reg_->name(v));
    Polynomial r(target);
    for (auto& t : terms_) r.terms_.push_back({t.mono.remap(target->size(), map), t.coef});
    r.sort();
    return r;
  }

  // Setting variable v to zero.
  Polynomial at_zero(std::size_t v) const {
    Polynomial r(reg_);
    for (auto& t : terms_)
      if (!t.mono[v]) r.terms_.push_back(t);
    return r;
  }

  // Divide every term by m (must divide all terms).
  Polynomial divide_monomial(const Monomial& m) const {
    Polynomial r(reg_);
    for (auto& t : terms_) {
      if (!m.divides(t.mono)) throw std::domain_error("monomial does not divide polynomial");
      r.terms_.push_back({m.quotient_of(t.mono), t.coef});
    }
    return r;
  }

  // Quotient when g divides *this exactly, nullopt otherwise.
  std::optional<Polynomial> exact_divide(const Polynomial& g) const {
    check(g);
    if (g.is_zero()) throw std::domain_error("division by zero polynomial");
    Polynomial rem = *this;
    std::vector<Term> quot;
    const Term& lg = g.terms_.front();
    while (!rem.is_zero()) {
      const Term& lt = rem.terms_.front();
      if (!lg.mono.divides(lt.mono)) return std::nullopt;
      Monomial q = lg.mono.quotient_of(lt.mono);
      Rational c = lt.coef / lg.coef;
      quot.push_back({q, c});
      rem -= g.mul_term(q, c);
    }
    return from_terms(reg_, std::move(quot));
  }

  // Scalar multiple with coprime integer coefficients and positive leading
  // coefficient. Used to compare generators up to a nonzero constant.
  Polynomial primitive() const {
    if (terms_.empty()) return *this;
    Integer num_gcd = 0, den_lcm = 1;
    for (auto& t : terms_) {
      mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), t.coef.get_num_mpz_t());
      mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), t.coef.get_den_mpz_t());
    }
    Rational scale(den_lcm, num_gcd);
    scale.canonicalize();
    if (terms_.front().coef < 0) scale = -scale;
    return *this * scale;
  }

  Polynomial monic() const {
    if (terms_.empty()) return *this;
    return *this * (Rational(1) / terms_.front().coef);
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto& t : terms_) {
      Rational c = t.coef;
      bool neg = c < 0;
      if (neg) c = -c;
      if (first)
        os << (neg ? "-" : "");
      else
        os << (neg ? " - " : " + ");
      first = false;
      bool unit = c == 1;
      if (!unit || t.mono.is_one()) {
        os << c.get_str();
        if (!t.mono.is_one()) os << "*";
      }
      bool firstvar = true;
      for (std::size_t i = 0; i < nvars(); ++i) {
        unsigned e = t.mono[i];
        if (!e) continue;
        if (!firstvar) os << "*";
        firstvar = false;
        os << reg_->name(i);
        if (e > 1) os << "^" << e;
      }
    }
    return os.str();
  }

  void check(const Polynomial& o) const {
    if (reg_ && o.reg_ && !same_registry(reg_, o.reg_))
      throw RegistryMismatch("polynomials from different registries");
  }

 private:
  void sort() {
    const auto& ord = canonical_order();
    std::sort(terms_.begin(), terms_.end(),
              [&](const Term& a, const Term& b) { return ord.compare(a.mono, b.mono) > 0; });
  }
  void normalize() {
    sort();
    std::vector<Term> out;
    for (auto& t : terms_) {
      if (!out.empty() && out.back().mono == t.mono)
        out.back().coef += t.coef;
      else
        out.push_back(t);
      if (out.back().coef == 0) out.pop_back();
    }
    terms_ = std::move(out);
  }
  Polynomial merge(const Polynomial& o, int sign) const {
    check(o);
    Polynomial r(reg_ ? reg_ : o.reg_);
    const auto& ord = canonical_order();
    r.terms_.reserve(terms_.size() + o.terms_.size());
    std::size_t i = 0, j = 0;
    while (i < terms_.size() || j < o.terms_.size()) {
      int c;
      if (i == terms_.size())
        c = -1;
      else if (j == o.terms_.size())
        c = 1;
      else
        c = ord.compare(terms_[i].mono, o.terms_[j].mono);
      if (c > 0) {
        r.terms_.push_back(terms_[i++]);
      } else if (c < 0) {
        r.terms_.push_back({o.terms_[j].mono, sign > 0 ? o.terms_[j].coef : Rational(-o.terms_[j].coef)});
        ++j;
      } else {
        Rational s = sign > 0 ? Rational(terms_[i].coef + o.terms_[j].coef)
                              : Rational(terms_[i].coef - o.terms_[j].coef);
        if (s != 0) r.terms_.push_back({terms_[i].mono, s});
        ++i;
        ++j;
      }
    }
    return r;
  }

  Registry reg_;
  std::vector<Term> terms_;
};

inline Polynomial operator*(const Rational& c, const Polynomial& p) { return p * c; }

inline std::ostream& operator<<(std::ostream& os, const Polynomial& p) { return os << p.to_string(); }

}  // namespace resolve
