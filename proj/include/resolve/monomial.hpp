#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "resolve/registry.hpp"

namespace resolve {

/// Exponent vector over at most kMaxVars variables. Exponents are bounded
/// by 255; products that overflow throw instead of wrapping.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::size_t nvars) : n_(static_cast<std::uint8_t>(nvars)) {}

  static Monomial variable(std::size_t nvars, std::size_t v, unsigned e = 1) {
    Monomial m(nvars);
    m.set(v, e);
    return m;
  }

  std::size_t nvars() const { return n_; }
  unsigned operator[](std::size_t i) const { return e_[i]; }
  unsigned degree() const { return deg_; }
  bool is_one() const { return deg_ == 0; }

  void set(std::size_t i, unsigned e) {
    if (e > 255) throw std::overflow_error("exponent overflow");
    deg_ = static_cast<std::uint16_t>(deg_ - e_[i] + e);
    e_[i] = static_cast<std::uint8_t>(e);
  }

  Monomial operator*(const Monomial& o) const {
    Monomial r(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      unsigned s = unsigned(e_[i]) + o.e_[i];
      if (s > 255) throw std::overflow_error("exponent overflow");
      r.e_[i] = static_cast<std::uint8_t>(s);
    }
    r.deg_ = static_cast<std::uint16_t>(deg_ + o.deg_);
    return r;
  }

  bool divides(const Monomial& o) const {
    if (deg_ > o.deg_) return false;
    for (std::size_t i = 0; i < n_; ++i)
      if (e_[i] > o.e_[i]) return false;
    return true;
  }

  // Precondition: divides(o) is false is an error.
  Monomial quotient_of(const Monomial& o) const {
    Monomial r(n_);
    for (std::size_t i = 0; i < n_; ++i) r.e_[i] = static_cast<std::uint8_t>(o.e_[i] - e_[i]);
    r.deg_ = static_cast<std::uint16_t>(o.deg_ - deg_);
    return r;
  }

  Monomial lcm(const Monomial& o) const {
    Monomial r(n_);
    unsigned d = 0;
    for (std::size_t i = 0; i < n_; ++i) {
      r.e_[i] = std::max(e_[i], o.e_[i]);
      d += r.e_[i];
    }
    r.deg_ = static_cast<std::uint16_t>(d);
    return r;
  }

  Monomial gcd(const Monomial& o) const {
    Monomial r(n_);
    unsigned d = 0;
    for (std::size_t i = 0; i < n_; ++i) {
      r.e_[i] = std::min(e_[i], o.e_[i]);
      d += r.e_[i];
    }
    r.deg_ = static_cast<std::uint16_t>(d);
    return r;
  }

  bool coprime(const Monomial& o) const {
    for (std::size_t i = 0; i < n_; ++i)
      if (e_[i] && o.e_[i]) return false;
    return true;
  }

  // Exponents re-indexed into a registry of size `nvars`; map[i] is the new
  // index of variable i.
  Monomial remap(std::size_t nvars, const std::vector<std::size_t>& map) const {
    Monomial r(nvars);
    for (std::size_t i = 0; i < n_; ++i)
      if (e_[i]) r.set(map[i], r[map[i]] + e_[i]);
    return r;
  }

  bool operator==(const Monomial& o) const {
    return n_ == o.n_ && deg_ == o.deg_ &&
           std::equal(e_.begin(), e_.begin() + n_, o.e_.begin());
  }

  std::size_t hash() const {
    std::size_t h = 1469598103934665603ull;
    for (std::size_t i = 0; i < n_; ++i) h = (h ^ e_[i]) * 1099511628211ull;
    return h;
  }

 private:
  std::array<std::uint8_t, kMaxVars> e_{};
  std::uint16_t deg_ = 0;
  std::uint8_t n_ = 0;
};

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const { return m.hash(); }
};

/// Term order. Grevlex and lex follow registry order (first variable is
/// largest). The elimination order compares the marked block by grevlex
/// first and breaks ties by grevlex on the remaining variables.
class MonomialOrder {
 public:
  enum class Kind { Grevlex, Lex, Elimination };

  static MonomialOrder grevlex() { return MonomialOrder(Kind::Grevlex, {}); }
  static MonomialOrder lex() { return MonomialOrder(Kind::Lex, {}); }
  static MonomialOrder elimination(std::vector<bool> block) {
    return MonomialOrder(Kind::Elimination, std::move(block));
  }

  Kind kind() const { return kind_; }
  const std::vector<bool>& block() const { return block_; }

  // <0, 0, >0 as a is smaller, equal, larger than b.
  int compare(const Monomial& a, const Monomial& b) const {
    const std::size_t n = a.nvars();
    switch (kind_) {
      case Kind::Lex:
        for (std::size_t i = 0; i < n; ++i)
          if (a[i] != b[i]) return a[i] > b[i] ? 1 : -1;
        return 0;
      case Kind::Grevlex:
        return grevlex_part(a, b, n, nullptr, false);
      case Kind::Elimination: {
        if (int c = grevlex_part(a, b, n, &block_, true)) return c;
        return grevlex_part(a, b, n, &block_, false);
      }
    }
    return 0;
  }

  bool less(const Monomial& a, const Monomial& b) const { return compare(a, b) < 0; }

 private:
  MonomialOrder(Kind k, std::vector<bool> block) : kind_(k), block_(std::move(block)) {}

  static int grevlex_part(const Monomial& a, const Monomial& b, std::size_t n,
                          const std::vector<bool>* block, bool inside) {
    auto in = [&](std::size_t i) {
      bool b_i = block && i < block->size() && (*block)[i];
      return block ? b_i == inside : true;
    };
    unsigned da = 0, db = 0;
    if (!block) {
      da = a.degree();
      db = b.degree();
    } else {
      for (std::size_t i = 0; i < n; ++i)
        if (in(i)) {
          da += a[i];
          db += b[i];
        }
    }
    if (da != db) return da > db ? 1 : -1;
    for (std::size_t i = n; i-- > 0;) {
      if (!in(i)) continue;
      if (a[i] != b[i]) return a[i] < b[i] ? 1 : -1;
    }
    return 0;
  }

  Kind kind_;
  std::vector<bool> block_;
};

}  // namespace resolve
