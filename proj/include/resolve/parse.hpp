#pragma once

#include <cctype>
#include <string>
#include <string_view>

#include "resolve/polynomial.hpp"

namespace resolve {

namespace detail {

inline bool ident_head(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool ident_tail(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '[' || c == ']' || c == '\'';
}

// Greek letters used in the notation, mapped to their ASCII stems.
inline std::string ascii_greek(std::string_view s) {
  static const std::pair<std::string_view, std::string_view> table[] = {
      {"\xCE\xBB", "l"}, {"\xCE\xBC", "m"}, {"\xCE\xBD", "n"}, {"\xCE\xB4", "d"}, {"\xCE\x94", "D"}};
  std::string out;
  for (std::size_t i = 0; i < s.size();) {
    bool hit = false;
    for (auto& [from, to] : table)
      if (s.substr(i, from.size()) == from) {
        out += to;
        i += from.size();
        hit = true;
        break;
      }
    if (!hit) out += s[i++];
  }
  return out;
}

}  // namespace detail

/// Canonical ASCII name for a token written in matrix-index notation:
///   a^i_j[k] -> aij_k (indices sorted, the matrix is symmetric)
///   d^i_j[k] -> dij_k, delta^i_j[k] -> dij_k
///   X[k]     -> X_k
/// Returns the input unchanged when no rule applies.
inline std::string canonical_name(std::string_view raw) {
  std::string s = detail::ascii_greek(raw);
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  for (std::string_view stem : {"delta", "a", "d"}) {
    if (s.rfind(stem, 0) != 0) continue;
    std::string_view rest = std::string_view(s).substr(stem.size());
    if (rest.size() >= 4 && rest[0] == '^' && digit(rest[1]) && rest[2] == '_' && digit(rest[3])) {
      char i = rest[1], j = rest[3];
      if (i > j) std::swap(i, j);
      std::string out = std::string(stem == "a" ? "a" : "d") + i + j;
      rest = rest.substr(4);
      if (!rest.empty()) {
        if (rest.front() != '[' || rest.back() != ']') return s;
        out += "_" + std::string(rest.substr(1, rest.size() - 2));
      }
      return out;
    }
  }
  auto lb = s.find('[');
  if (lb != std::string::npos && lb > 0 && s.back() == ']' && s.find('[', lb + 1) == std::string::npos)
    return s.substr(0, lb) + "_" + s.substr(lb + 1, s.size() - lb - 2);
  return s;
}

/// Display form of an ASCII coordinate name; canonical_name() inverts it.
///   a23_1 -> a^2_3[1], d13_4 -> δ^1_3[4], l1 -> λ1, m3 -> μ3, n3 -> ν3,
///   D_5 -> Δ[5], P2 -> P2.
inline std::string notation_name(const std::string& name) {
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  if (name.size() >= 3 && (name[0] == 'a' || name[0] == 'd') && digit(name[1]) && digit(name[2])) {
    std::string out = std::string(name[0] == 'a' ? "a" : "\xCE\xB4") + "^" + name[1] + "_" + name[2];
    if (name.size() == 3) return out;
    if (name[3] == '_' && name.size() > 4) return out + "[" + name.substr(4) + "]";
    return name;
  }
  if (name.size() >= 2 && digit(name[1]) && name.find('_') == std::string::npos) {
    if (name[0] == 'l') return "\xCE\xBB" + name.substr(1);
    if (name[0] == 'm') return "\xCE\xBC" + name.substr(1);
    if (name[0] == 'n') return "\xCE\xBD" + name.substr(1);
  }
  if (name.rfind("D_", 0) == 0) return "\xCE\x94[" + name.substr(2) + "]";
  return name;
}

/// Recursive-descent parser for the polynomial grammar
///   expr   := term (('+' | '-') term)*
///   term   := unary ('*' unary)*
///   unary  := ('-' | '+') unary | power
///   power  := atom ('^' INT)?
///   atom   := INT ('/' INT)? | IDENT | '(' expr ')'
/// Juxtaposition is rejected. Identifiers resolve against the registry,
/// falling back to canonical_name() for index notation.
class PolynomialParser {
 public:
  PolynomialParser(std::string_view text, Registry reg) : s_(text), reg_(std::move(reg)) {}

  Polynomial parse() {
    skip();
    if (pos_ >= s_.size()) fail("expression");
    Polynomial p = expr();
    skip();
    if (pos_ < s_.size()) fail(depth_ == 0 && s_[pos_] == ')' ? "end of input" : "operator or end of input");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& expected) const {
    throw ParseError(pos_, expected, std::string(s_));
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool peek(char c) {
    skip();
    return pos_ < s_.size() && s_[pos_] == c;
  }

  Polynomial expr() {
    Polynomial acc = term();
    while (true) {
      if (peek('+')) {
        ++pos_;
        acc += term();
      } else if (peek('-')) {
        ++pos_;
        acc -= term();
      } else {
        return acc;
      }
    }
  }

  Polynomial term() {
    Polynomial acc = unary();
    while (peek('*')) {
      ++pos_;
      acc *= unary();
    }
    return acc;
  }

  Polynomial unary() {
    if (peek('-')) {
      ++pos_;
      return -unary();
    }
    if (peek('+')) {
      ++pos_;
      return unary();
    }
    return power();
  }

  Polynomial power() {
    Polynomial base = atom();
    if (peek('^')) {
      ++pos_;
      skip();
      auto e = integer();
      if (!e) fail("integer exponent");
      if (*e > 10000) fail("exponent at most 10000");
      base = base.pow(static_cast<unsigned>(e->get_ui()));
    }
    return base;
  }

  std::optional<Integer> integer() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) return std::nullopt;
    return Integer(std::string(s_.substr(start, pos_ - start)));
  }

  Polynomial atom() {
    skip();
    if (pos_ >= s_.size()) fail("number, variable or '('");
    char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      Rational q(*integer());
      if (pos_ < s_.size() && s_[pos_] == '/') {
        ++pos_;
        auto d = integer();
        if (!d) fail("integer denominator");
        if (*d == 0) fail("nonzero denominator");
        q /= Rational(*d);
      }
      return Polynomial::constant(reg_, q);
    }
    if (c == '(') {
      ++pos_;
      ++depth_;
      Polynomial inner = expr();
      if (!peek(')')) fail("')'");
      ++pos_;
      --depth_;
      return inner;
    }
    if (detail::ident_head(c) || static_cast<unsigned char>(c) >= 0x80) return identifier();
    fail("number, variable or '('");
  }

  Polynomial identifier() {
    std::size_t start = pos_;
    auto tail = [&](char ch) { return detail::ident_tail(ch) || static_cast<unsigned char>(ch) >= 0x80; };
    while (pos_ < s_.size() && tail(s_[pos_])) ++pos_;
    // Index notation such as a^2_3[4]: '^' digit '_' digit belongs to the name.
    if (pos_ + 3 < s_.size() && s_[pos_] == '^' && std::isdigit(static_cast<unsigned char>(s_[pos_ + 1])) &&
        s_[pos_ + 2] == '_' && std::isdigit(static_cast<unsigned char>(s_[pos_ + 3]))) {
      pos_ += 4;
      if (pos_ < s_.size() && s_[pos_] == '[') {
        while (pos_ < s_.size() && s_[pos_] != ']') ++pos_;
        if (pos_ >= s_.size()) fail("']'");
        ++pos_;
      }
    }
    std::string raw(s_.substr(start, pos_ - start));
    if (auto i = reg_->find(raw)) return Polynomial::variable(reg_, *i);
    std::string canon = canonical_name(raw);
    if (auto i = reg_->find(canon)) return Polynomial::variable(reg_, *i);
    throw UnknownVariable(raw);
  }

  std::string_view s_;
  Registry reg_;
  std::size_t pos_ = 0;
  int depth_ = 0;
};

inline Polynomial parse_polynomial(std::string_view text, const Registry& reg) {
  return PolynomialParser(text, reg).parse();
}

}  // namespace resolve
