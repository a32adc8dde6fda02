#pragma once

#include <gmpxx.h>

#include <string>

namespace resolve {

using Rational = mpq_class;
using Integer = mpz_class;

inline std::string to_string(const Rational& q) { return q.get_str(); }

inline Rational make_rational(long n, long d = 1) {
  Rational q(n, d);
  q.canonicalize();
  return q;
}

}  // namespace resolve
