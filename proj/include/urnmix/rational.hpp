#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace urnmix {

// Exact arithmetic substrate. mpq_class keeps values canonical
// (lowest terms, positive denominator), which is exactly the
// contract the rest of the library relies on.
using Rational = mpq_class;
using Integer = mpz_class;

inline Rational make_rational(long num, long den) {
  if (den == 0) throw std::domain_error("rational: zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline Integer binomial(long n, long k) {
  if (k < 0 || n < 0 || k > n) return Integer(0);
  Integer r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n),
               static_cast<unsigned long>(k));
  return r;
}

inline Rational pow_rational(const Rational& base, long exp) {
  if (exp < 0) throw std::domain_error("pow_rational: negative exponent");
  Rational r;
  mpz_pow_ui(r.get_num_mpz_t(), base.get_num().get_mpz_t(),
             static_cast<unsigned long>(exp));
  mpz_pow_ui(r.get_den_mpz_t(), base.get_den().get_mpz_t(),
             static_cast<unsigned long>(exp));
  // num/den of a canonical rational stay coprime under powers
  return r;
}

inline double to_double(const Rational& r) { return r.get_d(); }

inline Rational abs_rational(const Rational& r) { return r < 0 ? Rational(-r) : r; }

inline std::string to_string(const Rational& r) { return r.get_str(); }

}  // namespace urnmix
