#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

#include "dioph/errors.hpp"

namespace dioph {

// Unbounded integers and always-reduced rationals (GMP canonical form:
// gcd(|num|,den)=1, den>0, zero is 0/1). Arithmetic on canonical values
// stays canonical; every other construction path must go through make_rat.
using Int = mpz_class;
using Rat = mpq_class;

inline Rat make_rat(const Int& num, const Int& den) {
  if (den == 0) throw_invalid("rational with zero denominator");
  Rat r(num, den);
  r.canonicalize();
  return r;
}

inline Rat make_rat(long num, long den = 1) { return make_rat(Int(num), Int(den)); }

inline const Int& rat_num(const Rat& r) { return r.get_num(); }
inline const Int& rat_den(const Rat& r) { return r.get_den(); }

inline bool is_integer(const Rat& r) { return rat_den(r) == 1; }

inline std::string to_string(const Int& n) { return n.get_str(); }
inline std::string to_string(const Rat& r) { return r.get_str(); }

inline Int int_from_string(std::string_view s) {
  Int n;
  if (s.empty() || mpz_set_str(n.get_mpz_t(), std::string(s).c_str(), 10) != 0)
    throw_invalid("malformed integer literal: '" + std::string(s) + "'");
  return n;
}

// Accepts "n" or "n/d".
inline Rat rat_from_string(std::string_view s) {
  auto slash = s.find('/');
  if (slash == std::string_view::npos) return Rat(int_from_string(s));
  return make_rat(int_from_string(s.substr(0, slash)), int_from_string(s.substr(slash + 1)));
}

inline Int pow_int(const Int& base, unsigned long exp) {
  Int r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), exp);
  return r;
}

inline Rat pow_rat(const Rat& base, unsigned long exp) {
  Rat r;
  mpz_pow_ui(r.get_num().get_mpz_t(), base.get_num().get_mpz_t(), exp);
  mpz_pow_ui(r.get_den().get_mpz_t(), base.get_den().get_mpz_t(), exp);
  return r;
}

inline Int gcd_int(const Int& a, const Int& b) {
  Int r;
  mpz_gcd(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

inline Int lcm_int(const Int& a, const Int& b) {
  Int r;
  mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

inline Int abs_int(const Int& a) { return a >= 0 ? a : Int(-a); }

// Floor of the k-th root; exact flag reports whether n is a perfect power.
inline Int kth_root_floor(const Int& n, unsigned long k, bool* exact = nullptr) {
  Int r;
  int e = mpz_root(r.get_mpz_t(), n.get_mpz_t(), k);
  if (exact) *exact = (e != 0);
  return r;
}

// Distance from a rational to the nearest integer, in [0, 1/2].
inline Rat nearest_int_distance(const Rat& x) {
  Int fl;
  mpz_fdiv_q(fl.get_mpz_t(), rat_num(x).get_mpz_t(), rat_den(x).get_mpz_t());
  Rat frac = x - Rat(fl);
  Rat other = Rat(1) - frac;
  return frac < other ? frac : other;
}

}  // namespace dioph
