#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <gmpxx.h>

namespace cqb {

// All measure arithmetic is exact. GMP rationals are kept in canonical
// reduced form (positive denominator, gcd 1) by the mpq_class operators;
// only direct num/den construction needs an explicit canonicalize.
using Rational = mpq_class;
using BigInt = mpz_class;

inline Rational make_rational(long num, long den) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    Rational r(num, den);
    r.canonicalize();
    return r;
}

inline Rational make_rational(const BigInt& num, const BigInt& den) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    Rational r(num, den);
    r.canonicalize();
    return r;
}

// Serialized form is always "num/den", e.g. "-3/7"; plain integers accepted.
inline std::string rat_to_string(const Rational& r) {
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

inline Rational rat_from_string(const std::string& s) {
    Rational r;
    if (r.set_str(s, 10) != 0)
        throw std::invalid_argument("malformed rational: '" + s + "'");
    r.canonicalize();
    return r;
}

// r^e for integer e, e < 0 allowed when r != 0.
inline Rational rat_pow(const Rational& r, long e) {
    if (e == 0) return Rational(1);
    if (r == 0 && e < 0) throw std::invalid_argument("0 to a negative power");
    Rational base = e > 0 ? r : Rational(1) / r;
    unsigned long n = static_cast<unsigned long>(e > 0 ? e : -e);
    Rational acc(1);
    mpz_pow_ui(acc.get_num_mpz_t(), base.get_num_mpz_t(), n);
    mpz_pow_ui(acc.get_den_mpz_t(), base.get_den_mpz_t(), n);
    return acc;
}

inline BigInt int_pow(const BigInt& base, unsigned long e) {
    BigInt out;
    mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), e);
    return out;
}

// log2 of a positive rational, accurate enough for threshold reports.
inline double rat_log2(const Rational& r) {
    if (r <= 0) throw std::invalid_argument("log2 of non-positive rational");
    signed long en = 0, ed = 0;
    double dn = mpz_get_d_2exp(&en, r.get_num().get_mpz_t());
    double dd = mpz_get_d_2exp(&ed, r.get_den().get_mpz_t());
    return (std::log2(dn) + static_cast<double>(en)) -
           (std::log2(dd) + static_cast<double>(ed));
}

inline double rat_to_double(const Rational& r) { return r.get_d(); }

}  // namespace cqb
