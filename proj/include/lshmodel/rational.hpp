#pragma once

#include <gmpxx.h>

#include <string>

namespace lshmodel {

// GMP keeps mpq_class canonical (reduced, positive denominator) after every
// arithmetic operation; values built from raw num/den need canonicalize().
using BigInt = mpz_class;
using Rational = mpq_class;

inline Rational make_rational(long num, long den) {
    Rational r(num, den);
    r.canonicalize();
    return r;
}

// Always "num/den", including integers ("1/1").
inline std::string to_fraction_string(const Rational& r) {
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

inline double to_double(const Rational& r) { return r.get_d(); }

inline Rational pow(const Rational& base, unsigned exponent) {
    Rational result(1);
    Rational b = base;
    while (exponent) {
        if (exponent & 1u)
            result *= b;
        b *= b;
        exponent >>= 1;
    }
    return result;
}

} // namespace lshmodel
