#pragma once

#include <gmpxx.h>

#include <string>

namespace opm {

// GMP keeps mpq_class canonical (gcd 1, positive denominator) after every op.
using Rational = mpq_class;

// Accepts "3", "-7/4", "0.125", "1e-3".  Decimals are converted exactly.
Rational parse_rational(const std::string& s);

std::string to_string(const Rational& r);

inline double to_double(const Rational& r) { return r.get_d(); }

Rational binomial(int n, int k);
Rational factorial(int n);
// (2k-1)!! with (-1)!! = 1
Rational double_factorial_odd(int k);

} // namespace opm
