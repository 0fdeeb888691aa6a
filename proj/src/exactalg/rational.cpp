#include "opm/rational.hpp"

#include "opm/errors.hpp"

#include <cctype>

namespace opm {

Rational parse_rational(const std::string& raw)
{
    std::string s;
    for (char c : raw)
        if (!std::isspace(static_cast<unsigned char>(c)))
            s += c;
    if (s.empty())
        throw ConfigError("empty number");

    auto slash = s.find('/');
    if (slash != std::string::npos) {
        Rational num = parse_rational(s.substr(0, slash));
        Rational den = parse_rational(s.substr(slash + 1));
        if (den == 0)
            throw ConfigError("zero denominator in '" + raw + "'");
        return num / den;
    }

    // decimal with optional exponent, parsed digit by digit so 0.3 is 3/10
    std::size_t i = 0;
    bool neg = false;
    if (s[i] == '+' || s[i] == '-') {
        neg = s[i] == '-';
        ++i;
    }
    mpz_class mant = 0;
    int scale = 0;
    bool seen_digit = false, seen_dot = false;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            mant = mant * 10 + (c - '0');
            if (seen_dot)
                --scale;
            seen_digit = true;
        } else if (c == '.' && !seen_dot) {
            seen_dot = true;
        } else if (c == 'e' || c == 'E') {
            break;
        } else {
            throw ConfigError("bad number '" + raw + "'");
        }
    }
    if (!seen_digit)
        throw ConfigError("bad number '" + raw + "'");
    if (i < s.size()) {
        std::string e = s.substr(i + 1);
        try {
            std::size_t used = 0;
            scale += std::stoi(e, &used);
            if (used != e.size())
                throw ConfigError("bad exponent in '" + raw + "'");
        } catch (const std::logic_error&) {
            throw ConfigError("bad exponent in '" + raw + "'");
        }
    }
    Rational r(mant);
    mpz_class p10;
    mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(scale < 0 ? -scale : scale));
    if (scale < 0)
        r /= Rational(p10);
    else
        r *= Rational(p10);
    r.canonicalize();
    return neg ? Rational(-r) : r;
}

std::string to_string(const Rational& r) { return r.get_str(); }

Rational binomial(int n, int k)
{
    if (k < 0 || k > n)
        return 0;
    mpz_class b;
    mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return Rational(b);
}

Rational factorial(int n)
{
    mpz_class f;
    mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(n < 0 ? 0 : n));
    return Rational(f);
}

Rational double_factorial_odd(int k)
{
    Rational r = 1;
    for (int j = 2 * k - 1; j > 1; j -= 2)
        r *= j;
    return r;
}

} // namespace opm
