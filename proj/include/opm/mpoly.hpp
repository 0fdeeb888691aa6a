#pragma once

#include "opm/rational.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace opm {

// Multivariate Laurent polynomial with exact rational coefficients.
// Symbols are kept sorted; symbols that no longer occur are dropped after
// every operation, so two equal polynomials compare equal structurally.
// Negative exponents are only produced by inverting units (see is_unit).
class MPoly {
public:
    using Exponents = std::vector<int>;

    // graded lex, largest first
    struct GrlexGreater {
        bool operator()(const Exponents& a, const Exponents& b) const;
    };
    using Terms = std::map<Exponents, Rational, GrlexGreater>;

    MPoly() = default;
    MPoly(const Rational& c);
    MPoly(long c) : MPoly(Rational(c)) {}
    MPoly(int c) : MPoly(Rational(c)) {}

    static MPoly var(const std::string& name, int power = 1);

    const std::vector<std::string>& symbols() const { return syms_; }
    const Terms& terms() const { return terms_; }

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const { return syms_.empty(); }
    // throws if not constant
    Rational constant_value() const;
    Rational constant_term() const;
    bool depends_on(const std::string& sym) const;

    // A unit is c * prod E_k^{e_k} with c != 0 and every symbol an
    // exponential symbol (name starting with "E_").  Constants are units.
    bool is_unit() const;
    MPoly inverse_unit() const;

    int degree(const std::string& sym) const;     // max exponent, 0 if absent
    int min_degree(const std::string& sym) const; // min exponent, 0 if absent
    int total_degree() const;
    MPoly coeff(const std::string& sym, int k) const;

    MPoly substitute(const std::string& sym, const MPoly& value) const;
    MPoly substitute(const std::map<std::string, MPoly>& values) const;
    MPoly partial_eval(const std::map<std::string, Rational>& values) const;
    MPoly rename(const std::string& from, const std::string& to) const;
    MPoly pow(int k) const;

    Rational eval(const std::map<std::string, Rational>& b) const;
    double eval(const std::map<std::string, double>& b) const;

    std::string str() const;

    MPoly operator-() const;
    MPoly& operator+=(const MPoly& o);
    MPoly& operator-=(const MPoly& o);
    MPoly& operator*=(const MPoly& o);
    MPoly operator/(const Rational& c) const;

    friend MPoly operator+(MPoly a, const MPoly& b) { return a += b; }
    friend MPoly operator-(MPoly a, const MPoly& b) { return a -= b; }
    friend MPoly operator*(const MPoly& a, const MPoly& b);
    friend bool operator==(const MPoly& a, const MPoly& b)
    {
        return a.syms_ == b.syms_ && a.terms_ == b.terms_;
    }
    friend bool operator!=(const MPoly& a, const MPoly& b) { return !(a == b); }

private:
    std::vector<std::string> syms_;
    Terms terms_;

    void normalize();
    Terms remapped(const std::vector<std::string>& to) const;
};

bool is_exp_symbol(const std::string& sym);

} // namespace opm
