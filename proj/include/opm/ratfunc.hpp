#pragma once

#include "opm/errors.hpp"
#include "opm/mpoly.hpp"

#include <map>
#include <string>

namespace opm {

// Quotient of two MPolys.  No gcd is taken; equality is decided by
// cross-multiplication, which is all the symbolic checks need.
class RatFunc {
public:
    RatFunc() : num_(0), den_(1) {}
    RatFunc(const MPoly& n) : num_(n), den_(1) {}
    RatFunc(int c) : num_(c), den_(1) {}
    RatFunc(const Rational& c) : num_(c), den_(1) {}
    RatFunc(MPoly n, MPoly d) : num_(std::move(n)), den_(std::move(d))
    {
        if (den_.is_zero())
            throw ZeroDenominator("rational function with zero denominator");
    }

    const MPoly& num() const { return num_; }
    const MPoly& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }

    RatFunc operator-() const { return {-num_, den_}; }
    RatFunc& operator+=(const RatFunc& o)
    {
        if (den_ == o.den_)
            num_ += o.num_;
        else {
            num_ = num_ * o.den_ + o.num_ * den_;
            den_ *= o.den_;
        }
        return *this;
    }
    RatFunc& operator-=(const RatFunc& o) { return *this += -o; }
    RatFunc& operator*=(const RatFunc& o)
    {
        num_ *= o.num_;
        den_ *= o.den_;
        return *this;
    }
    RatFunc& operator/=(const RatFunc& o)
    {
        if (o.is_zero())
            throw DivisionByZero("rational function division by zero");
        num_ *= o.den_;
        den_ *= o.num_;
        return *this;
    }
    friend RatFunc operator+(RatFunc a, const RatFunc& b) { return a += b; }
    friend RatFunc operator-(RatFunc a, const RatFunc& b) { return a -= b; }
    friend RatFunc operator*(RatFunc a, const RatFunc& b) { return a *= b; }
    friend RatFunc operator/(RatFunc a, const RatFunc& b) { return a /= b; }
    friend bool operator==(const RatFunc& a, const RatFunc& b) { return a.num_ * b.den_ == b.num_ * a.den_; }
    friend bool operator!=(const RatFunc& a, const RatFunc& b) { return !(a == b); }

    double eval(const std::map<std::string, double>& b) const { return num_.eval(b) / den_.eval(b); }
    std::string str() const { return "(" + num_.str() + ")/(" + den_.str() + ")"; }

private:
    MPoly num_, den_;
};

inline bool is_zero(const RatFunc& r) { return r.is_zero(); }
inline bool is_zero(double d) { return d == 0.0; }

} // namespace opm
