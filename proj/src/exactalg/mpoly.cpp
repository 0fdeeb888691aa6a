#include "opm/mpoly.hpp"

#include "opm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace opm {

bool is_exp_symbol(const std::string& sym) { return sym.rfind("E_", 0) == 0; }

bool MPoly::GrlexGreater::operator()(const Exponents& a, const Exponents& b) const
{
    int da = std::accumulate(a.begin(), a.end(), 0);
    int db = std::accumulate(b.begin(), b.end(), 0);
    if (da != db)
        return da > db;
    return a > b;
}

MPoly::MPoly(const Rational& c)
{
    if (c != 0) {
        Rational v = c;
        v.canonicalize();
        terms_.emplace(Exponents{}, v);
    }
}

MPoly MPoly::var(const std::string& name, int power)
{
    MPoly p;
    if (power == 0) {
        p.terms_.emplace(Exponents{}, Rational(1));
        return p;
    }
    p.syms_ = {name};
    p.terms_.emplace(Exponents{power}, Rational(1));
    return p;
}

void MPoly::normalize()
{
    for (auto it = terms_.begin(); it != terms_.end();) {
        it->second.canonicalize();
        if (it->second == 0)
            it = terms_.erase(it);
        else
            ++it;
    }
    std::vector<bool> used(syms_.size(), false);
    for (const auto& [e, c] : terms_)
        for (std::size_t i = 0; i < e.size(); ++i)
            if (e[i] != 0)
                used[i] = true;
    if (std::all_of(used.begin(), used.end(), [](bool u) { return u; }))
        return;
    std::vector<std::string> keep;
    for (std::size_t i = 0; i < syms_.size(); ++i)
        if (used[i])
            keep.push_back(syms_[i]);
    terms_ = remapped(keep);
    syms_ = std::move(keep);
}

// Re-express exponent vectors over a different symbol list.  Symbols missing
// from `to` must have zero exponent.
MPoly::Terms MPoly::remapped(const std::vector<std::string>& to) const
{
    std::vector<int> where(syms_.size(), -1);
    for (std::size_t i = 0; i < syms_.size(); ++i) {
        auto it = std::lower_bound(to.begin(), to.end(), syms_[i]);
        if (it != to.end() && *it == syms_[i])
            where[i] = static_cast<int>(it - to.begin());
    }
    Terms out;
    for (const auto& [e, c] : terms_) {
        Exponents ne(to.size(), 0);
        for (std::size_t i = 0; i < e.size(); ++i)
            if (e[i] != 0)
                ne[static_cast<std::size_t>(where[i])] = e[i];
        out[ne] += c;
    }
    return out;
}

static std::vector<std::string> merged(const std::vector<std::string>& a, const std::vector<std::string>& b)
{
    std::vector<std::string> m;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(m));
    return m;
}

Rational MPoly::constant_value() const
{
    if (!is_constant())
        throw Error("polynomial is not constant: " + str());
    return constant_term();
}

Rational MPoly::constant_term() const
{
    auto it = terms_.find(Exponents(syms_.size(), 0));
    return it == terms_.end() ? Rational(0) : it->second;
}

bool MPoly::depends_on(const std::string& sym) const
{
    return std::binary_search(syms_.begin(), syms_.end(), sym);
}

bool MPoly::is_unit() const
{
    if (terms_.size() != 1)
        return false;
    return std::all_of(syms_.begin(), syms_.end(), is_exp_symbol);
}

MPoly MPoly::inverse_unit() const
{
    if (!is_unit())
        throw SingularDiagonal("no polynomial inverse for " + (is_zero() ? std::string("0") : str()));
    MPoly r;
    r.syms_ = syms_;
    const auto& [e, c] = *terms_.begin();
    Exponents ne(e.size());
    for (std::size_t i = 0; i < e.size(); ++i)
        ne[i] = -e[i];
    r.terms_.emplace(ne, Rational(1) / c);
    return r;
}

int MPoly::degree(const std::string& sym) const
{
    auto it = std::lower_bound(syms_.begin(), syms_.end(), sym);
    if (it == syms_.end() || *it != sym)
        return 0;
    std::size_t i = static_cast<std::size_t>(it - syms_.begin());
    int d = std::numeric_limits<int>::min();
    for (const auto& [e, c] : terms_)
        d = std::max(d, e[i]);
    return d;
}

int MPoly::min_degree(const std::string& sym) const
{
    auto it = std::lower_bound(syms_.begin(), syms_.end(), sym);
    if (it == syms_.end() || *it != sym)
        return 0;
    std::size_t i = static_cast<std::size_t>(it - syms_.begin());
    int d = std::numeric_limits<int>::max();
    for (const auto& [e, c] : terms_)
        d = std::min(d, e[i]);
    return d;
}

int MPoly::total_degree() const
{
    return terms_.empty() ? 0 : std::accumulate(terms_.begin()->first.begin(), terms_.begin()->first.end(), 0);
}

MPoly MPoly::coeff(const std::string& sym, int k) const
{
    auto it = std::lower_bound(syms_.begin(), syms_.end(), sym);
    if (it == syms_.end() || *it != sym)
        return k == 0 ? *this : MPoly();
    std::size_t i = static_cast<std::size_t>(it - syms_.begin());
    MPoly r;
    r.syms_ = syms_;
    for (const auto& [e, c] : terms_) {
        if (e[i] != k)
            continue;
        Exponents ne = e;
        ne[i] = 0;
        r.terms_.emplace(std::move(ne), c);
    }
    r.normalize();
    return r;
}

MPoly MPoly::substitute(const std::string& sym, const MPoly& value) const
{
    return substitute(std::map<std::string, MPoly>{{sym, value}});
}

MPoly MPoly::substitute(const std::map<std::string, MPoly>& values) const
{
    std::vector<const MPoly*> repl(syms_.size(), nullptr);
    bool any = false;
    for (std::size_t i = 0; i < syms_.size(); ++i) {
        auto it = values.find(syms_[i]);
        if (it != values.end()) {
            repl[i] = &it->second;
            any = true;
        }
    }
    if (!any)
        return *this;

    // cache powers per symbol
    std::vector<std::map<int, MPoly>> cache(syms_.size());
    auto power = [&](std::size_t i, int e) -> const MPoly& {
        auto f = cache[i].find(e);
        if (f != cache[i].end())
            return f->second;
        return cache[i].emplace(e, repl[i]->pow(e)).first->second;
    };

    MPoly out;
    for (const auto& [e, c] : terms_) {
        MPoly term;
        Exponents kept(syms_.size(), 0);
        for (std::size_t i = 0; i < e.size(); ++i)
            if (!repl[i])
                kept[i] = e[i];
        term.syms_ = syms_;
        term.terms_.emplace(kept, c);
        term.normalize();
        for (std::size_t i = 0; i < e.size(); ++i)
            if (repl[i] && e[i] != 0)
                term *= power(i, e[i]);
        out += term;
    }
    return out;
}

MPoly MPoly::partial_eval(const std::map<std::string, Rational>& values) const
{
    std::map<std::string, MPoly> m;
    for (const auto& [k, v] : values)
        if (depends_on(k))
            m.emplace(k, MPoly(v));
    return m.empty() ? *this : substitute(m);
}

MPoly MPoly::rename(const std::string& from, const std::string& to) const
{
    if (!depends_on(from) || from == to)
        return *this;
    return substitute(from, MPoly::var(to));
}

MPoly MPoly::pow(int k) const
{
    if (k < 0)
        return inverse_unit().pow(-k);
    MPoly result(Rational(1));
    MPoly base = *this;
    while (k > 0) {
        if (k & 1)
            result *= base;
        k >>= 1;
        if (k)
            base *= base;
    }
    return result;
}

Rational MPoly::eval(const std::map<std::string, Rational>& b) const
{
    std::vector<const Rational*> vals(syms_.size());
    for (std::size_t i = 0; i < syms_.size(); ++i) {
        auto it = b.find(syms_[i]);
        if (it == b.end())
            throw UnboundSymbol(syms_[i]);
        vals[i] = &it->second;
    }
    Rational sum = 0;
    for (const auto& [e, c] : terms_) {
        Rational term = c;
        for (std::size_t i = 0; i < e.size(); ++i) {
            if (e[i] == 0)
                continue;
            Rational p;
            mpz_pow_ui(p.get_num_mpz_t(), vals[i]->get_num_mpz_t(), static_cast<unsigned long>(std::abs(e[i])));
            mpz_pow_ui(p.get_den_mpz_t(), vals[i]->get_den_mpz_t(), static_cast<unsigned long>(std::abs(e[i])));
            if (e[i] < 0) {
                if (p == 0)
                    throw DivisionByZero("symbol " + syms_[i] + " bound to 0 under a negative power");
                p = Rational(1) / p;
            }
            term *= p;
        }
        sum += term;
    }
    return sum;
}

double MPoly::eval(const std::map<std::string, double>& b) const
{
    std::vector<double> vals(syms_.size());
    for (std::size_t i = 0; i < syms_.size(); ++i) {
        auto it = b.find(syms_[i]);
        if (it == b.end())
            throw UnboundSymbol(syms_[i]);
        vals[i] = it->second;
    }
    double sum = 0;
    for (const auto& [e, c] : terms_) {
        double term = c.get_d();
        for (std::size_t i = 0; i < e.size(); ++i)
            if (e[i] != 0)
                term *= std::pow(vals[i], e[i]);
        sum += term;
    }
    return sum;
}

std::string MPoly::str() const
{
    if (terms_.empty())
        return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : terms_) {
        Rational mag = abs(c);
        bool neg = c < 0;
        if (first)
            os << (neg ? "-" : "");
        else
            os << (neg ? " - " : " + ");
        first = false;
        bool has_vars = std::any_of(e.begin(), e.end(), [](int x) { return x != 0; });
        bool wrote = false;
        if (mag != 1 || !has_vars) {
            os << mag.get_str();
            wrote = true;
        }
        for (std::size_t i = 0; i < e.size(); ++i) {
            if (e[i] == 0)
                continue;
            if (wrote)
                os << '*';
            os << syms_[i];
            if (e[i] != 1)
                os << '^' << (e[i] < 0 ? "(" + std::to_string(e[i]) + ")" : std::to_string(e[i]));
            wrote = true;
        }
    }
    return os.str();
}

MPoly MPoly::operator-() const
{
    MPoly r = *this;
    for (auto& [e, c] : r.terms_)
        c = -c;
    return r;
}

MPoly& MPoly::operator+=(const MPoly& o)
{
    if (o.is_zero())
        return *this;
    if (syms_ != o.syms_) {
        auto m = merged(syms_, o.syms_);
        terms_ = remapped(m);
        syms_ = m;
        for (const auto& [e, c] : o.remapped(m))
            terms_[e] += c;
    } else {
        for (const auto& [e, c] : o.terms_)
            terms_[e] += c;
    }
    normalize();
    return *this;
}

MPoly& MPoly::operator-=(const MPoly& o) { return *this += -o; }

MPoly operator*(const MPoly& a, const MPoly& b)
{
    MPoly r;
    if (a.is_zero() || b.is_zero())
        return r;
    r.syms_ = merged(a.syms_, b.syms_);
    MPoly::Terms ta = a.syms_ == r.syms_ ? a.terms_ : a.remapped(r.syms_);
    MPoly::Terms tb = b.syms_ == r.syms_ ? b.terms_ : b.remapped(r.syms_);
    for (const auto& [ea, ca] : ta)
        for (const auto& [eb, cb] : tb) {
            MPoly::Exponents e(ea.size());
            for (std::size_t i = 0; i < e.size(); ++i)
                e[i] = ea[i] + eb[i];
            r.terms_[e] += ca * cb;
        }
    r.normalize();
    return r;
}

MPoly& MPoly::operator*=(const MPoly& o)
{
    *this = *this * o;
    return *this;
}

MPoly MPoly::operator/(const Rational& c) const
{
    if (c == 0)
        throw DivisionByZero("MPoly / 0");
    MPoly r = *this;
    for (auto& [e, v] : r.terms_)
        v /= c;
    return r;
}

} // namespace opm
