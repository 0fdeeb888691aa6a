#include "opm/orthopoly.hpp"

#include "opm/errors.hpp"
#include "opm/qcalc.hpp"

#include <mutex>

namespace opm {

struct Sequence::State {
    Fn fn;
    std::mutex mu;
    std::vector<std::optional<MPoly>> cache;
};

Sequence::Sequence() : Sequence([](int) { return MPoly(); }) {}

Sequence::Sequence(Fn f) : st_(std::make_shared<State>())
{
    st_->fn = std::move(f);
}

MPoly Sequence::operator()(int n) const
{
    if (n < 0)
        return MPoly();
    std::size_t i = static_cast<std::size_t>(n);
    {
        std::lock_guard<std::mutex> lock(st_->mu);
        if (i < st_->cache.size() && st_->cache[i])
            return *st_->cache[i];
    }
    // computed outside the lock so closures may recurse into other sequences
    MPoly v = st_->fn(n);
    std::lock_guard<std::mutex> lock(st_->mu);
    if (i >= st_->cache.size())
        st_->cache.resize(i + 1);
    st_->cache[i] = v;
    return v;
}

std::string to_string(FamilyName f)
{
    switch (f) {
    case FamilyName::qHermite: return "qHermite";
    case FamilyName::AlSalamChihara: return "AlSalamChihara";
    case FamilyName::Charlier: return "Charlier";
    case FamilyName::HermiteProb: return "HermiteProb";
    case FamilyName::ChebyshevU: return "ChebyshevU";
    case FamilyName::custom: return "custom";
    }
    return "?";
}

MPoly param(const std::map<std::string, Rational>& params, const std::string& name)
{
    auto it = params.find(name);
    return it == params.end() ? MPoly::var(name) : MPoly(it->second);
}

namespace {

std::map<std::string, Rational> bind(std::initializer_list<std::pair<const char*, std::optional<Rational>>> ps)
{
    std::map<std::string, Rational> m;
    for (const auto& [k, v] : ps)
        if (v)
            m.emplace(k, *v);
    return m;
}

Sequence constant(MPoly c)
{
    return Sequence([c](int) { return c; });
}

} // namespace

PolyFamily q_hermite(std::optional<Rational> q)
{
    PolyFamily f;
    f.name = FamilyName::qHermite;
    f.params = bind({{"q", q}});
    MPoly qq = param(f.params, "q");
    f.rec.alpha = constant(1);
    f.rec.beta = constant(0);
    f.rec.gamma = Sequence([qq](int n) { return q_int(n + 1, qq); });
    return f;
}

PolyFamily hermite_prob()
{
    PolyFamily f;
    f.name = FamilyName::HermiteProb;
    f.rec.alpha = constant(1);
    f.rec.beta = constant(0);
    f.rec.gamma = Sequence([](int n) { return MPoly(n + 1); });
    return f;
}

PolyFamily chebyshev_u()
{
    PolyFamily f;
    f.name = FamilyName::ChebyshevU;
    f.rec.alpha = constant(1);
    f.rec.beta = constant(0);
    f.rec.gamma = constant(1);
    return f;
}

PolyFamily al_salam_chihara(std::optional<Rational> q, std::optional<Rational> rho, std::optional<Rational> y)
{
    PolyFamily f;
    f.name = FamilyName::AlSalamChihara;
    f.params = bind({{"q", q}, {"rho", rho}, {"y", y}});
    MPoly qq = param(f.params, "q"), r = param(f.params, "rho"), yy = param(f.params, "y");
    f.rec.alpha = constant(1);
    f.rec.beta = Sequence([=](int n) { return r * yy * qq.pow(n); });
    // gamma_{n-1} = (1 - rho^2 q^{n-1}) [n]_q
    f.rec.gamma = Sequence([=](int m) { return (MPoly(1) - r * r * qq.pow(m)) * q_int(m + 1, qq); });
    return f;
}

PolyFamily charlier(std::optional<Rational> mu)
{
    PolyFamily f;
    f.name = FamilyName::Charlier;
    f.params = bind({{"mu", mu}});
    MPoly mt = param(f.params, "mu") * MPoly::var("t");
    f.rec.alpha = constant(1);
    f.rec.beta = Sequence([mt](int n) { return MPoly(n) + mt; });
    f.rec.gamma = Sequence([mt](int m) { return MPoly(m + 1) * mt; });
    return f;
}

PolyFamily q_wiener_family(std::optional<Rational> q)
{
    PolyFamily f = q_hermite(q);
    MPoly qq = param(f.params, "q"), t = MPoly::var("t");
    f.rec.gamma = Sequence([qq, t](int m) { return t * q_int(m + 1, qq); });
    return f;
}

PolyFamily ou_family(std::optional<Rational> q)
{
    PolyFamily f = q_hermite(q);
    MPoly qq = param(f.params, "q"), e = MPoly::var("E_t");
    f.rec.alpha = constant(e.inverse_unit());
    f.rec.gamma = Sequence([qq, e](int m) { return e * q_int(m + 1, qq); });
    return f;
}

PolyFamily custom_family(Recurrence rec, bool known_norms)
{
    PolyFamily f;
    f.name = FamilyName::custom;
    f.rec = std::move(rec);
    f.known_norms = known_norms;
    return f;
}

std::vector<MPoly> generate(const PolyFamily& family, int n_max) { return generate(family.rec, n_max); }

std::vector<MPoly> generate(const Recurrence& rec, int n_max)
{
    std::vector<MPoly> p;
    p.reserve(static_cast<std::size_t>(n_max + 1));
    p.emplace_back(1);
    MPoly x = MPoly::var(rec.var);
    for (int n = 0; n < n_max; ++n) {
        const MPoly& pn = p.back();
        MPoly next = (x - rec.beta(n)) * pn;
        if (n >= 1)
            next -= rec.gamma(n - 1) * p[static_cast<std::size_t>(n - 1)];
        MPoly a = rec.alpha(n + 1);
        if (a.is_zero())
            throw SingularDiagonal("alpha_" + std::to_string(n + 1) + " is zero");
        p.push_back(next * a.inverse_unit());
    }
    return p;
}

TriMatrix coeff_matrix(const std::vector<MPoly>& polys, const std::string& var)
{
    const std::size_t n = polys.size();
    TriMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        const MPoly& p = polys[i];
        if (p.is_zero() || p.degree(var) != static_cast<int>(i) || p.min_degree(var) < 0)
            throw DegreeMismatch("polynomial " + std::to_string(i) + " has degree " +
                                 std::to_string(p.is_zero() ? -1 : p.degree(var)) + " in " + var);
        for (std::size_t j = 0; j <= i; ++j)
            m.set(i, j, p.coeff(var, static_cast<int>(j)));
    }
    return m;
}

LinearCoeffs linear_product_coeffs(const Recurrence& rec, int n)
{
    MPoly inv_a1 = rec.alpha(1).inverse_unit();
    LinearCoeffs c;
    c.v1 = rec.alpha(n + 1) * inv_a1;
    c.v0 = rec.beta(n) * inv_a1;
    c.v0_centered = (rec.beta(n) - rec.beta(0)) * inv_a1;
    c.vm1 = rec.gamma(n - 1) * inv_a1;
    return c;
}

QuadraticCoeffs quadratic_product_coeffs(const Recurrence& rec, int n)
{
    MPoly inv_a1 = rec.alpha(1).inverse_unit();
    MPoly inv_a2 = rec.alpha(2).inverse_unit();
    MPoly k = rec.alpha(1) * inv_a2;                  // alpha_1 / alpha_2
    MPoly db = (rec.beta(1) - rec.beta(0)) * inv_a2;  // (beta_1 - beta_0) / alpha_2
    MPoly g0 = rec.gamma(0) * inv_a2;                 // gamma_0 / alpha_2

    auto v1 = [&](int m) { return m >= 1 ? rec.alpha(m) * inv_a1 : MPoly(); };      // v_{1,m}
    auto v0 = [&](int m) { return m >= 0 ? (rec.beta(m) - rec.beta(0)) * inv_a1 : MPoly(); };
    auto vm = [&](int m) { return rec.gamma(m) * inv_a1; };                         // v_{-1,m}

    QuadraticCoeffs r;
    r.r2 = k * v1(n + 1) * v1(n + 2);
    r.r1 = v1(n + 1) * (k * (v0(n + 1) + v0(n)) - db);
    r.r0 = k * (v1(n + 1) * vm(n) + v0(n) * v0(n) + vm(n - 1) * v1(n)) - db * v0(n) - g0;
    r.rm1 = k * vm(n - 1) * (v0(n) + v0(n - 1)) - db * vm(n - 1);
    r.rm2 = k * vm(n - 1) * vm(n - 2);
    return r;
}

NormSequence norms(const PolyFamily& family, int n_max)
{
    if (!family.known_norms)
        throw UnknownNorms("family '" + to_string(family.name) + "' has no known orthogonality measure");
    NormSequence ns;
    ns.phat.emplace_back(1);
    for (int n = 1; n <= n_max; ++n)
        ns.phat.push_back(ns.phat.back() * family.rec.gamma(n - 1) * family.rec.alpha(n).inverse_unit());
    return ns;
}

NumRecurrence eval_recurrence(const Recurrence& rec, const std::map<std::string, double>& b, int n_max)
{
    NumRecurrence r;
    r.alpha.resize(static_cast<std::size_t>(n_max + 2));
    r.beta.resize(static_cast<std::size_t>(n_max + 2));
    r.gamma.resize(static_cast<std::size_t>(n_max + 2));
    for (int n = 0; n <= n_max + 1; ++n) {
        std::size_t i = static_cast<std::size_t>(n);
        r.alpha[i] = n >= 1 ? rec.alpha(n).eval(b) : 0.0;
        r.beta[i] = rec.beta(n).eval(b);
        r.gamma[i] = rec.gamma(n).eval(b);
    }
    return r;
}

std::vector<double> eval_polys(const NumRecurrence& r, double x, int n_max)
{
    std::vector<double> p(static_cast<std::size_t>(n_max + 1));
    p[0] = 1.0;
    double prev = 0.0;
    for (int n = 0; n < n_max; ++n) {
        std::size_t i = static_cast<std::size_t>(n);
        double g = n >= 1 ? r.gamma[i - 1] : 0.0;
        double next = ((x - r.beta[i]) * p[i] - g * prev) / r.alpha[i + 1];
        prev = p[i];
        p[i + 1] = next;
    }
    return p;
}

} // namespace opm
