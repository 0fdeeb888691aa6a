#include "opm/harness.hpp"

#include "opm/qcalc.hpp"

#include <cmath>
#include <set>

namespace opm {

HarnessParamsT<RatFunc> to_ratfunc(const HarnessParams& hp)
{
    return hp.map<RatFunc>([](const MPoly& p) { return RatFunc(p); });
}

HarnessParamsT<double> to_numeric(const HarnessParams& hp, const std::map<std::string, double>& b)
{
    return hp.map<double>([&](const MPoly& p) { return p.eval(b); });
}

HarnessParams harness_params(const SequenceParams& sp)
{
    return {sp.a(2), sp.a_hat(2), sp.b(1), sp.b_hat(1), sp.c(1), sp.c_hat(1)};
}

SequenceParams make_sequences(std::function<MPoly(int)> a, std::function<MPoly(int)> a_hat,
                              std::function<MPoly(int)> b, std::function<MPoly(int)> b_hat,
                              std::function<MPoly(int)> c, std::function<MPoly(int)> c_hat)
{
    SequenceParams sp;
    sp.a = Sequence([a](int n) { return n == 0 ? MPoly() : n == 1 ? MPoly(1) : a(n); });
    sp.a_hat = Sequence([a_hat](int n) { return n <= 1 ? MPoly() : a_hat(n); });
    sp.b = Sequence([b](int n) { return n == 0 ? MPoly() : b(n); });
    sp.b_hat = Sequence([b_hat](int n) { return n == 0 ? MPoly() : b_hat(n); });
    sp.c = Sequence([c](int n) { return n == 0 ? MPoly() : c(n); });
    sp.c_hat = Sequence([c_hat](int n) { return n == 0 ? MPoly(1) : c_hat(n); });
    return sp;
}

SequenceParams q_hermite_sequences(std::optional<Rational> q)
{
    MPoly qq = q ? MPoly(*q) : MPoly::var("q");
    auto zero = [](int) { return MPoly(); };
    return make_sequences([](int) { return MPoly(1); }, zero, zero, zero, zero,
                          [qq](int n) { return q_int(n + 1, qq); });
}

SequenceParams poisson_sequences()
{
    auto zero = [](int) { return MPoly(); };
    return make_sequences([](int) { return MPoly(1); }, zero, [](int n) { return MPoly(n); }, zero, zero,
                          [](int n) { return MPoly(n + 1); });
}

Recurrence build_recurrence(const SequenceParams& sp, const MPoly& alpha1, const MPoly& beta0, const MPoly& gamma0,
                            const std::string& var)
{
    Recurrence r;
    r.var = var;
    r.alpha = Sequence([=](int n) { return n == 0 ? MPoly() : sp.a(n) * alpha1 + sp.a_hat(n) * gamma0; });
    r.beta = Sequence([=](int n) { return beta0 + sp.b(n) * alpha1 + sp.b_hat(n) * gamma0; });
    r.gamma = Sequence([=](int n) { return sp.c(n) * alpha1 + sp.c_hat(n) * gamma0; });
    return r;
}

namespace {

using Point = std::map<std::string, MPoly>;

MPoly at(const MPoly& p, const Point& pt) { return p.substitute(pt); }

// p / m for a single-term m, provided no negative power of an ordinary
// symbol is left behind
std::optional<MPoly> divide_by_monomial(const MPoly& p, const MPoly& m)
{
    if (m.terms().size() != 1)
        return std::nullopt;
    const auto& [e, c] = *m.terms().begin();
    MPoly inv(Rational(1) / c);
    for (std::size_t i = 0; i < e.size(); ++i)
        inv *= MPoly::var(m.symbols()[i], -e[i]);
    MPoly r = p * inv;
    for (const auto& s : r.symbols())
        if (!is_exp_symbol(s) && r.min_degree(s) < 0)
            return std::nullopt;
    return r;
}

struct Decomposer {
    MPoly alpha1, gamma0;
    Point p1, p2;
    MPoly det;

    explicit Decomposer(const Recurrence& rec) : alpha1(rec.alpha(1)), gamma0(rec.gamma(0))
    {
        // (t, E_t) sample values; E_t is treated as an independent symbol
        const std::vector<std::pair<int, int>> pts = {{1, 2}, {2, 5}, {3, 7}, {5, 3}, {7, 11}, {4, 13}};
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (std::size_t j = i + 1; j < pts.size(); ++j) {
                Point a{{"t", MPoly(pts[i].first)}, {"E_t", MPoly(pts[i].second)}};
                Point b{{"t", MPoly(pts[j].first)}, {"E_t", MPoly(pts[j].second)}};
                MPoly d = at(alpha1, a) * at(gamma0, b) - at(alpha1, b) * at(gamma0, a);
                if (!d.is_zero() && d.terms().size() == 1) {
                    p1 = a;
                    p2 = b;
                    det = d;
                    return;
                }
            }
        // alpha_1 and gamma_0 proportional as functions of time
        throw NonUniqueDecomposition("alpha_1 = " + alpha1.str() + " and gamma_0 = " + gamma0.str() +
                                     " are not linearly independent");
    }

    // (x, y) with f = x alpha_1 + y gamma_0, or the residual
    std::pair<std::pair<MPoly, MPoly>, MPoly> solve(const MPoly& f) const
    {
        MPoly nx = at(f, p1) * at(gamma0, p2) - at(f, p2) * at(gamma0, p1);
        MPoly ny = at(alpha1, p1) * at(f, p2) - at(alpha1, p2) * at(f, p1);
        auto x = divide_by_monomial(nx, det), y = divide_by_monomial(ny, det);
        if (!x || !y)
            return {{MPoly(), MPoly()}, f};
        return {{*x, *y}, f - (*x * alpha1 + *y * gamma0)};
    }
};

struct Extracted {
    SequenceParams sp;
    std::optional<NotAHarnessInfo> failure;
};

Extracted extract(const Recurrence& rec, int n_max)
{
    auto dec = std::make_shared<Decomposer>(rec);
    Recurrence r = rec;
    auto fit = [dec, r](const std::string& which, int n) -> std::pair<MPoly, MPoly> {
        MPoly f = which == "alpha" ? r.alpha(n) : which == "beta" ? r.beta(n) - r.beta(0) : r.gamma(n);
        auto [xy, res] = dec->solve(f);
        if (!res.is_zero())
            throw NotAHarness(which + "_" + std::to_string(n) + " is not a combination of alpha_1 and gamma_0; residual " +
                              res.str());
        return xy;
    };
    // indices past n_max are fitted (and checked) on demand
    Extracted e;
    auto seq = [fit](const std::string& which, bool second) {
        return [fit, which, second](int n) {
            auto xy = fit(which, n);
            return second ? xy.second : xy.first;
        };
    };
    e.sp = make_sequences(seq("alpha", false), seq("alpha", true), seq("beta", false), seq("beta", true),
                          seq("gamma", false), seq("gamma", true));
    for (int n = 0; n <= n_max && !e.failure; ++n)
        for (const char* which : {"alpha", "beta", "gamma"}) {
            if (std::string(which) == "alpha" && n == 0)
                continue;
            MPoly f = std::string(which) == "alpha" ? rec.alpha(n)
                      : std::string(which) == "beta" ? rec.beta(n) - rec.beta(0)
                                                     : rec.gamma(n);
            MPoly res = dec->solve(f).second;
            if (!res.is_zero()) {
                e.failure = NotAHarnessInfo{which, n, res};
                break;
            }
        }
    return e;
}

} // namespace

SequenceParams extract_harness_params(const Recurrence& rec, int n_max)
{
    Extracted e = extract(rec, n_max);
    if (e.failure)
        throw NotAHarness(e.failure->coefficient + "_" + std::to_string(e.failure->n) +
                          " is not a combination of alpha_1 and gamma_0; residual " + e.failure->residual.str());
    return e.sp;
}

std::optional<NotAHarnessInfo> harness_failure(const Recurrence& rec, int n_max)
{
    return extract(rec, n_max).failure;
}

double phat2(const HarnessParamsT<double>& hp, double phat)
{
    return phat * (hp.c + hp.c_hat * phat) / (hp.a + hp.a_hat * phat);
}

std::pair<MPoly, MPoly> qh_equation(int eq, const SequenceParams& sp, const HarnessParams& hp, int n)
{
    const MPoly &a = hp.a, &ah = hp.a_hat, &b = hp.b, &bh = hp.b_hat, &c = hp.c, &ch = hp.c_hat;
    const MPoly k = hp.kappa(), l = hp.lambda(), kl = k - l;
    auto A = [&](int i) { return sp.a(i); };
    auto Ah = [&](int i) { return sp.a_hat(i); };
    auto B = [&](int i) { return sp.b(i); };
    auto Bh = [&](int i) { return sp.b_hat(i); };
    auto C = [&](int i) { return sp.c(i); };
    auto Ch = [&](int i) { return sp.c_hat(i); };
    switch (eq) {
    case 1:
        return {k * (ah * ch * A(n + 1) * A(n + 2) + Ah(n + 1) * Ah(n + 2) * a * c - a * ch * A(n + 1) * Ah(n + 2)),
                kl * a * ch * Ah(n + 1) * A(n + 2)};
    case 2:
        return {k * (ah * ch * C(n - 2) * C(n - 1) - a * ch * Ch(n - 2) * C(n - 1) + a * c * Ch(n - 2) * Ch(n - 1)),
                kl * a * ch * C(n - 2) * Ch(n - 1)};
    case 3:
        return {k * (a * c * Ah(n + 1) * (Bh(n + 1) + Bh(n)) + ah * ch * A(n + 1) * (B(n + 1) + B(n)) -
                     (bh * c - b * ch) * a * Ah(n + 1) - (ah * b - a * bh) * ch * A(n + 1)),
                a * ch * (kl * (Ah(n + 1) * B(n + 1) + A(n + 1) * Bh(n)) + k * (A(n + 1) * Bh(n + 1) + Ah(n + 1) * B(n)))};
    case 4:
        return {k * (ah * ch * C(n - 1) * (B(n) + B(n - 1)) + a * c * Ch(n - 1) * (Bh(n) + Bh(n - 1)) -
                     (bh * c - b * ch) * a * Ch(n - 1) - (ah * b - a * bh) * ch * C(n - 1)),
                a * ch * (kl * (C(n - 1) * Bh(n) + Ch(n - 1) * B(n - 1)) + k * (Ch(n - 1) * B(n) + C(n - 1) * Bh(n - 1)))};
    case 5:
        return {k * (a * c * (Ah(n + 1) * Ch(n) + Ah(n) * Ch(n - 1) + Bh(n) * (Bh(n) - bh)) +
                     ah * ch * (A(n + 1) * C(n) + A(n) * C(n - 1) + B(n) * (B(n) - b)) + a * ch),
                a * ch *
                    (kl * (Ah(n + 1) * C(n) + A(n) * Ch(n - 1) + B(n) * Bh(n)) +
                     k * (A(n + 1) * Ch(n) + Ah(n) * C(n - 1) - b * bh + (B(n) - b) * (Bh(n) - bh)))};
    default:
        throw ConfigError("no equation e" + std::to_string(eq));
    }
}

SystemCheck qh_system_check(const SequenceParams& sp, const HarnessParams& hp, int n_max,
                            const std::vector<double>& phat_samples)
{
    SystemCheck r;
    HarnessParams init = harness_params(sp);
    const std::pair<const char*, std::pair<MPoly, MPoly>> inits[] = {
        {"a", {hp.a, init.a}},         {"a_hat", {hp.a_hat, init.a_hat}}, {"b", {hp.b, init.b}},
        {"b_hat", {hp.b_hat, init.b_hat}}, {"c", {hp.c, init.c}},         {"c_hat", {hp.c_hat, init.c_hat}}};
    for (const auto& [name, v] : inits)
        if (v.first != v.second)
            r.violations.push_back({std::string("init:") + name, 0, v.first, v.second});

    for (int n = 0; n <= n_max; ++n)
        for (int eq = 1; eq <= 5; ++eq) {
            auto [lhs, rhs] = qh_equation(eq, sp, hp, n);
            if (lhs != rhs)
                r.violations.push_back({"e" + std::to_string(eq), n, lhs, rhs});
        }

    // Favard positivity
    std::vector<MPoly> factors;
    for (int n = 1; n <= n_max + 1; ++n) {
        factors.push_back(sp.a(n));
        factors.push_back(sp.a_hat(n));
        factors.push_back(sp.c(n - 1));
        factors.push_back(sp.c_hat(n - 1));
    }
    std::set<std::string> free;
    for (const auto& f : factors)
        free.insert(f.symbols().begin(), f.symbols().end());
    r.positivity_checked = free.empty() || (free.size() == 1 && *free.begin() == "q");
    if (r.positivity_checked) {
        std::vector<double> qs = free.empty() ? std::vector<double>{0.0} : std::vector<double>{-0.5, 0.0, 0.5, 0.9, 1.0};
        for (double q : qs)
            for (double p : phat_samples)
                for (int n = 1; n <= n_max + 1 && r.positive; ++n) {
                    std::map<std::string, double> b{{"q", q}};
                    double v = (sp.a(n).eval(b) + sp.a_hat(n).eval(b) * p) *
                               (sp.c(n - 1).eval(b) + sp.c_hat(n - 1).eval(b) * p);
                    if (!(v > 0.0)) {
                        r.positive = false;
                        r.positivity_witness = std::pair{n, p};
                    }
                }
    }
    r.ok = r.violations.empty() && r.positive;
    return r;
}

BrycMap bryc_map(const HarnessParams& hp, const MPoly& phat)
{
    if (phat != MPoly::var("t"))
        throw NotNormalized("bryc_map needs phat(t) = t, got " + phat.str());
    if (hp.a.is_zero())
        throw DivisionByZero("a = 0");
    if (hp.c_hat.is_zero())
        throw DivisionByZero("c_hat = 0");
    if (hp.kappa().is_zero())
        throw DivisionByZero("kappa = 0");
    BrycMap m;
    m.sigma = RatFunc(hp.a_hat, hp.a);
    m.tau = RatFunc(hp.c, hp.c_hat);
    m.q_bmw = RatFunc(hp.lambda() - hp.kappa(), hp.kappa());
    m.eta = RatFunc(hp.b_hat) - m.sigma * RatFunc(hp.b);
    m.theta = RatFunc(hp.b) - m.tau * RatFunc(hp.b_hat);
    auto numeric = [](const RatFunc& r) { return r.num().is_constant() && r.den().is_constant(); };
    if (numeric(m.sigma) && numeric(m.tau) && numeric(m.q_bmw)) {
        double st = m.sigma.eval({}) * m.tau.eval({});
        if (st >= 0.0)
            m.constraint_ok = m.q_bmw.eval({}) <= 1.0 + 2.0 * std::sqrt(st) + 1e-15;
    }
    return m;
}

double fun_eq_property(const std::function<double(double)>& f, const std::function<double(double)>& g,
                       const std::vector<std::array<double, 3>>& triples)
{
    double worst = 0.0;
    for (const auto& [s, t, u] : triples) {
        double gs = g(s), gt = g(t), gu = g(u);
        double pred = ((gu - gt) * f(s) + (gt - gs) * f(u)) / (gu - gs);
        worst = std::max(worst, std::abs(f(t) - pred));
    }
    return worst;
}

} // namespace opm
