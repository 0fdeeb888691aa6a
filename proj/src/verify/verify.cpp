#include "opm/verify.hpp"

#include "opm/harness.hpp"
#include "opm/qcalc.hpp"
#include "opm/qdensity.hpp"
#include "opm/simulate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

namespace opm {

namespace {

MPoly Q() { return MPoly::var("q"); }
MPoly T() { return MPoly::var("t"); }

TriMatrix from_rows(const std::vector<std::vector<MPoly>>& rows)
{
    TriMatrix m(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            m.set(i, j, rows[i][j]);
    return m;
}

// Collects failures; a criterion passes when nothing was recorded.
struct Log {
    std::vector<std::string> failures;
    std::vector<std::string> notes;

    void require(bool ok, const std::string& what)
    {
        if (!ok)
            failures.push_back(what);
    }
    void note(const std::string& s) { notes.push_back(s); }

    std::string join() const
    {
        std::ostringstream os;
        const auto& list = failures.empty() ? notes : failures;
        for (std::size_t i = 0; i < list.size() && i < 8; ++i)
            os << (i ? "; " : "") << list[i];
        if (list.size() > 8)
            os << "; ... " << list.size() - 8 << " more";
        return os.str();
    }
};

std::string fmt(double v)
{
    std::ostringstream os;
    os.precision(3);
    os << v;
    return os.str();
}

template <class F>
double timed(F&& f)
{
    auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---- 1: golden structural tables

void c1_golden(Log& log)
{
    double secs = timed([&] {
        TriMatrix v = structural_matrix(q_wiener(), 5).V;
        TriMatrix g = golden_qwiener_v6();
        int equal = 0;
        for (std::size_t i = 0; i < 6; ++i)
            for (std::size_t j = 0; j < 6; ++j)
                if (v(i, j) == g(i, j))
                    ++equal;
                else
                    log.require(false, "q-Wiener v_{" + std::to_string(i) + "," + std::to_string(j) + "} = " +
                                           v(i, j).str() + ", table " + g(i, j).str());
        log.require(v(5, 1) == T().pow(2) * (MPoly(5) + 6 * Q() + 3 * Q().pow(2) + Q().pow(3)), "v_{5,1}");

        auto sm = structural_matrix(alpha_q_ou(), 5);
        auto form = stationary_form_check(sm);
        log.require(form.holds, "OU matrix is not K diag(E_t^{-k})");
        TriMatrix k = golden_ou_k6();
        for (std::size_t i = 0; i < 6; ++i)
            for (std::size_t j = 0; j < 6; ++j)
                if (form.D(i, j) == k(i, j))
                    ++equal;
                else
                    log.require(false, "OU k_{" + std::to_string(i) + "," + std::to_string(j) + "}");
        std::vector<MPoly> d;
        for (int j = 0; j < 6; ++j)
            d.push_back(MPoly::var("E_t").pow(-j));
        log.require(sm.V == tri_mul(k, TriMatrix::diagonal(d)), "OU V(t) != K diag(E_t^{-k})");
        log.note(std::to_string(equal) + "/72 entries equal (q-Wiener V_6 and OU factor K), v_{5,1} = " +
                 v(5, 1).str());
    });
    log.require(secs < 5.0, "runtime " + fmt(secs) + " s >= 5 s");
    log.note("runtime " + fmt(secs) + " s");
}

// ---- 2: semigroup

void c2_semigroup(Log& log)
{
    double secs = timed([&] {
        for (const auto& spec : {q_wiener(), alpha_q_ou(), poisson()}) {
            auto v = structural_matrix(spec, 6);
            auto ast = regression_matrix(v, "s", "t");
            auto atu = regression_matrix(v, "t", "u");
            auto asu = regression_matrix(v, "s", "u");
            log.require(tri_mul(atu, ast) == asu, to_string(spec.name) + ": A(t,u)A(s,t) != A(s,u)");
            log.require(regression_matrix(v, "s", "s") == TriMatrix::identity(7), to_string(spec.name) + ": A(s,s) != I");
        }
    });
    log.require(secs < 10.0, "runtime " + fmt(secs) + " s >= 10 s");
    log.note("exact for q-Wiener, (alpha,q)-OU, Poisson at n = 6; runtime " + fmt(secs) + " s");
}

// ---- 3: OPM diagonal

void c3_opm(Log& log)
{
    auto w = opm_check(q_wiener(), 4);
    log.require(w.diagonal, "q-Wiener G not diagonal");
    for (int k = 0; k <= 4; ++k)
        log.require(w.P[static_cast<std::size_t>(k)] == T().pow(k) * q_factorial(k, Q()),
                    "q-Wiener P_" + std::to_string(k) + " = " + w.P[static_cast<std::size_t>(k)].str());
    auto o = opm_check(alpha_q_ou(), 4);
    log.require(o.diagonal, "OU G not diagonal");
    for (int k = 0; k <= 4; ++k)
        log.require(o.P[static_cast<std::size_t>(k)] == MPoly::var("E_t").pow(2 * k) * q_factorial(k, Q()),
                    "OU P_" + std::to_string(k) + " = " + o.P[static_cast<std::size_t>(k)].str());
    log.note("diag = t^k [k]_q! and E_t^{2k} [k]_q!, k <= 4");
}

// ---- 4: independence dichotomy

void c4_independence(Log& log)
{
    auto one = independent_increments_check(structural_matrix(q_wiener(Rational(1)), 6));
    log.require(one.independent, "q = 1 reported dependent");
    std::vector<std::pair<std::string, ProcessSpec>> cases = {
        {"0", q_wiener(Rational(0))}, {"1/2", q_wiener(Rational(1, 2))}, {"q", q_wiener()}};
    std::string first;
    for (const auto& [label, spec] : cases) {
        auto r = independent_increments_check(structural_matrix(spec, 6));
        log.require(!r.independent, "q = " + label + " reported independent");
        bool has42 = std::find(r.violations.begin(), r.violations.end(), std::pair{4, 2}) != r.violations.end();
        log.require(has42, "q = " + label + ": v_{4,2} not among the violations");
        if (r.witness)
            first = "v_{" + std::to_string(r.witness->first) + "," + std::to_string(r.witness->second) + "}";
    }
    log.note("q = 1 independent; q in {0, 1/2, q} dependent, v_{4,2} violates (first in scan order: " + first + ")");
}

// ---- 5: closed-form quadratic harness coefficients

void c5_closed_forms(Log& log)
{
    auto R = [](const MPoly& n, const MPoly& d = MPoly(1)) { return RatFunc(n, d); };
    auto check = [&](const std::string& who, const QHCoeffsT<RatFunc>& k, const std::vector<RatFunc>& want) {
        const RatFunc* got[] = {&k.A, &k.B, &k.C, &k.D, &k.E, &k.F};
        const char* names = "ABCDEF";
        for (std::size_t i = 0; i < 6; ++i)
            log.require(*got[i] == want[i], who + " " + names[i] + ": derived " + got[i]->str() + ", display " +
                                                want[i].str());
    };
    HarnessParams qw{MPoly(1), MPoly(), MPoly(), MPoly(), MPoly(), MPoly(1) + Q()};
    {
        MPoly s = MPoly::var("s"), t = T(), u = MPoly::var("u");
        auto k = qh_coeffs(to_ratfunc(qw), R(s), R(t), R(u));
        MPoly den = (u - s) * (u - Q() * s);
        RatFunc B = R((MPoly(1) + Q()) * (t - s) * (u - t), den);
        check("q-Wiener", k,
              {R((u - t) * (u - Q() * t), den), B, R((t - s) * (t - Q() * s), den), RatFunc(0), RatFunc(0), -R(s) * B});
    }
    {
        MPoly s = MPoly::var("E_s").pow(2), t = MPoly::var("E_t").pow(2), u = MPoly::var("E_u").pow(2);
        auto k = qh_coeffs(to_ratfunc(qw), R(s), R(t), R(u));
        MPoly den = (u - s) * (u - Q() * s);
        RatFunc B = R((MPoly(1) + Q()) * (t - s) * (u - t), den);
        check("OU", k,
              {R((u - t) * (u - Q() * t), den), B, R((t - s) * (t - Q() * s), den), RatFunc(0), RatFunc(0), -R(s) * B});
    }
    {
        HarnessParams po{MPoly(1), MPoly(), MPoly(1), MPoly(), MPoly(), MPoly(2)};
        MPoly s = MPoly::var("s"), t = T(), u = MPoly::var("u");
        auto k = qh_coeffs(to_ratfunc(po), R(s), R(t), R(u));
        MPoly den = (u - s).pow(2);
        RatFunc B = R(2 * (u - t) * (t - s), den);
        // the display as printed, including E = -sB
        check("Poisson", k, {R((u - t).pow(2), den), B, R((t - s).pow(2), den), -B, -R(s) * B, -R(s) * B});
    }
    log.note("q-Wiener, OU and Poisson displays reproduced exactly");
}

// ---- 6: recursions of the quadratic harness system

void c6_system(Log& log)
{
    double secs = timed([&] {
        auto qs = q_hermite_sequences();
        log.require(qh_system_check(qs, harness_params(qs), 20).ok, "q-Wiener system");
        auto ou = extract_harness_params(ou_family().rec, 22);
        log.require(qh_system_check(ou, harness_params(ou), 20).ok, "OU system");
        auto ps = poisson_sequences();
        HarnessParams php{MPoly(1), MPoly(), MPoly(1), MPoly(), MPoly(), MPoly(2)};
        log.require(qh_system_check(ps, php, 20).ok, "Poisson system");

        auto zero = [](int) { return MPoly(); };
        auto bad = make_sequences([](int) { return MPoly(1); }, zero, [](int n) { return MPoly(n * n); }, zero, zero,
                                  [](int n) { return MPoly(n + 1); });
        auto r = qh_system_check(bad, php, 20);
        bool witness = !r.ok && !r.violations.empty() && r.violations.front().equation == "e4" &&
                       r.violations.front().n == 2;
        log.require(witness, "mutated b_n = n^2 not rejected at (e4, n = 2)");

        // n-generic reductions
        HarnessParams qw = harness_params(qs);
        for (int n = 0; n <= 20; ++n) {
            auto [l, rr] = qh_equation(5, qs, qw, n);
            log.require(l == MPoly(1) + Q() && rr == (MPoly(1) + Q()) * (-Q() * q_int(n, Q()) + q_int(n + 1, Q())),
                        "q-Wiener e5 reduction at n = " + std::to_string(n));
        }
        for (int n = 1; n <= 20; ++n) {
            auto [l, rr] = qh_equation(5, ps, php, n);
            log.require(l == MPoly(2) && rr == MPoly(2) * (MPoly(-n) + MPoly(n) + MPoly(1)),
                        "Poisson e5 reduction at n = " + std::to_string(n));
        }
    });
    log.require(secs < 1.0, "runtime " + fmt(secs) + " s >= 1 s");
    log.note("all three pass for n <= 20, mutation caught at (e4, 2); runtime " + fmt(secs) + " s");
}

// ---- 7: orthogonality by quadrature

void c7_orthogonality(Log& log)
{
    double worst = 0.0, worst_asc = 0.0;
    double secs = timed([&] {
        for (double q : {0.0, 0.3, 0.7}) {
            NumMatrix m = orthogonality_matrix(q, 8);
            for (int i = 0; i <= 8; ++i)
                for (int j = 0; j <= 8; ++j) {
                    double target = i == j ? q_factorial(i, q) : 0.0;
                    double scale = std::max(1.0, q_factorial(std::max(i, j), q));
                    double err = std::abs(m(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) - target) / scale;
                    worst = std::max(worst, err);
                }
            for (double rho : {0.3, 0.8})
                for (double y : {0.0, 0.6}) {
                    NumMatrix a = asc_orthogonality_matrix({q, rho, y}, 8);
                    for (int i = 0; i <= 8; ++i)
                        for (int j = 0; j <= 8; ++j) {
                            double target = i == j ? q_factorial(i, q) * q_pochhammer(rho * rho, q, i) : 0.0;
                            worst_asc = std::max(
                                worst_asc, std::abs(a(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) - target));
                        }
                }
        }
    });
    log.require(worst <= 1e-8, "f_N orthogonality error " + fmt(worst));
    log.require(worst_asc <= 1e-7, "Al-Salam-Chihara orthogonality error " + fmt(worst_asc));
    log.require(secs < 30.0, "runtime " + fmt(secs) + " s >= 30 s");
    log.note("scaled error " + fmt(worst) + ", Al-Salam-Chihara " + fmt(worst_asc) + "; runtime " + fmt(secs) + " s");
}

// ---- 8: kernel expansion

void c8_kernel(Log& log)
{
    const int K = 60;
    double worst_ck = 0.0;
    std::ostringstream rows;
    for (double q : {0.0, 0.5, 0.7}) {
        ProcessSpec ou = alpha_q_ou(parse_rational(std::to_string(q)), Rational(1));
        Support sup = support(q);
        for (double rho : {0.3, 0.9})
            for (double y : {0.0, 1.0}) {
                double t = -std::log(rho), err = 0.0;
                for (int i = 0; i < 21; ++i) {
                    double x = sup.lo + (sup.hi - sup.lo) * (i + 0.5) / 21.0;
                    double closed = f_CN(x, {q, rho, y}) / f_N(x, q);
                    err = std::max(err, std::abs(kernel_expansion(x, y, ou, 0.0, t, K) - closed));
                }
                if (!(err <= 1e-6))
                    log.require(false, "(q, rho, y) = (" + fmt(q) + ", " + fmt(rho) + ", " + fmt(y) +
                                           "): sup error " + fmt(err));
                rows << " " << fmt(err);
            }
        worst_ck = std::max(worst_ck, chapman_kolmogorov_error(q, 1.0, 0.0, 0.4, 1.0));
    }
    log.require(worst_ck <= 1e-6, "Chapman-Kolmogorov residual " + fmt(worst_ck));
    log.note("sup errors at K = 60:" + rows.str() + "; Chapman-Kolmogorov residual " + fmt(worst_ck));
}

// ---- 9: Monte Carlo

void c9_monte_carlo(Log& log, const VerifyOptions& opt)
{
    std::uint64_t seed = opt.seed;
    std::size_t n = opt.mc_paths;
    std::vector<MCReport> reports;
    double secs = timed([&] {
        auto ou = alpha_q_ou(Rational(1, 2), Rational(1));
        auto qw = q_wiener(Rational(1, 2));
        for (int k = 1; k <= 3; ++k) {
            reports.push_back(with_retry(
                [&](std::size_t np, std::uint64_t sd) { return martingale_mc_check(ou, k, 0.2, 0.7, np, sd); }, n,
                seed + 10 + static_cast<std::uint64_t>(k)));
            reports.push_back(with_retry(
                [&](std::size_t np, std::uint64_t sd) { return martingale_mc_check(qw, k, 1.0, 2.0, np, sd); }, n,
                seed + 20 + static_cast<std::uint64_t>(k)));
        }
        reports.push_back(with_retry(
            [&](std::size_t np, std::uint64_t sd) { return harness_mc_check(qw, 1.0, 2.0, 4.0, np, sd); }, n, seed + 30));
        reports.push_back(with_retry(
            [&](std::size_t np, std::uint64_t sd) { return harness_mc_check(poisson(Rational(1)), 1.0, 2.0, 4.0, np, sd); },
            n, seed + 31));
        reports.push_back(with_retry(
            [&](std::size_t np, std::uint64_t sd) { return poisson_bridge_check(1.0, 1.0, 2.0, 4.0, np, sd); }, n,
            seed + 32));
    });
    double worst = 0.0;
    for (const auto& r : reports) {
        log.require(r.pass, r.name + ": |z| = " + fmt(std::abs(r.z_score)) + " after " + std::to_string(r.attempts) +
                                " attempt(s)");
        if (!r.exact)
            worst = std::max(worst, std::abs(r.z_score));
    }
    const MCReport& po = reports[reports.size() - 2];
    for (const auto& c : po.components)
        if (c.name == "E")
            log.note("Poisson E fitted " + fmt(c.estimate) + " +- " + fmt(c.std_error) + " (display value -4/9 at z = " +
                     fmt((c.estimate + 4.0 / 9.0) / c.std_error) + ")");
    log.require(secs < 300.0, "runtime " + fmt(secs) + " s >= 300 s");
    log.note(std::to_string(reports.size()) + " checks, worst |z| = " + fmt(worst) + ", runtime " + fmt(secs) + " s");
}

// ---- 10: property suites

void c10_properties(Log& log)
{
    std::mt19937_64 rng(20261016);
    std::uniform_int_distribution<int> num(-9, 9), den(1, 9), small(0, 3);
    auto rat = [&] {
        Rational r(num(rng), den(rng));
        r.canonicalize();
        return r;
    };
    const std::vector<std::string> syms{"x", "q", "t"};
    auto poly = [&] {
        MPoly p;
        for (int k = small(rng); k >= 0; --k) {
            MPoly m(rat());
            for (int f = small(rng); f > 0; --f)
                m *= MPoly::var(syms[static_cast<std::size_t>(small(rng)) % syms.size()]);
            p += m;
        }
        return p;
    };
    int ring = 0, inv = 0;
    for (int trial = 0; trial < 200; ++trial) {
        MPoly a = poly(), b = poly(), c = poly();
        ring += ((a + b) * c == a * c + b * c && a * b == b * a && (a * b) * c == a * (b * c)) ? 0 : 1;
    }
    for (int trial = 0; trial < 40; ++trial) {
        std::size_t n = 1 + static_cast<std::size_t>(trial) % 7;
        TriMatrix m(n);
        for (std::size_t i = 0; i < n; ++i) {
            Rational d;
            do
                d = rat();
            while (d == 0);
            m.set(i, i, MPoly(d));
            for (std::size_t j = 0; j < i; ++j)
                m.set(i, j, poly());
        }
        TriMatrix mi = tri_invert(m);
        inv += (tri_mul(m, mi) == TriMatrix::identity(n) && tri_mul(mi, m) == TriMatrix::identity(n)) ? 0 : 1;
    }
    log.require(ring == 0, std::to_string(ring) + " ring-axiom failures");
    log.require(inv == 0, std::to_string(inv) + " inversion round-trip failures");

    MPoly x = MPoly::var("x");
    for (const auto& fam : {q_wiener_family(), ou_family(), charlier(), q_hermite(), al_salam_chihara()}) {
        auto p = generate(fam, 9);
        for (int n = 0; n <= 8; ++n) {
            std::size_t i = static_cast<std::size_t>(n);
            MPoly rhs = fam.rec.alpha(n + 1) * p[i + 1] + fam.rec.beta(n) * p[i];
            if (n >= 1)
                rhs += fam.rec.gamma(n - 1) * p[i - 1];
            log.require((x * p[i] - rhs).is_zero(), to_string(fam.name) + ": recurrence at n = " + std::to_string(n));
        }
    }
    for (const auto& fam : {q_wiener_family(), ou_family(), charlier()}) {
        auto ns = norms(fam, 10);
        for (int n = 1; n <= 10; ++n) {
            std::size_t i = static_cast<std::size_t>(n);
            log.require(fam.rec.gamma(n - 1) * ns.phat[i - 1] == fam.rec.alpha(n) * ns.phat[i],
                        to_string(fam.name) + ": norm telescoping at n = " + std::to_string(n));
        }
    }
    auto hq = generate(q_hermite(), 8), he = generate(hermite_prob(), 8), u = generate(chebyshev_u(), 8);
    auto h1 = generate(q_hermite(Rational(1)), 8), h0 = generate(q_hermite(Rational(0)), 8);
    for (std::size_t i = 0; i <= 8; ++i) {
        log.require(hq[i].substitute("q", MPoly(1)) == he[i] && h1[i] == he[i], "q = 1 chain at n = " + std::to_string(i));
        log.require(hq[i].substitute("q", MPoly(0)) == u[i] && h0[i] == u[i], "q = 0 chain at n = " + std::to_string(i));
    }

    std::vector<std::array<double, 3>> triples = {{0.0, 1.0, 2.0}, {0.3, 0.9, 2.5}, {-1.0, 0.2, 0.7}, {1.0, 1.5, 4.0}};
    double fe = std::max({fun_eq_property([](double v) { return v; }, [](double v) { return v; }, triples),
                          fun_eq_property([](double v) { return 3.0 - 2.0 * std::exp(v); },
                                          [](double v) { return std::exp(v); }, triples),
                          fun_eq_property([](double v) { return 0.5 * v * v * v + 1.0; },
                                          [](double v) { return v * v * v; }, triples)});
    log.require(fe <= 1e-10, "functional-equation residual " + fmt(fe));
    double detect = fun_eq_property([](double v) { return v * v; }, [](double v) { return v; }, triples);
    log.require(detect > 1e-3, "functional equation does not separate f = g^2");
    log.note("200 ring, 40 inversion, recurrence/telescoping/specialization exact; fun_eq residual " + fmt(fe));
}

} // namespace

TriMatrix golden_qwiener_v6()
{
    MPoly t = T(), q = Q(), z;
    return from_rows({
        {MPoly(1)},
        {z, MPoly(1)},
        {t, z, MPoly(1)},
        {z, t * (MPoly(2) + q), z, MPoly(1)},
        {t.pow(2) * (MPoly(2) + q), z, t * (MPoly(3) + 2 * q + q.pow(2)), z, MPoly(1)},
        {z, t.pow(2) * (MPoly(5) + 6 * q + 3 * q.pow(2) + q.pow(3)), z, t * (MPoly(4) + 3 * q + 2 * q.pow(2) + q.pow(3)),
         z, MPoly(1)},
    });
}

TriMatrix golden_ou_k6()
{
    MPoly q = Q(), z;
    return from_rows({
        {MPoly(1)},
        {z, MPoly(1)},
        {MPoly(1), z, MPoly(1)},
        {z, MPoly(2) + q, z, MPoly(1)},
        {MPoly(2) + q, z, MPoly(3) + 2 * q + q.pow(2), z, MPoly(1)},
        {z, MPoly(5) + 6 * q + 3 * q.pow(2) + q.pow(3), z, MPoly(4) + 3 * q + 2 * q.pow(2) + q.pow(3), z, MPoly(1)},
    });
}

std::string criterion_title(int id)
{
    switch (id) {
    case 1: return "golden structural matrices";
    case 2: return "semigroup and inverse";
    case 3: return "OPM criterion";
    case 4: return "independence dichotomy";
    case 5: return "quadratic-harness closed forms";
    case 6: return "harness recursions";
    case 7: return "orthogonality quadrature";
    case 8: return "kernel expansion";
    case 9: return "Monte Carlo";
    case 10: return "property suites";
    default: return "unknown";
    }
}

CriterionResult run_criterion(int id, const VerifyOptions& opt)
{
    CriterionResult r;
    r.id = id;
    r.title = criterion_title(id);
    Log log;
    auto t0 = std::chrono::steady_clock::now();
    try {
        switch (id) {
        case 1: c1_golden(log); break;
        case 2: c2_semigroup(log); break;
        case 3: c3_opm(log); break;
        case 4: c4_independence(log); break;
        case 5: c5_closed_forms(log); break;
        case 6: c6_system(log); break;
        case 7: c7_orthogonality(log); break;
        case 8: c8_kernel(log); break;
        case 9: c9_monte_carlo(log, opt); break;
        case 10: c10_properties(log); break;
        default: log.require(false, "no criterion " + std::to_string(id));
        }
    } catch (const std::exception& e) {
        log.require(false, std::string("exception: ") + e.what());
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.pass = log.failures.empty();
    r.detail = log.join();
    return r;
}

} // namespace opm
