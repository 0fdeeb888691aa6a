#include "doctest.h"
#include "gen.hpp"

#include "opm/harness.hpp"
#include "opm/nummatrix.hpp"
#include "opm/qcalc.hpp"

#include <cmath>
#include <random>

using namespace opm;

namespace {
MPoly Q() { return MPoly::var("q"); }
MPoly V(const char* s) { return MPoly::var(s); }
RatFunc R(const MPoly& n, const MPoly& d = MPoly(1)) { return RatFunc(n, d); }

HarnessParams qwiener_hp() { return {MPoly(1), MPoly(), MPoly(), MPoly(), MPoly(), MPoly(1) + Q()}; }
HarnessParams poisson_hp() { return {MPoly(1), MPoly(), MPoly(1), MPoly(), MPoly(), MPoly(2)}; }

// Solve the six moment identities directly as a 6x6 linear system in
// (A, B, C, D, E, F).
std::vector<double> solve_identities(const HarnessParamsT<double>& hp, double ps, double pt, double pu)
{
    auto al = [&](double p) { return hp.a + hp.a_hat * p; };
    auto be = [&](double p) { return hp.b + hp.b_hat * p; };
    auto ga = [&](double p) { return hp.c + hp.c_hat * p; };
    // rows: coefficients of A B C D E F, right-hand side
    std::vector<std::vector<double>> m = {
        {0, ps, 0, 0, 0, 1, 0},
        {1, al(ps), 1, 0, 0, 0, 1},
        {ps * ga(ps) / al(ps), ps * ga(pu), pu * ga(pu) / al(pu), 0, 0, 0, pt * ga(pt) / al(pt)},
        {0, be(ps), 0, 1, 1, 0, 0},
        {0, ps * be(pu), 0, ps, pu, 0, 0},
        {ga(ps), al(pu) * ga(ps) + be(pu) * be(ps) + pu, ga(pu), be(ps), be(pu), 1, ga(pt)},
    };
    NumMatrix a(6);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j)
            a(i, j) = m[i][j];
    NumMatrix inv = inverse(a);
    std::vector<double> x(6, 0.0);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j)
            x[i] += inv(i, j) * m[j][6];
    return x;
}
} // namespace

TEST_CASE("linear harness weights")
{
    auto w = linear_harness_weights(1.0, 2.0, 4.0);
    CHECK(w.A_hat == doctest::Approx(2.0 / 3.0));
    CHECK(w.B_hat == doctest::Approx(1.0 / 3.0));
    auto e = linear_harness_weights(1.0, 1.0 + 1e-12, 4.0);
    CHECK(e.A_hat == doctest::Approx(1.0));
    CHECK(e.B_hat == doctest::Approx(0.0).epsilon(1e-9));
    CHECK_THROWS_AS(linear_harness_weights(2.0, 2.0, 2.0), DegeneratePhat);

    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    for (int k = 0; k < 50; ++k) {
        double s = u(rng), t = s + u(rng) + 1e-3, v = t + u(rng) + 1e-3;
        double ps = std::exp(2 * s), pt = std::exp(2 * t), pu = std::exp(2 * v);
        auto ww = linear_harness_weights(ps, pt, pu);
        CHECK(ww.A_hat + ww.B_hat == doctest::Approx(1.0));
        CHECK(ww.A_hat * ps + ww.B_hat * pu == doctest::Approx(pt));
    }
}

TEST_CASE("quadratic harness closed forms: q-Wiener")
{
    auto hp = to_ratfunc(qwiener_hp());
    MPoly s = V("s"), t = V("t"), u = V("u");
    auto k = qh_coeffs(hp, R(s), R(t), R(u));
    CHECK(k.branch == "generic");
    MPoly den = (u - s) * (u - Q() * s);
    CHECK(k.A == R((u - t) * (u - Q() * t), den));
    CHECK(k.B == R((MPoly(1) + Q()) * (t - s) * (u - t), den));
    CHECK(k.C == R((t - s) * (t - Q() * s), den));
    CHECK(k.D.is_zero());
    CHECK(k.E.is_zero());
    CHECK(k.F == -R(s) * k.B);
}

TEST_CASE("quadratic harness closed forms: OU")
{
    auto hp = to_ratfunc(qwiener_hp());
    MPoly ps = V("E_s").pow(2), pt = V("E_t").pow(2), pu = V("E_u").pow(2);
    auto k = qh_coeffs(hp, R(ps), R(pt), R(pu));
    MPoly den = (pu - ps) * (pu - Q() * ps);
    CHECK(k.A == R((pu - pt) * (pu - Q() * pt), den));
    CHECK(k.B == R((MPoly(1) + Q()) * (pt - ps) * (pu - pt), den));
    CHECK(k.C == R((pt - ps) * (pt - Q() * ps), den));
    CHECK(k.D.is_zero());
    CHECK(k.E.is_zero());
    CHECK(k.F == -R(ps) * k.B);
}

TEST_CASE("quadratic harness closed forms: Poisson")
{
    auto hp = to_ratfunc(poisson_hp());
    MPoly mu = V("mu"), s = V("s"), t = V("t"), u = V("u");
    auto k = qh_coeffs(hp, R(mu * s), R(mu * t), R(mu * u));
    MPoly den = (u - s).pow(2);
    CHECK(k.A == R((u - t).pow(2), den));
    CHECK(k.B == R(2 * (u - t) * (t - s), den));
    CHECK(k.C == R((t - s).pow(2), den));
    CHECK(k.D == -k.B);
    CHECK(k.E.is_zero());
    CHECK(k.F == -R(mu * s) * k.B);

    auto n = qh_coeffs(to_numeric(poisson_hp()), 1.0, 2.0, 4.0);
    CHECK(n.A == doctest::Approx(4.0 / 9));
    CHECK(n.B == doctest::Approx(4.0 / 9));
    CHECK(n.C == doctest::Approx(1.0 / 9));
    CHECK(n.D == doctest::Approx(-4.0 / 9));
    CHECK(n.E == 0.0);
    CHECK(n.F == doctest::Approx(-4.0 / 9));
}

TEST_CASE("qh_coeffs solves the moment identities")
{
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> pos(0.2, 2.0), any(-1.0, 1.0), gap(0.05, 2.0);
    int checked = 0;
    while (checked < 100) {
        HarnessParamsT<double> hp{pos(rng), pos(rng), any(rng), any(rng), pos(rng), pos(rng)};
        double ps = pos(rng), pt = ps + gap(rng), pu = pt + gap(rng);
        auto k = qh_coeffs(hp, ps, pt, pu);
        REQUIRE(k.branch == "generic");
        for (double r : qh_identities(hp, k, ps, pt, pu))
            CHECK(std::abs(r) <= 1e-10);
        auto x = solve_identities(hp, ps, pt, pu);
        const double got[] = {k.A, k.B, k.C, k.D, k.E, k.F};
        for (std::size_t i = 0; i < 6; ++i)
            CHECK(got[i] == doctest::Approx(x[i]).epsilon(1e-8));
        ++checked;
    }
}

TEST_CASE("qh_coeffs special branches")
{
    // lambda = 0: a c_hat = a_hat c
    HarnessParamsT<double> l0{1.0, 0.5, 0.3, 0.1, 2.0, 1.0};
    auto k = qh_coeffs(l0, 1.0, 2.0, 4.0);
    CHECK(k.branch == "lambda=0");
    CHECK(k.B == 0.0);
    CHECK(k.A == doctest::Approx(2.0 / 3.0));
    CHECK(k.C == doctest::Approx(1.0 / 3.0));
    for (double r : qh_identities(l0, k, 1.0, 2.0, 4.0))
        CHECK(std::abs(r) < 1e-12);

    // kappa = 0: 1 + b b_hat + a_hat c = 0
    HarnessParamsT<double> k0{1.0, 0.0, 1.0, -1.0, 0.5, 2.0};
    auto kk = qh_coeffs(k0, 1.0, 2.0, 4.0);
    CHECK(kk.branch == "kappa=0");
    for (double r : qh_identities(k0, kk, 1.0, 2.0, 4.0))
        CHECK(std::abs(r) < 1e-12);
    auto x = solve_identities(k0, 1.0, 2.0, 4.0);
    CHECK(kk.B == doctest::Approx(x[1]));

    // kappa = lambda = 0 keeps B free; the first two identities hold for any B
    HarnessParamsT<double> both{0.0, 1.0, 1.0, -1.0, 0.0, 2.0};
    REQUIRE(both.kappa() == 0.0);
    REQUIRE(both.lambda() == 0.0);
    for (double B : {0.3, -1.2}) {
        auto kb = qh_coeffs(both, 1.0, 2.0, 4.0, std::optional<double>(B));
        CHECK(kb.branch == "kappa=lambda=0");
        CHECK(kb.B == B);
        auto r = qh_identities(both, kb, 1.0, 2.0, 4.0);
        CHECK(std::abs(r[0]) < 1e-12);
        CHECK(std::abs(r[3]) < 1e-12);
    }
    CHECK_NOTHROW(qh_coeffs(both, 1.0, 2.0, 4.0));

    CHECK_THROWS_AS(qh_coeffs(l0, 1.0, 2.0, 1.0), ZeroDenominator);
}

TEST_CASE("branch continuity as lambda -> 0")
{
    for (double lam : {1e-3, 1e-6}) {
        // a c_hat - a_hat c = lam
        HarnessParamsT<double> hp{1.0, 0.5, 0.2, 0.2, 2.0, 1.0 + lam};
        REQUIRE(hp.lambda() == doctest::Approx(lam));
        auto k = qh_coeffs(hp, 1.0, 2.0, 4.0);
        CHECK(k.branch == "generic");
        CHECK(std::abs(k.B) < 10 * lam);
        CHECK(std::abs(k.A - 2.0 / 3.0) < 10 * lam);
        CHECK(std::abs(k.C - 1.0 / 3.0) < 10 * lam);
    }
}

TEST_CASE("harness parameter extraction")
{
    const int N = 10;
    SUBCASE("OU")
    {
        auto sp = extract_harness_params(ou_family().rec, N);
        for (int n = 1; n <= N; ++n) {
            CHECK(sp.a(n) == MPoly(1));
            CHECK(sp.a_hat(n).is_zero());
            CHECK(sp.b(n).is_zero());
            CHECK(sp.b_hat(n).is_zero());
            CHECK(sp.c(n).is_zero());
            CHECK(sp.c_hat(n) == q_int(n + 1, Q()));
        }
    }
    SUBCASE("q-Wiener")
    {
        auto sp = extract_harness_params(q_wiener_family().rec, N);
        for (int n = 0; n <= N; ++n) {
            CHECK(sp.c(n).is_zero());
            CHECK(sp.c_hat(n) == q_int(n + 1, Q()));
        }
        CHECK(harness_params(sp).c_hat == MPoly(1) + Q());
    }
    SUBCASE("Poisson")
    {
        auto sp = extract_harness_params(charlier().rec, N);
        for (int n = 1; n <= N; ++n) {
            CHECK(sp.a(n) == MPoly(1));
            CHECK(sp.a_hat(n).is_zero());
            CHECK(sp.b(n) == MPoly(n));
            CHECK(sp.b_hat(n).is_zero());
            CHECK(sp.c(n).is_zero());
            CHECK(sp.c_hat(n) == MPoly(n + 1));
        }
    }
    SUBCASE("boundary values")
    {
        auto sp = extract_harness_params(charlier().rec, 3);
        CHECK(sp.a(0).is_zero());
        CHECK(sp.a(1) == MPoly(1));
        CHECK(sp.a_hat(1).is_zero());
        CHECK(sp.b(0).is_zero());
        CHECK(sp.c(0).is_zero());
        CHECK(sp.c_hat(0) == MPoly(1));
    }
}

TEST_CASE("extraction failures")
{
    Recurrence bad = q_wiener_family().rec;
    Recurrence r;
    r.alpha = bad.alpha;
    r.beta = bad.beta;
    r.gamma = Sequence([](int n) { return n == 2 ? MPoly::var("t").pow(2) : MPoly(n + 1) * MPoly::var("t"); });
    CHECK_THROWS_AS(extract_harness_params(r, 5), NotAHarness);
    auto f = harness_failure(r, 5);
    REQUIRE(f);
    CHECK(f->coefficient == "gamma");
    CHECK(f->n == 2);
    CHECK_FALSE(harness_failure(q_wiener_family().rec, 5));

    Recurrence prop;
    prop.alpha = Sequence([](int) { return MPoly::var("t"); });
    prop.beta = Sequence([](int) { return MPoly(); });
    prop.gamma = Sequence([](int) { return 2 * MPoly::var("t"); });
    CHECK_THROWS_AS(extract_harness_params(prop, 3), NonUniqueDecomposition);
}

TEST_CASE("property: extraction inverts build_recurrence")
{
    std::mt19937_64 rng(9);
    const std::vector<std::pair<MPoly, MPoly>> bases = {{MPoly(1), MPoly::var("t")},
                                                        {MPoly::var("E_t").pow(-1), MPoly::var("E_t")},
                                                        {MPoly(2), 3 * MPoly::var("t") + 1}};
    for (int trial = 0; trial < 6; ++trial) {
        std::vector<std::vector<Rational>> v(6);
        for (auto& row : v)
            for (int i = 0; i <= 12; ++i)
                row.push_back(gen::rational(rng));
        auto at = [&v](int k) { return [&v, k](int n) { return MPoly(v[static_cast<std::size_t>(k)][static_cast<std::size_t>(n)]); }; };
        SequenceParams sp = make_sequences(at(0), at(1), at(2), at(3), at(4), at(5));
        const auto& [a1, g0] = bases[static_cast<std::size_t>(trial) % bases.size()];
        Recurrence rec = build_recurrence(sp, a1, MPoly::var("t") - 1, g0);
        SequenceParams back = extract_harness_params(rec, 10);
        for (int n = 0; n <= 10; ++n) {
            CHECK(back.a(n) == sp.a(n));
            CHECK(back.a_hat(n) == sp.a_hat(n));
            CHECK(back.b(n) == sp.b(n));
            CHECK(back.b_hat(n) == sp.b_hat(n));
            CHECK(back.c(n) == sp.c(n));
            CHECK(back.c_hat(n) == sp.c_hat(n));
        }
    }
}

TEST_CASE("recursive system: named processes")
{
    for (auto q : {std::optional<Rational>{}, std::optional<Rational>(0), std::optional<Rational>(Rational(1, 2)),
                   std::optional<Rational>(1)}) {
        auto sp = q_hermite_sequences(q);
        auto r = qh_system_check(sp, harness_params(sp), 20);
        CHECK(r.ok);
        CHECK(r.positivity_checked);
    }
    auto ps = poisson_sequences();
    auto r = qh_system_check(ps, poisson_hp(), 20);
    CHECK(r.ok);
    CHECK(r.violations.empty());

    // sequences extracted from the recurrences pass as well
    for (const auto& fam : {q_wiener_family(), ou_family(), charlier()}) {
        auto sp = extract_harness_params(fam.rec, 22);
        CHECK(qh_system_check(sp, harness_params(sp), 20).ok);
    }
}

TEST_CASE("recursive system: n-generic reductions")
{
    auto sp = q_hermite_sequences();
    auto hp = qwiener_hp();
    for (int n = 0; n <= 12; ++n) {
        auto [lhs, rhs] = qh_equation(5, sp, hp, n);
        CHECK(lhs == MPoly(1) + Q());
        CHECK(rhs == (MPoly(1) + Q()) * (-Q() * q_int(n, Q()) + q_int(n + 1, Q())));
        for (int eq = 1; eq <= 4; ++eq) {
            auto [l, r] = qh_equation(eq, sp, hp, n);
            CHECK(l.is_zero());
            CHECK(r.is_zero());
        }
    }
    auto pp = poisson_sequences();
    for (int n = 1; n <= 12; ++n) {
        auto [l5, r5] = qh_equation(5, pp, poisson_hp(), n);
        CHECK(l5 == MPoly(2));
        CHECK(r5 == MPoly(2));
        auto [l4, r4] = qh_equation(4, pp, poisson_hp(), n);
        CHECK(l4 == MPoly(2 * n));
        CHECK(r4 == MPoly(2 * n));
    }
}

TEST_CASE("recursive system: mutated sequences are rejected")
{
    auto zero = [](int) { return MPoly(); };
    auto bad = make_sequences([](int) { return MPoly(1); }, zero, [](int n) { return MPoly(n * n); }, zero, zero,
                              [](int n) { return MPoly(n + 1); });
    auto r = qh_system_check(bad, poisson_hp(), 20);
    CHECK_FALSE(r.ok);
    REQUIRE_FALSE(r.violations.empty());
    CHECK(r.violations.front().equation == "e4");
    CHECK(r.violations.front().n == 2);
    CHECK(r.violations.front().lhs == MPoly(4));
    CHECK(r.violations.front().rhs == MPoly(12));

    // initial conditions must agree with the sequences
    auto sp = q_hermite_sequences(Rational(1, 2));
    HarnessParams hp = harness_params(sp);
    hp.c_hat = MPoly(2);
    auto r2 = qh_system_check(sp, hp, 3);
    CHECK_FALSE(r2.ok);
    CHECK(r2.violations.front().equation == "init:c_hat");

    // Favard positivity fails for c_hat_n = 1 - n
    auto neg = make_sequences([](int) { return MPoly(1); }, zero, zero, zero, zero, [](int n) { return MPoly(1 - n); });
    auto r3 = qh_system_check(neg, harness_params(neg), 4);
    CHECK_FALSE(r3.positive);
    REQUIRE(r3.positivity_witness);
    CHECK(r3.positivity_witness->first == 2);
}

TEST_CASE("phat_2 is non-decreasing for the named processes")
{
    for (const auto& hp : {to_numeric(qwiener_hp(), {{"q", 0.5}}), to_numeric(qwiener_hp(), {{"q", -0.7}}),
                           to_numeric(poisson_hp())}) {
        double prev = 0.0;
        for (double p = 0.01; p < 50.0; p *= 1.3) {
            double v = phat2(hp, p);
            CHECK(v >= prev);
            prev = v;
        }
    }
}

TEST_CASE("Bryc parameter map")
{
    auto qw = bryc_map(qwiener_hp());
    CHECK(qw.sigma.is_zero());
    CHECK(qw.tau.is_zero());
    CHECK(qw.q_bmw == RatFunc(Q()));
    CHECK_FALSE(qw.constraint_ok);

    auto po = bryc_map(poisson_hp());
    CHECK(po.q_bmw == RatFunc(1));
    CHECK(po.eta.is_zero());
    CHECK(po.theta == RatFunc(1));
    REQUIRE(po.constraint_ok);
    CHECK(*po.constraint_ok);
    // third moment: (b + b_hat t) t with sigma = tau = 0 gives (eta t^2 + theta t)
    MPoly t = V("t");
    RatFunc third = (po.eta + po.sigma * po.theta) * R(t * t) + (po.eta * po.tau + po.theta) * R(t);
    CHECK(third == R(poisson_hp().b * t + poisson_hp().b_hat * t * t));

    HarnessParams wide{MPoly(1), MPoly(), MPoly(), MPoly(), MPoly(), MPoly(5)};
    auto w = bryc_map(wide);
    REQUIRE(w.constraint_ok);
    CHECK_FALSE(*w.constraint_ok);

    // round trip (eta, theta) -> (b, b_hat) for random numeric parameters
    std::mt19937_64 rng(2);
    for (int k = 0; k < 30; ++k) {
        HarnessParams hp{MPoly(gen::nonzero_rational(rng)), MPoly(gen::rational(rng)), MPoly(gen::rational(rng)),
                         MPoly(gen::rational(rng)), MPoly(gen::rational(rng)), MPoly(gen::nonzero_rational(rng))};
        if (hp.kappa().is_zero())
            continue;
        auto m = bryc_map(hp);
        RatFunc one_st = RatFunc(1) - m.sigma * m.tau;
        if (one_st.is_zero())
            continue;
        CHECK((m.eta + m.sigma * m.theta) / one_st == RatFunc(hp.b_hat));
        CHECK((m.eta * m.tau + m.theta) / one_st == RatFunc(hp.b));
    }

    CHECK_THROWS_AS(bryc_map(poisson_hp(), 2 * t), NotNormalized);
    HarnessParams a0 = poisson_hp();
    a0.a = MPoly();
    CHECK_THROWS_AS(bryc_map(a0), DivisionByZero);
}

TEST_CASE("functional equation of harness weights")
{
    auto id = [](double x) { return x; };
    std::vector<std::array<double, 3>> triples = {{0.0, 1.0, 2.0}, {0.3, 0.9, 2.5}, {-1.0, 0.2, 0.7}};
    CHECK(fun_eq_property(id, id, triples) <= 1e-15);
    auto ex = [](double x) { return std::exp(x); };
    CHECK(fun_eq_property([&](double x) { return 3 - 2 * ex(x); }, ex, triples) <= 1e-12);
    CHECK(fun_eq_property([](double x) { return x * x; }, id, {{0.0, 1.0, 2.0}}) == doctest::Approx(1.0));
    CHECK(fun_eq_property([](double x) { return x * x; }, id, triples) > 0.1);
}
