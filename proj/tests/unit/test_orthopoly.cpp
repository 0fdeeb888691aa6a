#include "doctest.h"
#include "gen.hpp"

#include "opm/errors.hpp"
#include "opm/orthopoly.hpp"
#include "opm/qcalc.hpp"

#include <cmath>

using namespace opm;

namespace {
MPoly X() { return MPoly::var("x"); }
MPoly Q() { return MPoly::var("q"); }
MPoly T() { return MPoly::var("t"); }
Rational R(long n, long d = 1)
{
    Rational r(n, d);
    r.canonicalize();
    return r;
}

// Re-expand f in the basis p_0..p_N by back substitution on the
// coefficient matrix.  Diagonals are units for every family used here.
std::vector<MPoly> expand_in_basis(const MPoly& f, const std::vector<MPoly>& p)
{
    TriMatrix c = coeff_matrix(p);
    const int n = static_cast<int>(p.size()) - 1;
    REQUIRE(f.degree("x") <= n);
    std::vector<MPoly> out(p.size());
    for (int k = n; k >= 0; --k) {
        MPoly w = f.coeff("x", k);
        for (int j = k + 1; j <= n; ++j)
            w -= out[static_cast<std::size_t>(j)] * c(static_cast<std::size_t>(j), static_cast<std::size_t>(k));
        out[static_cast<std::size_t>(k)] = w * c(static_cast<std::size_t>(k), static_cast<std::size_t>(k)).inverse_unit();
    }
    return out;
}

void check_quadratic_oracle(const PolyFamily& fam, int n_max)
{
    auto p = generate(fam, n_max + 2);
    for (int n = 0; n <= n_max; ++n) {
        CAPTURE(n);
        std::vector<MPoly> sub(p.begin(), p.begin() + n + 3);
        auto w = expand_in_basis(p[2] * p[static_cast<std::size_t>(n)], sub);
        auto r = quadratic_product_coeffs(fam.rec, n);
        auto at = [&](int k) { return k >= 0 ? w[static_cast<std::size_t>(k)] : MPoly(); };
        CHECK(r.r2 == at(n + 2));
        CHECK(r.r1 == at(n + 1));
        CHECK(r.r0 == at(n));
        CHECK(r.rm1 == at(n - 1));
        CHECK(r.rm2 == at(n - 2));
        for (int k = 0; k < n - 2; ++k)
            CHECK(at(k).is_zero());
    }
}

std::vector<PolyFamily> named_families()
{
    return {q_hermite(), hermite_prob(), chebyshev_u(), al_salam_chihara(), charlier(),
            q_wiener_family(), ou_family(), q_hermite(R(1, 3)), charlier(R(2))};
}
} // namespace

TEST_CASE("q-integer examples")
{
    for (int n = 0; n <= 6; ++n) {
        CHECK(q_int(n, Rational(1)) == n);
        CHECK(q_factorial(n, Rational(1)) == factorial(n));
        if (n >= 1)
            CHECK(q_int(n, Rational(0)) == 1);
        for (int k = 0; k <= n; ++k)
            CHECK(q_binomial(n, k, Rational(0)) == 1);
    }
    CHECK(q_int(0, R(1, 2)) == 0);
    CHECK(q_int(3, R(1, 2)) == R(7, 4));
    CHECK(q_factorial(3, R(1, 2)) == R(21, 8));
    CHECK(q_pochhammer(R(3), R(1, 2), 0) == 1);
}

TEST_CASE("property: (q;q)_n = (1-q)^n [n]_q!")
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 60; ++trial) {
        Rational q = gen::rational(rng);
        int n = static_cast<int>(rng() % 9);
        Rational lhs = q_pochhammer(q, q, n);
        Rational one_minus = 1 - q;
        Rational rhs = q_factorial(n, q);
        for (int i = 0; i < n; ++i)
            rhs *= one_minus;
        CHECK(lhs == rhs);
    }
    // symbolic in q too
    for (int n = 0; n <= 6; ++n)
        CHECK(q_pochhammer(Q(), Q(), n) == (MPoly(1) - Q()).pow(n) * q_factorial(n, Q()));
}

TEST_CASE("q-binomial Pascal rule and symmetry")
{
    for (int n = 0; n <= 7; ++n)
        for (int k = 0; k <= n; ++k) {
            CHECK(q_binomial(n, k, Q()) == q_binomial(n, n - k, Q()));
            CHECK(q_binomial(n, k, Rational(1)) == binomial(n, k));
            // [n]! = [k]! [n-k]! binom
            CHECK(q_factorial(n, Q()) == q_factorial(k, Q()) * q_factorial(n - k, Q()) * q_binomial(n, k, Q()));
        }
}

TEST_CASE("q-Hermite examples")
{
    auto h = generate(q_hermite(), 4);
    CHECK(h[0] == MPoly(1));
    CHECK(h[1] == X());
    CHECK(h[2] == X().pow(2) - 1);
    CHECK(h[3] == X().pow(3) - (MPoly(2) + Q()) * X());
    CHECK(h[4] == X().pow(4) - (Q().pow(2) + 2 * Q() + 3) * X().pow(2) + q_int(3, Q()));

    auto he = generate(q_hermite(Rational(1)), 3);
    CHECK(he[3] == X().pow(3) - 3 * X());
}

TEST_CASE("specialization chains")
{
    const int N = 8;
    auto h1 = generate(q_hermite(Rational(1)), N);
    auto he = generate(hermite_prob(), N);
    auto h0 = generate(q_hermite(Rational(0)), N);
    auto u = generate(chebyshev_u(), N);
    auto hq = generate(q_hermite(), N);
    for (int n = 0; n <= N; ++n) {
        std::size_t i = static_cast<std::size_t>(n);
        CHECK(h1[i] == he[i]);
        CHECK(h0[i] == u[i]);
        CHECK(hq[i].substitute("q", MPoly(1)) == he[i]);
        CHECK(hq[i].substitute("q", MPoly(0)) == u[i]);
        // He_n coefficients: x^{n-2j} has (-1)^j binom(n,2j) (2j-1)!!
        for (int j = 0; 2 * j <= n; ++j) {
            Rational c = binomial(n, 2 * j) * double_factorial_odd(j);
            if (j % 2)
                c = -c;
            CHECK(he[i].coeff("x", n - 2 * j) == MPoly(c));
        }
    }
}

TEST_CASE("Chebyshev U_n(x/2) coefficients")
{
    const int N = 10;
    auto u = generate(chebyshev_u(), N);
    for (int n = 0; n <= N; ++n)
        for (int j = 0; 2 * j <= n; ++j) {
            Rational c = binomial(n - j, j);
            if (j % 2)
                c = -c;
            CHECK(u[static_cast<std::size_t>(n)].coeff("x", n - 2 * j) == MPoly(c));
        }

    // binom(n,j)(n-2j+1)/(n-j+1) are the coefficients of the inverse
    // expansion x^n = sum_j c_{n,j} U_{n-2j}(x/2), without alternating signs
    TriMatrix inv = tri_invert(coeff_matrix(u));
    for (int n = 0; n <= N; ++n)
        for (int j = 0; 2 * j <= n; ++j) {
            Rational c = binomial(n, j) * Rational(n - 2 * j + 1, n - j + 1);
            c.canonicalize();
            CHECK(inv(static_cast<std::size_t>(n), static_cast<std::size_t>(n - 2 * j)) == MPoly(c));
        }
}

TEST_CASE("Al-Salam-Chihara at q=0")
{
    // The recurrence gives U_n - rho y U_{n-1} + rho^2 U_{n-2}; the rho^2
    // term comes from gamma_0 = 1 - rho^2 and only vanishes when rho = 0.
    auto p = generate(al_salam_chihara(Rational(0)), 6);
    auto u = generate(chebyshev_u(), 6);
    MPoly rho = MPoly::var("rho"), y = MPoly::var("y");
    for (std::size_t n = 1; n <= 6; ++n) {
        MPoly expect = u[n] - rho * y * u[n - 1];
        if (n >= 2)
            expect += rho * rho * u[n - 2];
        CHECK(p[n] == expect);
    }
    CHECK(p[2] == X().pow(2) - 1 - rho * y * X() + rho * rho);
    // with y = 0 the leading two terms agree with the short form at n = 1
    CHECK(p[1] == u[1] - rho * y * u[0]);
}

TEST_CASE("Al-Salam-Chihara at q=1 is a shifted, scaled Hermite")
{
    auto p = generate(al_salam_chihara(Rational(1), R(1, 2), R(3)), 6);
    auto he = generate(hermite_prob(), 6);
    // He_n((x - rho y)/s) s^n with s^2 = 1 - rho^2: substitute and rescale
    // exactly by working with even powers of s only.
    Rational s2 = R(3, 4);
    MPoly shifted = X() - MPoly(R(3, 2));
    for (std::size_t n = 0; n <= 6; ++n) {
        MPoly expect;
        for (int k = 0; k <= static_cast<int>(n); ++k) {
            MPoly c = he[n].coeff("x", k);
            if (c.is_zero())
                continue;
            int m = static_cast<int>(n) - k; // even for He_n
            REQUIRE(m % 2 == 0);
            Rational scale = 1;
            for (int i = 0; i < m / 2; ++i)
                scale *= s2;
            expect += c * MPoly(scale) * shifted.pow(k);
        }
        CHECK(p[n] == expect);
    }
}

TEST_CASE("coeff_matrix examples")
{
    TriMatrix m = coeff_matrix({MPoly(1), X()});
    CHECK(m == TriMatrix::identity(2));

    TriMatrix c = coeff_matrix(generate(q_hermite(), 3));
    CHECK(c(2, 0) == MPoly(-1));
    CHECK(c(2, 1).is_zero());
    CHECK(c(3, 1) == -(MPoly(2) + Q()));
    CHECK(c(3, 3) == MPoly(1));
    CHECK(c.is_lower_triangular());

    CHECK_THROWS_AS(coeff_matrix({MPoly(1), X().pow(2)}), DegreeMismatch);
    CHECK_THROWS_AS(coeff_matrix({X()}), DegreeMismatch);
}

TEST_CASE("linear product coefficients")
{
    auto qw = q_wiener_family();
    for (int n = 0; n <= 5; ++n) {
        auto v = linear_product_coeffs(qw.rec, n);
        CHECK(v.v1 == MPoly(1));
        CHECK(v.v0.is_zero());
        CHECK(v.vm1 == (n >= 1 ? T() * q_int(n, Q()) : MPoly()));
    }
    auto po = charlier();
    MPoly mt = MPoly::var("mu") * T();
    for (int n = 0; n <= 5; ++n) {
        auto v = linear_product_coeffs(po.rec, n);
        CHECK(v.v0 == MPoly(n) + mt);
        CHECK(v.v0_centered == MPoly(n));
    }
    CHECK(linear_product_coeffs(po.rec, 0).vm1.is_zero());

    // p_1 p_n re-expanded by brute force uses the centered middle term
    for (const auto& fam : named_families()) {
        auto p = generate(fam, 7);
        for (int n = 0; n <= 5; ++n) {
            std::vector<MPoly> sub(p.begin(), p.begin() + n + 2);
            auto w = expand_in_basis(p[1] * p[static_cast<std::size_t>(n)], sub);
            auto v = linear_product_coeffs(fam.rec, n);
            CHECK(w[static_cast<std::size_t>(n + 1)] == v.v1);
            CHECK(w[static_cast<std::size_t>(n)] == v.v0_centered);
            CHECK((n >= 1 ? w[static_cast<std::size_t>(n - 1)] : MPoly()) == v.vm1);
        }
    }
}

TEST_CASE("quadratic product coefficients: small cases")
{
    auto qw = q_wiener_family();
    auto r = quadratic_product_coeffs(qw.rec, 0);
    CHECK(r.r2 == MPoly(1));
    for (const auto& fam : named_families()) {
        auto r0 = quadratic_product_coeffs(fam.rec, 0);
        CHECK(r0.rm1.is_zero());
        CHECK(r0.rm2.is_zero());
    }
}

TEST_CASE("quadratic product coefficients match brute-force re-expansion")
{
    SUBCASE("q-Hermite") { check_quadratic_oracle(q_hermite(), 6); }
    SUBCASE("Poisson") { check_quadratic_oracle(charlier(), 6); }
    SUBCASE("q-Wiener") { check_quadratic_oracle(q_wiener_family(), 5); }
    SUBCASE("OU") { check_quadratic_oracle(ou_family(), 5); }
    SUBCASE("Al-Salam-Chihara") { check_quadratic_oracle(al_salam_chihara(), 4); }
}

TEST_CASE("property: random recurrences satisfy the product formulas")
{
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 8; ++trial) {
        std::vector<Rational> a, b, g;
        for (int i = 0; i < 12; ++i) {
            a.push_back(gen::nonzero_rational(rng));
            b.push_back(gen::rational(rng));
            g.push_back(gen::rational(rng));
        }
        Recurrence rec;
        rec.alpha = Sequence([a](int n) { return MPoly(a[static_cast<std::size_t>(n)]); });
        rec.beta = Sequence([b](int n) { return MPoly(b[static_cast<std::size_t>(n)]); });
        rec.gamma = Sequence([g](int n) { return MPoly(g[static_cast<std::size_t>(n)]); });
        check_quadratic_oracle(custom_family(rec), 5);
    }
}

TEST_CASE("recurrence consistency")
{
    for (const auto& fam : named_families()) {
        CAPTURE(to_string(fam.name));
        auto p = generate(fam, 11);
        const auto& r = fam.rec;
        for (int n = 0; n <= 10; ++n) {
            std::size_t i = static_cast<std::size_t>(n);
            MPoly rhs = r.alpha(n + 1) * p[i + 1] + r.beta(n) * p[i];
            if (n >= 1)
                rhs += r.gamma(n - 1) * p[i - 1];
            CHECK((X() * p[i] - rhs).is_zero());
            CHECK(p[i].degree("x") == n);
        }
    }
}

TEST_CASE("norms: closed forms and telescoping")
{
    const int N = 10;
    auto qw = norms(q_wiener_family(), N);
    auto ou = norms(ou_family(), N);
    auto po = norms(charlier(), N);
    MPoly e = MPoly::var("E_t");
    for (int n = 0; n <= N; ++n) {
        std::size_t i = static_cast<std::size_t>(n);
        CHECK(qw.phat[i] == T().pow(n) * q_factorial(n, Q()));
        CHECK(ou.phat[i] == e.pow(2 * n) * q_factorial(n, Q()));
        if (n >= 1) {
            for (auto [fam, ns] : {std::pair{q_wiener_family(), qw}, {ou_family(), ou}, {charlier(), po}})
                CHECK(fam.rec.gamma(n - 1) * ns.phat[i - 1] == fam.rec.alpha(n) * ns.phat[i]);
        }
    }
    CHECK(qw.phat[2] == T().pow(2) * (MPoly(1) + Q()));
    CHECK(ou.phat[1] == e.pow(2));
    CHECK(po.phat[1] == MPoly::var("mu") * T());

    CHECK_THROWS_AS(norms(custom_family(q_hermite().rec), 3), UnknownNorms);
    CHECK_NOTHROW(norms(custom_family(q_hermite().rec, true), 3));
}

TEST_CASE("first polynomial and variance")
{
    for (const auto& fam : {q_wiener_family(), ou_family(), charlier()}) {
        auto p = generate(fam, 1);
        const auto& r = fam.rec;
        CHECK(p[1] == (X() - r.beta(0)) * r.alpha(1).inverse_unit());
        auto ns = norms(fam, 1);
        MPoly var = r.alpha(1).pow(2) * ns.phat[1];
        if (fam.name == FamilyName::Charlier)
            CHECK(var == MPoly::var("mu") * T());
        else if (fam.rec.alpha(1) == MPoly(1))
            CHECK(var == T());
        else
            CHECK(var == MPoly(1)); // stationary OU
    }
}

TEST_CASE("numeric recurrence agrees with exact generation")
{
    auto fam = al_salam_chihara();
    auto exact = generate(fam, 8);
    std::map<std::string, double> b{{"q", 0.4}, {"rho", -0.3}, {"y", 0.7}};
    auto nr = eval_recurrence(fam.rec, b, 8);
    for (double x : {-1.7, 0.0, 0.35, 2.1}) {
        auto v = eval_polys(nr, x, 8);
        auto bx = b;
        bx["x"] = x;
        for (std::size_t n = 0; n <= 8; ++n)
            CHECK(v[n] == doctest::Approx(exact[n].eval(bx)).epsilon(1e-12));
    }
}

TEST_CASE("sequences memoize and are shared across copies")
{
    int calls = 0;
    Sequence s([&calls](int n) {
        ++calls;
        return MPoly(n * n);
    });
    Sequence c = s;
    CHECK(s(3) == MPoly(9));
    CHECK(c(3) == MPoly(9));
    CHECK(calls == 1);
    CHECK(s(-1).is_zero());
    CHECK(calls == 1);
}
