#pragma once

#include "opm/errors.hpp"
#include "opm/mpr.hpp"
#include "opm/orthopoly.hpp"
#include "opm/ratfunc.hpp"

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace opm {

// Six harness parameters:
//   alpha_2 = alpha_1 (a + a_hat phat), beta_1 - beta_0 = alpha_1 (b + b_hat phat),
//   gamma_1 = alpha_1 (c + c_hat phat).
template <class T>
struct HarnessParamsT {
    T a, a_hat, b, b_hat, c, c_hat;
    T kappa() const { return T(1) + b * b_hat + a_hat * c; }
    T lambda() const { return a * c_hat - a_hat * c; }

    template <class U, class F>
    HarnessParamsT<U> map(F f) const
    {
        return {f(a), f(a_hat), f(b), f(b_hat), f(c), f(c_hat)};
    }
};
using HarnessParams = HarnessParamsT<MPoly>;

HarnessParamsT<RatFunc> to_ratfunc(const HarnessParams& hp);
HarnessParamsT<double> to_numeric(const HarnessParams& hp, const std::map<std::string, double>& b = {});

// alpha_n = a_n alpha_1 + a_hat_n gamma_0, beta_n = beta_0 + b_n alpha_1 +
// b_hat_n gamma_0, gamma_n = c_n alpha_1 + c_hat_n gamma_0.
struct SequenceParams {
    Sequence a, a_hat, b, b_hat, c, c_hat;
};

// a = a_2, a_hat = a_hat_2, b = b_1, b_hat = b_hat_1, c = c_1, c_hat = c_hat_1
HarnessParams harness_params(const SequenceParams& sp);

// a_n = 1, c_n = 0, c_hat_n = [n+1]_q: the q-Wiener and (alpha,q)-OU sequences
SequenceParams q_hermite_sequences(std::optional<Rational> q = std::nullopt);
// a_n = 1, b_n = n, c_hat_n = n + 1
SequenceParams poisson_sequences();
// Boundary values a_0 = a_hat_0 = a_hat_1 = b_0 = b_hat_0 = c_0 = 0 and
// a_1 = c_hat_0 = 1 are imposed whatever f returns at those indices.
SequenceParams make_sequences(std::function<MPoly(int)> a, std::function<MPoly(int)> a_hat,
                              std::function<MPoly(int)> b, std::function<MPoly(int)> b_hat,
                              std::function<MPoly(int)> c, std::function<MPoly(int)> c_hat);

// Recurrence built from the sequences and alpha_1, beta_0, gamma_0.
Recurrence build_recurrence(const SequenceParams& sp, const MPoly& alpha1, const MPoly& beta0, const MPoly& gamma0,
                            const std::string& var = "x");

struct NotAHarnessInfo {
    std::string coefficient; // "alpha", "beta" or "gamma"
    int n = 0;
    MPoly residual;
};

// Solves f = x alpha_1 + y gamma_0 for every recurrence coefficient by
// Cramer's rule at two sample times, then confirms each fit as an exact
// identity.  The determinant at the chosen samples must be a monomial.
// Throws NonUniqueDecomposition when alpha_1 and gamma_0 are proportional
// and NotAHarness (message names the first failing index) otherwise.
SequenceParams extract_harness_params(const Recurrence& rec, int n_max);
// As above, returning the failure instead of throwing.
std::optional<NotAHarnessInfo> harness_failure(const Recurrence& rec, int n_max);

template <class T>
struct LinearWeights {
    T A_hat, B_hat;
};

template <class T>
LinearWeights<T> linear_harness_weights(const T& ps, const T& pt, const T& pu)
{
    T d = pu - ps;
    if (is_zero(d))
        throw DegeneratePhat("phat(u) = phat(s)");
    return {(pu - pt) / d, (pt - ps) / d};
}

template <class T>
struct QHCoeffsT {
    T A, B, C, D, E, F;
    std::string branch; // "generic", "kappa=0", "lambda=0", "kappa=lambda=0"
};
using QHCoeffs = QHCoeffsT<double>;

// Coefficients of E(p_2(X_t;t) | F_{s,u}) = A p_2(X_s;s) + B p_1(X_s;s) p_1(X_u;u)
//   + C p_2(X_u;u) + D p_1(X_s;s) + E p_1(X_u;u) + F, for phat values at s < t < u.
// When kappa = lambda = 0, B is free; `free_B` selects it (default
// (pt-ps)(pu-pt)/((pu-ps) ps (a + a_hat pt))).
template <class T>
QHCoeffsT<T> qh_coeffs(const HarnessParamsT<T>& hp, const T& ps, const T& pt, const T& pu,
                       const std::optional<T>& free_B = std::nullopt)
{
    const T &a = hp.a, &ah = hp.a_hat, &c = hp.c, &ch = hp.c_hat;
    const T k = hp.kappa(), l = hp.lambda();
    auto nonzero = [](const T& v, const char* what) {
        if (is_zero(v))
            throw ZeroDenominator(what);
        return v;
    };
    const T at = nonzero(a + ah * pt, "a + a_hat phat(t)");
    const T dus = nonzero(pu - ps, "phat(u) - phat(s)");
    QHCoeffsT<T> r;
    if (is_zero(k) && is_zero(l)) {
        r.branch = "kappa=lambda=0";
        T ps_nz = nonzero(ps, "phat(s)");
        r.B = free_B ? *free_B : (pt - ps) * (pu - pt) / (dus * ps_nz * at);
        r.A = (pu - pt) / dus - r.B * ah * c / nonzero(ch, "c_hat");
        r.C = (pt - ps) / dus - ah * r.B * ps;
    } else if (is_zero(k)) {
        r.branch = "kappa=0";
        T den = at * dus * nonzero(ps, "phat(s)");
        r.B = -(pt - ps) * (pu - pt) / den;
        r.A = (a + ah * ps) * (pu - pt) * pt / den;
        r.C = (a + ah * pu) * (pt - ps) / (at * dus);
    } else if (is_zero(l)) {
        r.branch = "lambda=0";
        auto w = linear_harness_weights(ps, pt, pu);
        r.B = T(0);
        r.A = w.A_hat;
        r.C = w.B_hat;
    } else {
        r.branch = "generic";
        const T ach = a * ch, ahch = ah * ch, kl = k - l;
        T q = nonzero(ps * pu * ahch * k + pu * ach * k + ps * ach * kl + a * c * k,
                      "phat(s)phat(u)a_hat c_hat kappa + phat(u)a c_hat kappa + phat(s)a c_hat(kappa-lambda) + a c kappa");
        T den = at * dus * q;
        r.B = ach * l * (pt - ps) * (pu - pt) / den;
        r.A = (a + ah * ps) * (pu - pt) * (pu * pt * ahch * k + pu * ach * k + pt * ach * kl + a * c * k) / den;
        r.C = (a + ah * pu) * (pt - ps) * (pt * ps * ahch * k + ps * ach * kl + pt * ach * k + a * c * k) / den;
    }
    r.D = -hp.b * r.B;
    r.E = -hp.b_hat * r.B * ps;
    r.F = -r.B * ps;
    return r;
}

// Residuals of the six moment identities the coefficients must satisfy
// (integrating the QH relation against 1, p_2(X_s), p_2(X_u), p_1(X_s),
// p_1(X_u) and p_1(X_s)p_1(X_u)).  All zero for a correct solution.
template <class T>
std::vector<T> qh_identities(const HarnessParamsT<T>& hp, const QHCoeffsT<T>& k, const T& ps, const T& pt, const T& pu)
{
    const T &a = hp.a, &ah = hp.a_hat, &b = hp.b, &bh = hp.b_hat, &c = hp.c, &ch = hp.c_hat;
    auto al = [&](const T& p) { return a + ah * p; };
    auto be = [&](const T& p) { return b + bh * p; };
    auto ga = [&](const T& p) { return c + ch * p; };
    return {
        k.F + k.B * ps,
        k.A + k.C + k.B * al(ps) - T(1),
        k.A * ps * ga(ps) / al(ps) + k.C * pu * ga(pu) / al(pu) + k.B * ps * ga(pu) - pt * ga(pt) / al(pt),
        k.D + k.E + k.B * be(ps),
        k.D * ps + k.E * pu + k.B * ps * be(pu),
        k.A * ga(ps) + k.C * ga(pu) + k.B * (al(pu) * ga(ps) + be(pu) * be(ps) + pu) + k.D * be(ps) + k.E * be(pu) + k.F -
            ga(pt),
    };
}

// phat_2 = phat (c + c_hat phat) / (a + a_hat phat)
double phat2(const HarnessParamsT<double>& hp, double phat);

struct SystemViolation {
    std::string equation; // "e1".."e5", "init"
    int n = 0;
    MPoly lhs, rhs;
};

struct SystemCheck {
    bool ok = false;
    std::vector<SystemViolation> violations;
    bool positivity_checked = false;
    bool positive = true;
    std::optional<std::pair<int, double>> positivity_witness; // (n, phat)
};

// The five recursive equations in exact arithmetic for 0 <= n <= n_max
// (sequence entries at negative indices are zero), the initial conditions
// tying hp to the sequences, and Favard positivity
// (a_n + a_hat_n phat)(c_{n-1} + c_hat_{n-1} phat) > 0 for 1 <= n <= n_max + 1
// at the given phat samples.  Positivity needs numeric sequences; a free q
// is sampled over (-1, 1].
SystemCheck qh_system_check(const SequenceParams& sp, const HarnessParams& hp, int n_max,
                            const std::vector<double>& phat_samples = {0.25, 1.0, 4.0});

// Left and right sides of equation `eq` (1..5) at index n.
std::pair<MPoly, MPoly> qh_equation(int eq, const SequenceParams& sp, const HarnessParams& hp, int n);

struct BrycMap {
    RatFunc sigma, tau, q_bmw;
    // (b, b_hat) expressed through (eta, theta):
    //   b_hat = (eta + sigma theta)/(1 - sigma tau), b = (eta tau + theta)/(1 - sigma tau)
    RatFunc eta, theta;
    // q_bmw <= 1 + 2 sqrt(sigma tau) when sigma tau >= 0; only decided for numeric values
    std::optional<bool> constraint_ok;
};
// phat must be the symbol t (NotNormalized otherwise).
BrycMap bryc_map(const HarnessParams& hp, const MPoly& phat = MPoly::var("t"));

// max over triples of |f(t) - ((g(u)-g(t)) f(s) + (g(t)-g(s)) f(u)) / (g(u)-g(s))|
double fun_eq_property(const std::function<double(double)>& f, const std::function<double(double)>& g,
                       const std::vector<std::array<double, 3>>& triples);

} // namespace opm
