#pragma once

#include "opm/mpoly.hpp"
#include "opm/trimatrix.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace opm {

// Lazily evaluated index -> MPoly sequence.  Negative indices are zero.
// Values are memoized behind a mutex; copies share the cache.
class Sequence {
public:
    using Fn = std::function<MPoly(int)>;
    Sequence();
    explicit Sequence(Fn f);
    MPoly operator()(int n) const;

private:
    struct State;
    std::shared_ptr<State> st_;
};

// x p_n = alpha_{n+1} p_{n+1} + beta_n p_n + gamma_{n-1} p_{n-1}
struct Recurrence {
    Sequence alpha; // alpha_n, n >= 1
    Sequence beta;  // beta_n, n >= 0
    Sequence gamma; // gamma_n, n >= 0 (gamma_{n-1} multiplies p_{n-1})
    std::string var = "x";
};

enum class FamilyName { qHermite, AlSalamChihara, Charlier, HermiteProb, ChebyshevU, custom };

std::string to_string(FamilyName f);

struct PolyFamily {
    FamilyName name = FamilyName::custom;
    Recurrence rec;
    std::map<std::string, Rational> params;
    // false only for user-supplied families with no known orthogonality measure
    bool known_norms = true;
};

// A missing parameter stays symbolic (symbol "q", "rho", "y", "mu").
PolyFamily q_hermite(std::optional<Rational> q = std::nullopt);
PolyFamily hermite_prob();
PolyFamily chebyshev_u();
PolyFamily al_salam_chihara(std::optional<Rational> q = std::nullopt,
                            std::optional<Rational> rho = std::nullopt,
                            std::optional<Rational> y = std::nullopt);
// x p_n = p_{n+1} + (n + mu t) p_n + n mu t p_{n-1}
PolyFamily charlier(std::optional<Rational> mu = std::nullopt);
// Time-dependent q-Hermite families of the q-Wiener and (alpha,q)-OU
// processes: gamma_{n-1} = t [n]_q, resp. alpha_n = E_t^{-1},
// gamma_{n-1} = [n]_q E_t with E_t standing for exp(alpha t).
PolyFamily q_wiener_family(std::optional<Rational> q = std::nullopt);
PolyFamily ou_family(std::optional<Rational> q = std::nullopt);
PolyFamily custom_family(Recurrence rec, bool known_norms = false);

// Symbolic value of a parameter: the bound constant, or the symbol itself.
MPoly param(const std::map<std::string, Rational>& params, const std::string& name);

std::vector<MPoly> generate(const PolyFamily& family, int n_max);
std::vector<MPoly> generate(const Recurrence& rec, int n_max);

TriMatrix coeff_matrix(const std::vector<MPoly>& polys, const std::string& var = "x");

struct LinearCoeffs {
    MPoly v1;          // v_{1,n+1}  = alpha_{n+1} / alpha_1
    MPoly v0;          // v_{0,n}    = beta_n / alpha_1
    MPoly v0_centered; // v_{0,n}    = (beta_n - beta_0) / alpha_1, the p_1 p_n coefficient
    MPoly vm1;         // v_{-1,n-1} = gamma_{n-1} / alpha_1
};
LinearCoeffs linear_product_coeffs(const Recurrence& rec, int n);

// p_2 p_n = r2 p_{n+2} + r1 p_{n+1} + r0 p_n + rm1 p_{n-1} + rm2 p_{n-2}
struct QuadraticCoeffs {
    MPoly r2, r1, r0, rm1, rm2;
};
QuadraticCoeffs quadratic_product_coeffs(const Recurrence& rec, int n);

struct NormSequence {
    std::vector<MPoly> phat; // phat[0] = 1
};
// gamma_{n-1} phat_{n-1} = alpha_n phat_n
NormSequence norms(const PolyFamily& family, int n_max);

// Numeric evaluation of the recurrence at fixed parameter values.
struct NumRecurrence {
    std::vector<double> alpha, beta, gamma; // alpha[n], beta[n], gamma[n]
};
NumRecurrence eval_recurrence(const Recurrence& rec, const std::map<std::string, double>& b, int n_max);
// p_0(x) .. p_{n_max}(x)
std::vector<double> eval_polys(const NumRecurrence& r, double x, int n_max);

} // namespace opm
