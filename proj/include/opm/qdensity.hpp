#pragma once

#include "opm/mpr.hpp"
#include "opm/nummatrix.hpp"

#include <functional>
#include <limits>

namespace opm {

// Real-valued densities of the q-Gaussian family.  q = 1 dispatches to the
// Gaussian closed forms; the infinite products are only used for |q| < 1.

struct Support {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    bool bounded() const;
};

// S(q) = [-2/sqrt(1-q), 2/sqrt(1-q)], the whole line for q = 1
Support support(double q);

// smallest K with |q|^K < eps, capped at 400; 1 for q = 0
int truncation_K(double q, double eps = 1e-16);

// (q;q)_inf truncated at truncation_K(q)
double q_pochhammer_inf(double q);

double f_N(double x, double q);

struct QDensityParams {
    double q = 0.0;
    double rho = 0.0;
    double y = 0.0;
    int truncation_K = 0; // 0: choose from eps_product
    double eps_product = 1e-16;
};

// Al-Salam-Chihara transition density f_CN(x | y, rho, q).
double f_CN(double x, const QDensityParams& p);

// Gauss-Legendre quadrature.  On a bounded support the substitution
// x = m + c sin(theta) absorbs the square-root endpoint behaviour; an
// unbounded support is replaced by [-14, 14], so callers integrate
// standardized variables there.  Throws NonFinite on NaN/Inf at a node.
double integrate(const std::function<double(double)>& f, Support s, int n_nodes = 400);

// Expectation of g under f_CN(. | y, rho, q).  For q = 1 the Gaussian is
// integrated in the standardized variable, so narrow conditionals are fine.
double integrate_cn(const std::function<double(double)>& g, const QDensityParams& p, int n_nodes = 400);

// entries int H_m H_n f_N, 0 <= m, n <= n_max
NumMatrix orthogonality_matrix(double q, int n_max, int n_nodes = 400);
// entries int P_m P_n f_CN for the Al-Salam-Chihara polynomials
NumMatrix asc_orthogonality_matrix(const QDensityParams& p, int n_max, int n_nodes = 400);

// Partial sum sum_{n<=K} p_n(x;t) p_n(y;s) / phat_n(t), evaluated with the
// orthonormal recurrence to stay well scaled.  `extra` binds symbolic
// parameters of the spec.
double kernel_expansion(double x, double y, const ProcessSpec& spec, double s, double t, int K,
                        const std::map<std::string, double>& extra = {});
// individual terms n = 0..K of the same sum
std::vector<double> kernel_terms(double x, double y, const ProcessSpec& spec, double s, double t, int K,
                                 const std::map<std::string, double>& extra = {});

// Numeric parameter value from the spec or `extra`; ConfigError when absent.
double numeric_param(const ProcessSpec& spec, const std::string& name, const std::map<std::string, double>& extra = {});

// Transition density of X_t given X_s = y (q-Wiener, (alpha,q)-OU).
double transition_density(const ProcessSpec& spec, double x, double y, double s, double t,
                          const std::map<std::string, double>& extra = {});
// Marginal density of X_t (q-Wiener, (alpha,q)-OU).
double marginal_density(const ProcessSpec& spec, double x, double t, const std::map<std::string, double>& extra = {});

// E(g(X_t) | X_s = y) for the named processes (Poisson by pmf summation).
double conditional_expectation(const std::function<double(double)>& g, const ProcessSpec& spec, double y, double s,
                               double t, const std::map<std::string, double>& extra = {}, int n_nodes = 400);

// |E(p_n(X_t;t) | X_s = y) - p_n(y;s)|
double martingale_integral_check(const ProcessSpec& spec, int n, double y, double s, double t,
                                 const std::map<std::string, double>& extra = {});

// |int p_n(y;s) f_s(y) eta(x|y) dy / f_t(x) - phat_n(s)/phat_n(t) p_n(x;t)|
double reversed_martingale_residual(const ProcessSpec& spec, int n, double x, double s, double t,
                                    const std::map<std::string, double>& extra = {});

// max over a 5x5 grid of |int f(x|z; t->u) f(z|y; s->t) dz - f(x|y; s->u)| for the (alpha,q)-OU
double chapman_kolmogorov_error(double q, double alpha, double s, double t, double u);

} // namespace opm
