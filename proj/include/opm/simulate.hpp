#pragma once

#include "opm/errors.hpp"
#include "opm/qdensity.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace opm {

// Per-path generator: the stream depends only on (seed, path index), so
// serial and threaded runs draw the same numbers.
using Rng = std::mt19937_64;
Rng path_rng(std::uint64_t seed, std::uint64_t path_index);

// Runs f(i) for i in [0, n) on a fixed pool of threads.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f);

// CDF tabulated on the nodes x_i = m + c sin(theta_i), theta_i uniform in
// [-pi/2, pi/2], integrated by the trapezoid rule in theta and inverted by
// linear interpolation.
struct TabulatedCdf {
    std::vector<double> grid;
    std::vector<double> cdf;
    QDensityParams params;

    double operator()(double x) const;
    double quantile(double u) const;
};

TabulatedCdf tabulate_cdf(const std::function<double(double)>& density, Support s, int nodes,
                          const QDensityParams& params = {});
TabulatedCdf stationary_cdf(double q, int nodes = 2048);
TabulatedCdf transition_cdf(const QDensityParams& p, int nodes = 2048);

// Draws from f_N and from f_CN(. | y, rho, q).  For |q| < 1 the conditioning
// value is bucketed at the stationary quantiles j/bins, one tabulated CDF per
// bucket edge, and y inside a bucket blends the two edge CDFs linearly.  For
// q = 1 the draws are exact Gaussian.
class QGaussSampler {
public:
    explicit QGaussSampler(double q, int bins = 256, int nodes = 2048);

    double q() const { return q_; }
    double stationary(Rng& g) const;
    // tables for rho must have been built with prepare(rho) beforehand
    double transition(double y, double rho, Rng& g) const;
    void prepare(double rho);
    const TabulatedCdf& stationary_table() const { return stat_; }

private:
    struct Tables {
        std::vector<double> y_nodes;
        std::vector<std::vector<double>> cdf; // one row per y node, on stat_.grid
    };
    double draw_blended(const Tables& t, double y, double u) const;
    // tables are shared between samplers with equal (q, rho, bins, nodes)
    static std::shared_ptr<const Tables> build_tables(double q, double rho, int bins, int nodes,
                                                      const TabulatedCdf& stat);

    double q_;
    int bins_, nodes_;
    TabulatedCdf stat_;
    std::map<double, std::shared_ptr<const Tables>> tables_;
};

struct PathSample {
    std::vector<double> times;
    std::vector<double> values;
    std::uint64_t seed = 0;
};

// Stationary (alpha,q)-OU observed at increasing times.
std::vector<PathSample> sample_ou_path(double q, double alpha, const std::vector<double>& times, std::size_t n_paths,
                                       std::uint64_t seed);
// q-Wiener X_tau = sqrt(tau) Y_{log tau} with Y the (1/2,q)-OU; tau > 0.
std::vector<PathSample> sample_qwiener_path(double q, const std::vector<double>& times, std::size_t n_paths,
                                            std::uint64_t seed, bool include_zero = false);
// Poisson process with rate mu started at X_0 = 0; times >= 0.
std::vector<PathSample> sample_poisson_path(double mu, const std::vector<double>& times, std::size_t n_paths,
                                            std::uint64_t seed);
// dispatch on a named process with numeric parameters
std::vector<PathSample> sample_paths(const ProcessSpec& spec, const std::vector<double>& times, std::size_t n_paths,
                                     std::uint64_t seed, const std::map<std::string, double>& extra = {});

// CSV with header "path_id,time,value"
void write_paths_csv(std::ostream& os, const std::vector<PathSample>& paths);

// x-coefficients of p_0(x;t) .. p_n(x;t) and the values phat_k(t)
std::vector<std::vector<double>> martingale_coeffs(const ProcessSpec& spec, int n, double t,
                                                   const std::map<std::string, double>& extra = {});
std::vector<double> phat_values(const ProcessSpec& spec, int n, double t, const std::map<std::string, double>& extra = {});
double horner(const std::vector<double>& c, double x);

// Least squares with heteroskedasticity-robust (HC0) standard errors.
// `columns` holds one vector per regressor.
struct OlsFit {
    std::vector<double> beta;
    std::vector<double> se;
};
OlsFit ols_hc0(const std::vector<std::vector<double>>& columns, const std::vector<double>& y);

struct MCComponent {
    std::string name;
    double estimate = 0.0;
    double std_error = 0.0;
    double target = 0.0;
    double z_score = 0.0;
};

// Top-level fields repeat the component with the largest |z|.
struct MCReport {
    std::string name;
    double estimate = 0.0;
    double std_error = 0.0;
    double target = 0.0;
    double z_score = 0.0;
    std::size_t n_paths = 0;
    std::uint64_t seed = 0;
    bool exact = false; // nothing random to test
    bool pass = false;
    int attempts = 1;
    std::vector<MCComponent> components;
};

constexpr double kZThreshold = 3.0;

MCReport summarize(std::string name, std::vector<MCComponent> components, std::size_t n_paths, std::uint64_t seed);

// Runs the check; on failure reruns once with 4x paths and a fresh seed.
MCReport with_retry(const std::function<MCReport(std::size_t, std::uint64_t)>& check, std::size_t n_paths,
                    std::uint64_t seed);

// Regresses p_n(X_t;t) on p_n(X_s;s): slope 1, intercept 0.  The reversed
// variant regresses p_n(X_s;s) on p_n(X_t;t) with slope phat_n(s)/phat_n(t).
MCReport martingale_mc_check(const ProcessSpec& spec, int n, double s, double t, std::size_t n_paths,
                             std::uint64_t seed, bool reversed = false,
                             const std::map<std::string, double>& extra = {});

// p_1(X_t) on (1, p_1(X_s), p_1(X_u)) against the linear harness weights and
// p_2(X_t) on the six quadratic regressors against qh_coeffs.
MCReport harness_mc_check(const ProcessSpec& spec, double s, double t, double u, std::size_t n_paths,
                          std::uint64_t seed, const std::map<std::string, double>& extra = {});

// Conditional moments of X_t given (X_s, X_u) = (k, n) against k + Bin(n-k, p),
// p = (t-s)/(u-s).  One pooled z per moment order 1..4; buckets with n = k
// must reproduce X_t = k exactly.
MCReport poisson_bridge_check(double mu, double s, double t, double u, std::size_t n_paths, std::uint64_t seed);

// binomial bridge moment E((k + Y)^r), Y ~ Bin(n - k, p)
double bridge_moment(int k, int n, double p, int r);

// Two-step s -> t -> u against one-step s -> u sampling of the (alpha,q)-OU:
// E(X_s^i X_u^j), 1 <= i + j <= 3, compared as two independent samples.
MCReport ck_simulation_check(double q, double alpha, double s, double t, double u, std::size_t n_paths,
                             std::uint64_t seed);

struct KsResult {
    double statistic = 0.0;
    double bound = 0.0; // 1.63 / sqrt(n)
    bool pass = false;
    std::size_t n_draws = 0;
    int attempts = 1;
};
// Stationary draws against the tabulated f_N CDF (Gaussian CDF at q = 1).
// With `retry` a rejection is rerun once with 4x draws, as for the MC checks.
KsResult ks_stationary(double q, std::size_t n_draws, std::uint64_t seed, bool retry = true);

} // namespace opm
