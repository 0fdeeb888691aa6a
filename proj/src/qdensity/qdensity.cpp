#include "opm/qdensity.hpp"

#include "opm/errors.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace opm {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kGaussHalfWidth = 14.0;

struct Rule {
    std::vector<double> x, w;
};

// P_n(z) and P_n'(z) by the three-term recurrence
std::pair<double, double> legendre_p(int n, double z)
{
    double p0 = 1.0, p1 = z;
    for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    return {p1, n * (z * p1 - p0) / (z * z - 1.0)};
}

// Gauss-Legendre nodes on [-1, 1] by Newton iteration on P_n.
const Rule& legendre(int n)
{
    static std::mutex mu;
    static std::map<int, Rule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end())
        return it->second;
    if (n < 2)
        throw ConfigError("quadrature needs at least 2 nodes");
    Rule r;
    r.x.resize(static_cast<std::size_t>(n));
    r.w.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
        for (int iter = 0; iter < 100; ++iter) {
            auto [p, dp] = legendre_p(n, z);
            double dz = p / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16)
                break;
        }
        double dp = legendre_p(n, z).second;
        double w = 2.0 / ((1.0 - z * z) * dp * dp);
        r.x[static_cast<std::size_t>(i)] = -z;
        r.x[static_cast<std::size_t>(n - 1 - i)] = z;
        r.w[static_cast<std::size_t>(i)] = w;
        r.w[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    return cache.emplace(n, std::move(r)).first->second;
}

double normal_pdf(double x, double mean, double var)
{
    double d = x - mean;
    return std::exp(-d * d / (2.0 * var)) / std::sqrt(2.0 * kPi * var);
}

void check_q(double q)
{
    if (!(q > -1.0 && q <= 1.0))
        throw ConfigError("q must lie in (-1, 1], got " + std::to_string(q));
}

double finite_or_throw(double v, double at)
{
    if (!std::isfinite(v))
        throw NonFinite("integrand is " + std::to_string(v) + " at x = " + std::to_string(at));
    return v;
}

NumRecurrence recurrence_at(const ProcessSpec& spec, double t, int n, const std::map<std::string, double>& extra)
{
    return eval_recurrence(spec.family.rec, time_bindings(spec, t, "t", extra), n);
}

double poly_at(const ProcessSpec& spec, int n, double x, double t, const std::map<std::string, double>& extra)
{
    return eval_polys(recurrence_at(spec, t, n, extra), x, n)[static_cast<std::size_t>(n)];
}

// phat_n(s) / phat_n(t) from the telescoping relation
double phat_ratio(const NumRecurrence& rs, const NumRecurrence& rt, int n)
{
    double r = 1.0;
    for (int k = 1; k <= n; ++k) {
        std::size_t i = static_cast<std::size_t>(k);
        r *= (rs.gamma[i - 1] * rt.alpha[i]) / (rs.alpha[i] * rt.gamma[i - 1]);
    }
    return r;
}

} // namespace

bool Support::bounded() const { return std::isfinite(lo) && std::isfinite(hi); }

Support support(double q)
{
    check_q(q);
    if (q == 1.0)
        return {};
    double e = 2.0 / std::sqrt(1.0 - q);
    return {-e, e};
}

int truncation_K(double q, double eps)
{
    double a = std::abs(q);
    if (a == 0.0)
        return 1;
    if (a >= 1.0)
        return 400;
    int k = static_cast<int>(std::ceil(std::log(eps) / std::log(a)));
    if (std::pow(a, k) >= eps)
        ++k;
    return std::min(std::max(k, 1), 400);
}

double q_pochhammer_inf(double q)
{
    int K = truncation_K(q);
    double r = 1.0, qk = 1.0;
    for (int k = 1; k <= K; ++k) {
        qk *= q;
        r *= 1.0 - qk;
    }
    return r;
}

double f_N(double x, double q)
{
    check_q(q);
    if (q == 1.0)
        return normal_pdf(x, 0.0, 1.0);
    double r2 = 4.0 - (1.0 - q) * x * x;
    if (r2 < 0.0)
        return 0.0;
    int K = truncation_K(q);
    double prod = 1.0, qk = 1.0;
    for (int k = 1; k <= K; ++k) {
        qk *= q;
        prod *= (1.0 + qk) * (1.0 + qk) - (1.0 - q) * x * x * qk;
    }
    return std::sqrt(1.0 - q) * q_pochhammer_inf(q) / (2.0 * kPi) * std::sqrt(r2) * prod;
}

double f_CN(double x, const QDensityParams& p)
{
    check_q(p.q);
    if (!(std::abs(p.rho) < 1.0))
        throw ConfigError("|rho| must be < 1, got " + std::to_string(p.rho));
    if (p.q == 1.0)
        return normal_pdf(x, p.rho * p.y, 1.0 - p.rho * p.rho);
    double base = f_N(x, p.q);
    if (base == 0.0)
        return 0.0;
    const double q = p.q, r = p.rho, s = 1.0 - q;
    int K = p.truncation_K > 0 ? p.truncation_K : truncation_K(q, p.eps_product);
    double prod = 1.0, qk = 1.0;
    for (int k = 0; k < K; ++k) {
        double q2k = qk * qk;
        double a = 1.0 - r * r * q2k;
        double w = a * a - s * r * qk * (1.0 + r * r * q2k) * x * p.y + s * r * r * q2k * (x * x + p.y * p.y);
        if (!(w > 0.0))
            throw ProductDivergence("w_" + std::to_string(k) + " = " + std::to_string(w) + " at x = " +
                                    std::to_string(x) + ", y = " + std::to_string(p.y));
        prod *= (1.0 - r * r * qk) / w;
        qk *= q;
    }
    return base * prod;
}

double integrate(const std::function<double(double)>& f, Support s, int n_nodes)
{
    const Rule& r = legendre(n_nodes);
    double sum = 0.0;
    if (s.bounded()) {
        double m = 0.5 * (s.lo + s.hi), c = 0.5 * (s.hi - s.lo);
        for (std::size_t i = 0; i < r.x.size(); ++i) {
            double th = 0.5 * kPi * r.x[i];
            double x = m + c * std::sin(th);
            sum += r.w[i] * finite_or_throw(f(x), x) * c * std::cos(th);
        }
        return sum * 0.5 * kPi;
    }
    double lo = std::isfinite(s.lo) ? s.lo : -kGaussHalfWidth;
    double hi = std::isfinite(s.hi) ? s.hi : kGaussHalfWidth;
    double m = 0.5 * (lo + hi), c = 0.5 * (hi - lo);
    for (std::size_t i = 0; i < r.x.size(); ++i) {
        double x = m + c * r.x[i];
        sum += r.w[i] * finite_or_throw(f(x), x);
    }
    return sum * c;
}

double integrate_cn(const std::function<double(double)>& g, const QDensityParams& p, int n_nodes)
{
    if (p.q == 1.0) {
        double mean = p.rho * p.y, sd = std::sqrt(1.0 - p.rho * p.rho);
        return integrate([&](double z) { return g(mean + sd * z) * normal_pdf(z, 0.0, 1.0); }, Support{}, n_nodes);
    }
    return integrate([&](double x) { return g(x) * f_CN(x, p); }, support(p.q), n_nodes);
}

NumMatrix orthogonality_matrix(double q, int n_max, int n_nodes)
{
    auto rec = eval_recurrence(q_hermite().rec, {{"q", q}}, n_max);
    NumMatrix m(static_cast<std::size_t>(n_max + 1));
    std::vector<std::vector<double>> vals;
    QDensityParams p;
    p.q = q;
    for (int i = 0; i <= n_max; ++i)
        for (int j = i; j <= n_max; ++j) {
            double v = integrate_cn(
                [&](double x) {
                    auto h = eval_polys(rec, x, n_max);
                    return h[static_cast<std::size_t>(i)] * h[static_cast<std::size_t>(j)];
                },
                p, n_nodes);
            m(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = v;
            m(static_cast<std::size_t>(j), static_cast<std::size_t>(i)) = v;
        }
    return m;
}

NumMatrix asc_orthogonality_matrix(const QDensityParams& p, int n_max, int n_nodes)
{
    auto rec = eval_recurrence(al_salam_chihara().rec, {{"q", p.q}, {"rho", p.rho}, {"y", p.y}}, n_max);
    NumMatrix m(static_cast<std::size_t>(n_max + 1));
    for (int i = 0; i <= n_max; ++i)
        for (int j = i; j <= n_max; ++j) {
            double v = integrate_cn(
                [&](double x) {
                    auto h = eval_polys(rec, x, n_max);
                    return h[static_cast<std::size_t>(i)] * h[static_cast<std::size_t>(j)];
                },
                p, n_nodes);
            m(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = v;
            m(static_cast<std::size_t>(j), static_cast<std::size_t>(i)) = v;
        }
    return m;
}

std::vector<double> kernel_terms(double x, double y, const ProcessSpec& spec, double s, double t, int K,
                                 const std::map<std::string, double>& extra)
{
    NumRecurrence rt = recurrence_at(spec, t, K, extra), rs = recurrence_at(spec, s, K, extra);
    // orthonormal recurrence x u_n = b_{n+1} u_{n+1} + beta_n u_n + b_n u_{n-1}
    auto orthonormal = [K](const NumRecurrence& r, double z) {
        std::vector<double> u(static_cast<std::size_t>(K + 1));
        u[0] = 1.0;
        double prev = 0.0, bprev = 0.0;
        for (int n = 0; n < K; ++n) {
            std::size_t i = static_cast<std::size_t>(n);
            double ag = r.alpha[i + 1] * r.gamma[i];
            if (!(ag > 0.0))
                throw DegeneratePhat("alpha_" + std::to_string(n + 1) + " gamma_" + std::to_string(n) + " = " +
                                     std::to_string(ag));
            double b = std::copysign(std::sqrt(ag), r.alpha[i + 1]);
            double next = ((z - r.beta[i]) * u[i] - bprev * prev) / b;
            prev = u[i];
            bprev = b;
            u[i + 1] = next;
        }
        return u;
    };
    auto ux = orthonormal(rt, x), uy = orthonormal(rs, y);
    std::vector<double> terms(static_cast<std::size_t>(K + 1));
    double ratio = 1.0;
    for (int n = 0; n <= K; ++n) {
        std::size_t i = static_cast<std::size_t>(n);
        if (n >= 1)
            ratio *= (rs.gamma[i - 1] * rt.alpha[i]) / (rs.alpha[i] * rt.gamma[i - 1]);
        terms[i] = ux[i] * uy[i] * std::sqrt(ratio);
    }
    return terms;
}

double kernel_expansion(double x, double y, const ProcessSpec& spec, double s, double t, int K,
                        const std::map<std::string, double>& extra)
{
    double sum = 0.0;
    for (double v : kernel_terms(x, y, spec, s, t, K, extra))
        sum += v;
    return sum;
}

double numeric_param(const ProcessSpec& spec, const std::string& name, const std::map<std::string, double>& extra)
{
    auto it = spec.params.find(name);
    if (it != spec.params.end())
        return to_double(it->second);
    auto e = extra.find(name);
    if (e != extra.end())
        return e->second;
    throw ConfigError("parameter '" + name + "' has no numeric value");
}

namespace {

// f_CN parameters of the standardized transition and the scale of X_t
struct StdTransition {
    QDensityParams p;
    double scale = 1.0; // X_t = scale * standardized variable
};

StdTransition standardize(const ProcessSpec& spec, double y, double s, double t, const std::map<std::string, double>& extra)
{
    if (t < s)
        throw ConfigError("transition needs s <= t");
    StdTransition r;
    r.p.q = numeric_param(spec, "q", extra);
    switch (spec.name) {
    case ProcessName::alphaQOU:
        r.p.rho = std::exp(-numeric_param(spec, "alpha", extra) * (t - s));
        r.p.y = y;
        return r;
    case ProcessName::qWiener:
        if (!(t > 0.0))
            throw ConfigError("q-Wiener transition needs t > 0");
        r.scale = std::sqrt(t);
        r.p.rho = s > 0.0 ? std::sqrt(s / t) : 0.0;
        r.p.y = s > 0.0 ? y / std::sqrt(s) : 0.0;
        return r;
    default:
        throw ConfigError("no transition density for process " + to_string(spec.name));
    }
}

} // namespace

double transition_density(const ProcessSpec& spec, double x, double y, double s, double t,
                          const std::map<std::string, double>& extra)
{
    StdTransition st = standardize(spec, y, s, t, extra);
    return f_CN(x / st.scale, st.p) / st.scale;
}

double marginal_density(const ProcessSpec& spec, double x, double t, const std::map<std::string, double>& extra)
{
    double q = numeric_param(spec, "q", extra);
    switch (spec.name) {
    case ProcessName::alphaQOU:
        return f_N(x, q);
    case ProcessName::qWiener: {
        double sc = std::sqrt(t);
        return f_N(x / sc, q) / sc;
    }
    default:
        throw ConfigError("no marginal density for process " + to_string(spec.name));
    }
}

double conditional_expectation(const std::function<double(double)>& g, const ProcessSpec& spec, double y, double s,
                               double t, const std::map<std::string, double>& extra, int n_nodes)
{
    if (spec.name == ProcessName::Poisson) {
        double lam = numeric_param(spec, "mu", extra) * (t - s);
        if (lam < 0.0)
            throw ConfigError("transition needs s <= t");
        if (lam == 0.0)
            return g(y);
        int kmax = static_cast<int>(lam + 20.0 * std::sqrt(lam) + 40.0);
        double sum = 0.0;
        for (int k = 0; k <= kmax; ++k)
            sum += g(y + k) * std::exp(k * std::log(lam) - lam - std::lgamma(k + 1.0));
        return sum;
    }
    StdTransition st = standardize(spec, y, s, t, extra);
    return integrate_cn([&](double u) { return g(st.scale * u); }, st.p, n_nodes);
}

double martingale_integral_check(const ProcessSpec& spec, int n, double y, double s, double t,
                                 const std::map<std::string, double>& extra)
{
    NumRecurrence rt = recurrence_at(spec, t, n, extra);
    double lhs = conditional_expectation(
        [&](double x) { return eval_polys(rt, x, n)[static_cast<std::size_t>(n)]; }, spec, y, s, t, extra);
    return std::abs(lhs - poly_at(spec, n, y, s, extra));
}

double reversed_martingale_residual(const ProcessSpec& spec, int n, double x, double s, double t,
                                    const std::map<std::string, double>& extra)
{
    NumRecurrence rs = recurrence_at(spec, s, n, extra), rt = recurrence_at(spec, t, n, extra);
    double q = numeric_param(spec, "q", extra);
    // integrate over y = scale_s * u with u distributed by f_N
    double scale_s = spec.name == ProcessName::qWiener ? std::sqrt(s) : 1.0;
    double num = integrate(
        [&](double u) {
            double y = scale_s * u;
            return eval_polys(rs, y, n)[static_cast<std::size_t>(n)] * f_N(u, q) *
                   transition_density(spec, x, y, s, t, extra);
        },
        support(q));
    double lhs = num / marginal_density(spec, x, t, extra);
    double rhs = phat_ratio(rs, rt, n) * eval_polys(rt, x, n)[static_cast<std::size_t>(n)];
    return std::abs(lhs - rhs);
}

double chapman_kolmogorov_error(double q, double alpha, double s, double t, double u)
{
    double r1 = std::exp(-alpha * (t - s)), r2 = std::exp(-alpha * (u - t));
    Support sup = support(q);
    double edge = sup.bounded() ? sup.hi : 2.5;
    double worst = 0.0;
    for (double fx : {-0.8, -0.4, 0.0, 0.4, 0.8})
        for (double fy : {-0.8, -0.4, 0.0, 0.4, 0.8}) {
            double x = fx * edge, y = fy * edge;
            QDensityParams p1{q, r1, y}, direct{q, r1 * r2, y};
            double lhs = integrate_cn(
                [&](double z) {
                    QDensityParams p2{q, r2, z};
                    return f_CN(x, p2);
                },
                p1);
            worst = std::max(worst, std::abs(lhs - f_CN(x, direct)));
        }
    return worst;
}

} // namespace opm
