#include "opm/simulate.hpp"

#include "opm/harness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>
#include <tuple>

namespace opm {

namespace {

constexpr double kPi = 3.14159265358979323846;

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double uniform01(Rng& g) { return std::uniform_real_distribution<double>(0.0, 1.0)(g); }

void check_times(const std::vector<double>& times)
{
    if (times.empty())
        throw ConfigError("empty time list");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw ConfigError("times must be strictly increasing");
}

// inverse of a piecewise-linear CDF given on `grid`; `at(i)` is the CDF at node i
template <class F>
double invert(const std::vector<double>& grid, std::size_t n, F at, double u)
{
    std::size_t lo = 0, hi = n - 1;
    if (u <= at(0))
        return grid[0];
    if (u >= at(hi))
        return grid[hi];
    while (hi - lo > 1) {
        std::size_t mid = (lo + hi) / 2;
        (at(mid) < u ? lo : hi) = mid;
    }
    double a = at(lo), b = at(hi);
    if (!(b > a))
        return grid[lo];
    return grid[lo] + (grid[hi] - grid[lo]) * (u - a) / (b - a);
}

} // namespace

Rng path_rng(std::uint64_t seed, std::uint64_t path_index)
{
    // splitmix64 finalizer over (seed, index) so nearby indices give unrelated seeds
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (path_index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return Rng(z ^ (z >> 31));
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f)
{
    std::size_t workers = std::max(1u, std::min(16u, std::thread::hardware_concurrency()));
    workers = std::min<std::size_t>(workers, std::max<std::size_t>(1, n / 64));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            f(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w * n / workers; i < (w + 1) * n / workers; ++i)
                    f(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    for (auto& th : pool)
        th.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

// ---- tabulated CDFs

double TabulatedCdf::operator()(double x) const
{
    if (x <= grid.front())
        return 0.0;
    if (x >= grid.back())
        return 1.0;
    auto it = std::upper_bound(grid.begin(), grid.end(), x);
    std::size_t i = static_cast<std::size_t>(it - grid.begin());
    double w = (x - grid[i - 1]) / (grid[i] - grid[i - 1]);
    return cdf[i - 1] + w * (cdf[i] - cdf[i - 1]);
}

double TabulatedCdf::quantile(double u) const
{
    return invert(grid, grid.size(), [this](std::size_t i) { return cdf[i]; }, u);
}

TabulatedCdf tabulate_cdf(const std::function<double(double)>& density, Support s, int nodes,
                          const QDensityParams& params)
{
    if (!s.bounded())
        throw ConfigError("tabulation needs a bounded support");
    if (nodes < 3)
        throw ConfigError("at least 3 tabulation nodes");
    TabulatedCdf t;
    t.params = params;
    const double m = 0.5 * (s.lo + s.hi), c = 0.5 * (s.hi - s.lo);
    const std::size_t n = static_cast<std::size_t>(nodes);
    std::vector<double> g(n, 0.0);
    t.grid.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double th = -0.5 * kPi + kPi * static_cast<double>(i) / static_cast<double>(n - 1);
        t.grid[i] = m + c * std::sin(th);
        // the endpoints carry zero weight; skipping them avoids evaluating on the boundary
        if (i != 0 && i != n - 1)
            g[i] = density(t.grid[i]) * c * std::cos(th);
    }
    t.grid.front() = s.lo;
    t.grid.back() = s.hi;
    t.cdf.assign(n, 0.0);
    for (std::size_t i = 1; i < n; ++i)
        t.cdf[i] = t.cdf[i - 1] + 0.5 * (g[i - 1] + g[i]);
    double total = t.cdf.back();
    if (!(total > 0.0) || !std::isfinite(total))
        throw NonFinite("tabulated density has no mass");
    for (double& v : t.cdf)
        v /= total;
    t.cdf.back() = 1.0;
    return t;
}

TabulatedCdf stationary_cdf(double q, int nodes)
{
    QDensityParams p;
    p.q = q;
    return tabulate_cdf([q](double x) { return f_N(x, q); }, support(q), nodes, p);
}

TabulatedCdf transition_cdf(const QDensityParams& p, int nodes)
{
    return tabulate_cdf([&p](double x) { return f_CN(x, p); }, support(p.q), nodes, p);
}

// ---- sampler

QGaussSampler::QGaussSampler(double q, int bins, int nodes) : q_(q), bins_(bins), nodes_(nodes)
{
    if (!(q > -1.0 && q <= 1.0))
        throw ConfigError("q must lie in (-1, 1], got " + std::to_string(q));
    if (bins < 1)
        throw ConfigError("at least one bucket");
    if (q < 1.0)
        stat_ = stationary_cdf(q, nodes);
}

std::shared_ptr<const QGaussSampler::Tables> QGaussSampler::build_tables(double q, double rho, int bins, int nodes,
                                                                         const TabulatedCdf& stat)
{
    using Key = std::tuple<double, double, int, int>;
    static std::mutex mu;
    static std::map<Key, std::shared_ptr<const Tables>> cache;
    const Key key{q, rho, bins, nodes};
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end())
            return it->second;
    }
    auto t = std::make_shared<Tables>();
    const std::size_t nb = static_cast<std::size_t>(bins) + 1;
    t->y_nodes.resize(nb);
    for (std::size_t j = 0; j < nb; ++j)
        t->y_nodes[j] = stat.quantile(static_cast<double>(j) / bins);
    t->cdf.resize(nb);
    parallel_for(nb, [&](std::size_t j) {
        QDensityParams p;
        p.q = q;
        p.rho = rho;
        p.y = t->y_nodes[j];
        t->cdf[j] = transition_cdf(p, nodes).cdf;
    });
    std::lock_guard<std::mutex> lock(mu);
    if (cache.size() >= 64) // about 4 MB per entry at the default sizes
        cache.clear();
    cache.emplace(key, t);
    return t;
}

void QGaussSampler::prepare(double rho)
{
    if (!(std::abs(rho) < 1.0))
        throw ConfigError("|rho| must be < 1");
    if (q_ == 1.0 || tables_.count(rho))
        return;
    tables_.emplace(rho, build_tables(q_, rho, bins_, nodes_, stat_));
}

double QGaussSampler::stationary(Rng& g) const
{
    if (q_ == 1.0)
        return std::normal_distribution<double>(0.0, 1.0)(g);
    return stat_.quantile(uniform01(g));
}

double QGaussSampler::draw_blended(const Tables& t, double y, double u) const
{
    const auto& yn = t.y_nodes;
    std::size_t j;
    double w;
    if (y <= yn.front()) {
        j = 0;
        w = 0.0;
    } else if (y >= yn.back()) {
        j = yn.size() - 2;
        w = 1.0;
    } else {
        j = static_cast<std::size_t>(std::upper_bound(yn.begin(), yn.end(), y) - yn.begin()) - 1;
        w = (y - yn[j]) / (yn[j + 1] - yn[j]);
    }
    const auto& a = t.cdf[j];
    const auto& b = t.cdf[j + 1];
    return invert(stat_.grid, a.size(), [&](std::size_t i) { return (1.0 - w) * a[i] + w * b[i]; }, u);
}

double QGaussSampler::transition(double y, double rho, Rng& g) const
{
    if (q_ == 1.0)
        return rho * y + std::sqrt(1.0 - rho * rho) * std::normal_distribution<double>(0.0, 1.0)(g);
    auto it = tables_.find(rho);
    if (it == tables_.end())
        throw Error("transition tables for rho = " + std::to_string(rho) + " were not prepared");
    return draw_blended(*it->second, y, uniform01(g));
}

// ---- paths

namespace {

std::vector<PathSample> ou_paths(double q, const std::vector<double>& rhos, std::size_t n_paths, std::uint64_t seed,
                                 const std::function<void(PathSample&)>& finish, std::size_t n_times)
{
    QGaussSampler sampler(q);
    for (double r : rhos)
        sampler.prepare(r);
    std::vector<PathSample> out(n_paths);
    parallel_for(n_paths, [&](std::size_t i) {
        Rng g = path_rng(seed, i);
        PathSample& p = out[i];
        p.seed = seed;
        p.values.resize(n_times);
        p.values[0] = sampler.stationary(g);
        for (std::size_t k = 1; k < n_times; ++k)
            p.values[k] = sampler.transition(p.values[k - 1], rhos[k - 1], g);
        finish(p);
    });
    return out;
}

} // namespace

std::vector<PathSample> sample_ou_path(double q, double alpha, const std::vector<double>& times, std::size_t n_paths,
                                       std::uint64_t seed)
{
    check_times(times);
    if (!(alpha > 0.0))
        throw ConfigError("alpha must be positive");
    std::vector<double> rhos;
    for (std::size_t k = 1; k < times.size(); ++k)
        rhos.push_back(std::exp(-alpha * (times[k] - times[k - 1])));
    return ou_paths(q, rhos, n_paths, seed, [&times](PathSample& p) { p.times = times; }, times.size());
}

std::vector<PathSample> sample_qwiener_path(double q, const std::vector<double>& times, std::size_t n_paths,
                                            std::uint64_t seed, bool include_zero)
{
    check_times(times);
    if (!(times.front() > 0.0))
        throw ConfigError("q-Wiener times must be positive");
    // alpha = 1/2: Y runs at log(tau), rho = exp(-(log t2 - log t1)/2) = sqrt(t1/t2)
    std::vector<double> rhos;
    for (std::size_t k = 1; k < times.size(); ++k)
        rhos.push_back(std::sqrt(times[k - 1] / times[k]));
    auto finish = [&times, include_zero](PathSample& p) {
        for (std::size_t k = 0; k < times.size(); ++k)
            p.values[k] *= std::sqrt(times[k]);
        p.times = times;
        if (include_zero) {
            p.times.insert(p.times.begin(), 0.0);
            p.values.insert(p.values.begin(), 0.0);
        }
    };
    return ou_paths(q, rhos, n_paths, seed, finish, times.size());
}

std::vector<PathSample> sample_poisson_path(double mu, const std::vector<double>& times, std::size_t n_paths,
                                            std::uint64_t seed)
{
    check_times(times);
    if (!(mu > 0.0))
        throw ConfigError("mu must be positive");
    if (times.front() < 0.0)
        throw ConfigError("Poisson times must be non-negative");
    std::vector<PathSample> out(n_paths);
    parallel_for(n_paths, [&](std::size_t i) {
        Rng g = path_rng(seed, i);
        PathSample& p = out[i];
        p.seed = seed;
        p.times = times;
        p.values.resize(times.size());
        double x = 0.0, prev = 0.0;
        for (std::size_t k = 0; k < times.size(); ++k) {
            double m = mu * (times[k] - prev);
            if (m > 0.0)
                x += static_cast<double>(std::poisson_distribution<long>(m)(g));
            p.values[k] = x;
            prev = times[k];
        }
    });
    return out;
}

std::vector<PathSample> sample_paths(const ProcessSpec& spec, const std::vector<double>& times, std::size_t n_paths,
                                     std::uint64_t seed, const std::map<std::string, double>& extra)
{
    switch (spec.name) {
    case ProcessName::qWiener:
        return sample_qwiener_path(numeric_param(spec, "q", extra), times, n_paths, seed);
    case ProcessName::alphaQOU:
        return sample_ou_path(numeric_param(spec, "q", extra), numeric_param(spec, "alpha", extra), times, n_paths,
                              seed);
    case ProcessName::Poisson:
        return sample_poisson_path(numeric_param(spec, "mu", extra), times, n_paths, seed);
    case ProcessName::custom:
        break;
    }
    throw ConfigError("simulation needs a named process");
}

void write_paths_csv(std::ostream& os, const std::vector<PathSample>& paths)
{
    os << "path_id,time,value\n";
    auto old = os.precision(17);
    for (std::size_t i = 0; i < paths.size(); ++i)
        for (std::size_t k = 0; k < paths[i].times.size(); ++k)
            os << i << ',' << paths[i].times[k] << ',' << paths[i].values[k] << '\n';
    os.precision(old);
}

// ---- martingale polynomials as numbers

std::vector<std::vector<double>> martingale_coeffs(const ProcessSpec& spec, int n, double t,
                                                   const std::map<std::string, double>& extra)
{
    auto b = time_bindings(spec, t, "t", extra);
    std::vector<std::vector<double>> out;
    for (const MPoly& p : martingale_polys(spec, n)) {
        std::vector<double> c;
        for (int j = 0; j <= n; ++j)
            c.push_back(p.coeff("x", j).eval(b));
        while (c.size() > 1 && c.back() == 0.0)
            c.pop_back();
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<double> phat_values(const ProcessSpec& spec, int n, double t, const std::map<std::string, double>& extra)
{
    auto b = time_bindings(spec, t, "t", extra);
    std::vector<double> out;
    for (const MPoly& p : norms(spec.family, n).phat)
        out.push_back(p.eval(b));
    return out;
}

double horner(const std::vector<double>& c, double x)
{
    double v = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it)
        v = v * x + *it;
    return v;
}

// ---- regression

OlsFit ols_hc0(const std::vector<std::vector<double>>& columns, const std::vector<double>& y)
{
    const std::size_t k = columns.size(), n = y.size();
    for (const auto& c : columns)
        if (c.size() != n)
            throw DimensionMismatch("regressor length differs from response");
    if (n <= k)
        throw DimensionMismatch("fewer observations than regressors");
    NumMatrix xtx(k), meat(k);
    std::vector<double> xty(k, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t a = 0; a < k; ++a) {
            xty[a] += columns[a][i] * y[i];
            for (std::size_t b = 0; b < k; ++b)
                xtx(a, b) += columns[a][i] * columns[b][i];
        }
    NumMatrix inv = inverse(xtx);
    OlsFit f;
    f.beta.assign(k, 0.0);
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b)
            f.beta[a] += inv(a, b) * xty[b];
    for (std::size_t i = 0; i < n; ++i) {
        double e = y[i];
        for (std::size_t a = 0; a < k; ++a)
            e -= f.beta[a] * columns[a][i];
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = 0; b < k; ++b)
                meat(a, b) += e * e * columns[a][i] * columns[b][i];
    }
    NumMatrix cov = inv * meat * inv;
    for (std::size_t a = 0; a < k; ++a)
        f.se.push_back(std::sqrt(std::max(0.0, cov(a, a))));
    return f;
}

// ---- reports

MCReport summarize(std::string name, std::vector<MCComponent> components, std::size_t n_paths, std::uint64_t seed)
{
    MCReport r;
    r.name = std::move(name);
    r.n_paths = n_paths;
    r.seed = seed;
    r.components = std::move(components);
    r.pass = true;
    double worst = -1.0;
    for (auto& c : r.components) {
        if (c.std_error > 0.0)
            c.z_score = (c.estimate - c.target) / c.std_error;
        else
            c.z_score = c.estimate == c.target ? 0.0 : std::numeric_limits<double>::infinity();
        double a = std::abs(c.z_score);
        if (!(a <= kZThreshold))
            r.pass = false;
        if (a > worst || std::isnan(a)) {
            worst = std::isnan(a) ? std::numeric_limits<double>::infinity() : a;
            r.estimate = c.estimate;
            r.std_error = c.std_error;
            r.target = c.target;
            r.z_score = c.z_score;
        }
    }
    return r;
}

MCReport with_retry(const std::function<MCReport(std::size_t, std::uint64_t)>& check, std::size_t n_paths,
                    std::uint64_t seed)
{
    MCReport r = check(n_paths, seed);
    if (r.pass || r.exact)
        return r;
    MCReport again = check(4 * n_paths, seed ^ 0x9e3779b97f4a7c15ULL);
    again.attempts = 2;
    return again;
}

// ---- checks

MCReport martingale_mc_check(const ProcessSpec& spec, int n, double s, double t, std::size_t n_paths,
                             std::uint64_t seed, bool reversed, const std::map<std::string, double>& extra)
{
    std::string name = std::string(reversed ? "reversed_martingale" : "martingale") + " " + to_string(spec.name) +
                       " n=" + std::to_string(n);
    if (!(s < t))
        throw ConfigError("martingale check needs s < t");
    if (n == 0) {
        MCReport r;
        r.name = name;
        r.n_paths = n_paths;
        r.seed = seed;
        r.exact = true;
        r.pass = true;
        r.z_score = std::numeric_limits<double>::quiet_NaN();
        return r;
    }
    auto paths = sample_paths(spec, {s, t}, n_paths, seed, extra);
    auto ps = martingale_coeffs(spec, n, s, extra)[static_cast<std::size_t>(n)];
    auto pt = martingale_coeffs(spec, n, t, extra)[static_cast<std::size_t>(n)];
    std::vector<double> xs(n_paths), xt(n_paths), one(n_paths, 1.0);
    for (std::size_t i = 0; i < n_paths; ++i) {
        xs[i] = horner(ps, paths[i].values[0]);
        xt[i] = horner(pt, paths[i].values[1]);
    }
    double slope = 1.0;
    OlsFit f;
    if (reversed) {
        slope = phat_values(spec, n, s, extra).back() / phat_values(spec, n, t, extra).back();
        f = ols_hc0({one, xt}, xs);
    } else {
        f = ols_hc0({one, xs}, xt);
    }
    return summarize(name, {{"intercept", f.beta[0], f.se[0], 0.0, 0.0}, {"slope", f.beta[1], f.se[1], slope, 0.0}},
                     n_paths, seed);
}

MCReport harness_mc_check(const ProcessSpec& spec, double s, double t, double u, std::size_t n_paths,
                          std::uint64_t seed, const std::map<std::string, double>& extra)
{
    if (!(s < t && t < u))
        throw ConfigError("harness check needs s < t < u");
    auto paths = sample_paths(spec, {s, t, u}, n_paths, seed, extra);
    const double times[3] = {s, t, u};
    std::vector<double> p1[3], p2[3];
    for (int k = 0; k < 3; ++k) {
        auto c = martingale_coeffs(spec, 2, times[k], extra);
        p1[k].resize(n_paths);
        p2[k].resize(n_paths);
        for (std::size_t i = 0; i < n_paths; ++i) {
            double x = paths[i].values[static_cast<std::size_t>(k)];
            p1[k][i] = horner(c[1], x);
            p2[k][i] = horner(c[2], x);
        }
    }
    double phat[3];
    for (int k = 0; k < 3; ++k)
        phat[k] = phat_values(spec, 1, times[k], extra)[1];

    std::vector<double> one(n_paths, 1.0), cross(n_paths);
    for (std::size_t i = 0; i < n_paths; ++i)
        cross[i] = p1[0][i] * p1[2][i];

    auto w = linear_harness_weights(phat[0], phat[1], phat[2]);
    OlsFit lin = ols_hc0({one, p1[0], p1[2]}, p1[1]);

    auto sp = extract_harness_params(spec.family.rec, 4);
    auto hp = to_numeric(harness_params(sp), time_bindings(spec, 0.0, "t", extra));
    auto k = qh_coeffs(hp, phat[0], phat[1], phat[2]);
    OlsFit quad = ols_hc0({p2[0], cross, p2[2], p1[0], p1[2], one}, p2[1]);

    std::vector<MCComponent> c = {
        {"lin_intercept", lin.beta[0], lin.se[0], 0.0, 0.0}, {"A_hat", lin.beta[1], lin.se[1], w.A_hat, 0.0},
        {"B_hat", lin.beta[2], lin.se[2], w.B_hat, 0.0},     {"A", quad.beta[0], quad.se[0], k.A, 0.0},
        {"B", quad.beta[1], quad.se[1], k.B, 0.0},           {"C", quad.beta[2], quad.se[2], k.C, 0.0},
        {"D", quad.beta[3], quad.se[3], k.D, 0.0},           {"E", quad.beta[4], quad.se[4], k.E, 0.0},
        {"F", quad.beta[5], quad.se[5], k.F, 0.0},
    };
    return summarize("harness " + to_string(spec.name), std::move(c), n_paths, seed);
}

double bridge_moment(int k, int n, double p, int r)
{
    if (n < k)
        throw ConfigError("bridge needs n >= k");
    const int m = n - k;
    double sum = 0.0, pmf = std::pow(1.0 - p, m);
    // pmf recursion P(j+1) = P(j) (m-j)/(j+1) p/(1-p); p = 1 handled directly
    if (p >= 1.0)
        return std::pow(static_cast<double>(n), r);
    for (int j = 0; j <= m; ++j) {
        sum += pmf * std::pow(static_cast<double>(k + j), r);
        pmf *= static_cast<double>(m - j) / (j + 1) * p / (1.0 - p);
    }
    return sum;
}

MCReport poisson_bridge_check(double mu, double s, double t, double u, std::size_t n_paths, std::uint64_t seed)
{
    if (!(s < t && t < u))
        throw ConfigError("bridge check needs s < t < u");
    auto paths = sample_poisson_path(mu, {s, t, u}, n_paths, seed);
    const double p = (t - s) / (u - s);
    std::map<std::pair<int, int>, std::array<double, 9>> moments; // E(X^r), r = 0..8
    auto bucket = [&](int k, int n) -> const std::array<double, 9>& {
        auto it = moments.find({k, n});
        if (it == moments.end()) {
            std::array<double, 9> m{};
            for (int r = 0; r <= 8; ++r)
                m[static_cast<std::size_t>(r)] = bridge_moment(k, n, p, r);
            it = moments.emplace(std::make_pair(k, n), m).first;
        }
        return it->second;
    };
    double sum[5] = {}, target[5] = {}, var[5] = {};
    bool degenerate_exact = true;
    for (const auto& ps : paths) {
        int k = static_cast<int>(ps.values[0]), n = static_cast<int>(ps.values[2]);
        double x = ps.values[1];
        if (n == k)
            degenerate_exact = degenerate_exact && x == k;
        const auto& m = bucket(k, n);
        for (int r = 1; r <= 4; ++r) {
            auto ur = static_cast<std::size_t>(r);
            sum[r] += std::pow(x, r);
            target[r] += m[ur];
            var[r] += m[2 * ur] - m[ur] * m[ur];
        }
    }
    const double N = static_cast<double>(n_paths);
    std::vector<MCComponent> c;
    for (int r = 1; r <= 4; ++r)
        c.push_back({"order" + std::to_string(r), sum[r] / N, std::sqrt(std::max(0.0, var[r])) / N, target[r] / N, 0.0});
    c.push_back({"degenerate_exact", degenerate_exact ? 1.0 : 0.0, 0.0, 1.0, 0.0});
    return summarize("poisson_bridge", std::move(c), n_paths, seed);
}

MCReport ck_simulation_check(double q, double alpha, double s, double t, double u, std::size_t n_paths,
                             std::uint64_t seed)
{
    if (!(s < t && t < u))
        throw ConfigError("Chapman-Kolmogorov check needs s < t < u");
    auto two = sample_ou_path(q, alpha, {s, t, u}, n_paths, seed);
    auto one = sample_ou_path(q, alpha, {s, u}, n_paths, seed ^ 0x5851f42d4c957f2dULL);
    const double N = static_cast<double>(n_paths);
    std::vector<MCComponent> c;
    for (int i = 0; i <= 3; ++i)
        for (int j = 0; i + j <= 3; ++j) {
            if (i + j == 0)
                continue;
            auto stats = [&](const std::vector<PathSample>& ps, std::size_t last) {
                double m = 0.0, m2 = 0.0;
                for (const auto& p : ps) {
                    double v = std::pow(p.values[0], i) * std::pow(p.values[last], j);
                    m += v;
                    m2 += v * v;
                }
                m /= N;
                return std::make_pair(m, std::max(0.0, m2 / N - m * m) / N);
            };
            auto [m1, v1] = stats(two, 2);
            auto [m2, v2] = stats(one, 1);
            c.push_back({"E(Xs^" + std::to_string(i) + " Xu^" + std::to_string(j) + ")", m1, std::sqrt(v1 + v2), m2,
                         0.0});
        }
    return summarize("chapman_kolmogorov_mc", std::move(c), n_paths, seed);
}

KsResult ks_stationary(double q, std::size_t n_draws, std::uint64_t seed, bool retry)
{
    if (retry) {
        KsResult r = ks_stationary(q, n_draws, seed, false);
        if (r.pass)
            return r;
        r = ks_stationary(q, 4 * n_draws, seed ^ 0x9e3779b97f4a7c15ULL, false);
        r.attempts = 2;
        return r;
    }
    QGaussSampler sampler(q);
    std::vector<double> x(n_draws);
    parallel_for(n_draws, [&](std::size_t i) {
        Rng g = path_rng(seed, i);
        x[i] = sampler.stationary(g);
    });
    std::sort(x.begin(), x.end());
    KsResult r;
    r.n_draws = n_draws;
    const double n = static_cast<double>(n_draws);
    for (std::size_t i = 0; i < n_draws; ++i) {
        double F = q == 1.0 ? normal_cdf(x[i]) : sampler.stationary_table()(x[i]);
        r.statistic = std::max({r.statistic, F - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - F});
    }
    r.bound = 1.63 / std::sqrt(n);
    r.pass = r.statistic <= r.bound;
    return r;
}

} // namespace opm
