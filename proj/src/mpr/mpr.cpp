#include "opm/mpr.hpp"

#include "opm/errors.hpp"

#include <algorithm>
#include <cmath>

namespace opm {

std::string to_string(ProcessName p)
{
    switch (p) {
    case ProcessName::qWiener: return "qWiener";
    case ProcessName::alphaQOU: return "alphaQOU";
    case ProcessName::Poisson: return "Poisson";
    case ProcessName::custom: return "custom";
    }
    return "?";
}

bool IndexSet::contains(double t) const
{
    if (left && t < to_double(*left))
        return false;
    if (right && t > to_double(*right))
        return false;
    return true;
}

namespace {

void check_q(const std::optional<Rational>& q)
{
    if (q && (*q <= -1 || *q > 1))
        throw ConfigError("q must lie in (-1, 1], got " + to_string(*q));
}

void check_positive(const std::optional<Rational>& v, const char* name)
{
    if (v && *v <= 0)
        throw ConfigError(std::string(name) + " must be positive, got " + to_string(*v));
}

} // namespace

ProcessSpec q_wiener(std::optional<Rational> q)
{
    check_q(q);
    ProcessSpec p;
    p.name = ProcessName::qWiener;
    p.family = q_wiener_family(q);
    p.params = p.family.params;
    p.index_set.left = Rational(0);
    return p;
}

ProcessSpec alpha_q_ou(std::optional<Rational> q, std::optional<Rational> alpha)
{
    check_q(q);
    check_positive(alpha, "alpha");
    ProcessSpec p;
    p.name = ProcessName::alphaQOU;
    p.family = ou_family(q);
    p.params = p.family.params;
    if (alpha)
        p.params["alpha"] = *alpha;
    return p;
}

ProcessSpec poisson(std::optional<Rational> mu)
{
    check_positive(mu, "mu");
    ProcessSpec p;
    p.name = ProcessName::Poisson;
    p.family = charlier(mu);
    p.params = p.family.params;
    p.index_set.left = Rational(0);
    return p;
}

ProcessSpec custom_process(PolyFamily family, std::vector<MPoly> martingales, IndexSet index_set)
{
    ProcessSpec p;
    p.name = ProcessName::custom;
    p.family = std::move(family);
    p.params = p.family.params;
    p.martingales = std::move(martingales);
    p.index_set = index_set;
    return p;
}

std::vector<MPoly> martingale_polys(const ProcessSpec& spec, int n)
{
    switch (spec.name) {
    case ProcessName::qWiener: {
        // t^{n/2} H_n(x / sqrt t | q); only x^j with n - j even may occur
        auto it = spec.params.find("q");
        auto h = generate(q_hermite(it == spec.params.end() ? std::nullopt : std::optional<Rational>(it->second)), n);
        MPoly x = MPoly::var("x"), t = MPoly::var("t");
        std::vector<MPoly> out;
        for (int k = 0; k <= n; ++k) {
            const MPoly& hk = h[static_cast<std::size_t>(k)];
            MPoly m;
            for (int j = 0; j <= k; ++j) {
                MPoly c = hk.coeff("x", j);
                if (c.is_zero())
                    continue;
                if ((k - j) % 2 != 0)
                    throw Error("half-integer power of t in q-Wiener martingale " + std::to_string(k));
                m += c * x.pow(j) * t.pow((k - j) / 2);
            }
            out.push_back(m);
        }
        return out;
    }
    case ProcessName::alphaQOU: {
        auto it = spec.params.find("q");
        auto h = generate(q_hermite(it == spec.params.end() ? std::nullopt : std::optional<Rational>(it->second)), n);
        MPoly e = MPoly::var("E_t");
        for (int k = 0; k <= n; ++k)
            h[static_cast<std::size_t>(k)] *= e.pow(k);
        return h;
    }
    case ProcessName::Poisson:
        return generate(spec.family, n);
    case ProcessName::custom:
        if (static_cast<int>(spec.martingales.size()) <= n)
            throw DimensionMismatch("custom process supplies " + std::to_string(spec.martingales.size()) +
                                    " martingales, level " + std::to_string(n) + " requested");
        return std::vector<MPoly>(spec.martingales.begin(), spec.martingales.begin() + n + 1);
    }
    return {};
}

MPoly retime(const MPoly& p, const std::string& from, const std::string& to)
{
    return p.rename(from, to).rename("E_" + from, "E_" + to);
}

TriMatrix retime(const TriMatrix& m, const std::string& from, const std::string& to)
{
    return m.map([&](const MPoly& p) { return retime(p, from, to); });
}

StructuralMatrix structural_matrix(const ProcessSpec& spec, int n)
{
    StructuralMatrix s;
    s.n = n;
    s.spec = spec;
    s.C = coeff_matrix(martingale_polys(spec, n));
    s.V = tri_invert(s.C);
    return s;
}

TriMatrix regression_matrix(const StructuralMatrix& v, const std::string& s, const std::string& t)
{
    TriMatrix vt = t == "t" ? v.V : retime(v.V, "t", t);
    TriMatrix cs = retime(v.C, "t", s);
    return tri_mul(vt, cs);
}

std::map<std::string, double> time_bindings(const ProcessSpec& spec, double t, const std::string& sym,
                                            const std::map<std::string, double>& extra)
{
    std::map<std::string, double> b = extra;
    for (const auto& [k, v] : spec.params)
        b[k] = to_double(v);
    b[sym] = t;
    auto a = b.find("alpha");
    if (a != b.end())
        b["E_" + sym] = std::exp(a->second * t);
    return b;
}

NumMatrix regression_matrix_at(const StructuralMatrix& v, double s, double t, const std::map<std::string, double>& extra)
{
    return v.V.eval(time_bindings(v.spec, t, "t", extra)) * v.C.eval(time_bindings(v.spec, s, "t", extra));
}

TriMatrix moment_matrix(const ProcessSpec& spec, int n)
{
    NormSequence ns = norms(spec.family, n);
    TriMatrix cinv = tri_invert(coeff_matrix(generate(spec.family, n)));
    return tri_mul(tri_mul(cinv, TriMatrix::diagonal(ns.phat)), cinv.transpose());
}

std::vector<std::map<std::string, double>> sample_points(const ProcessSpec& spec)
{
    std::vector<double> ts;
    const IndexSet& is = spec.index_set;
    if (is.left) {
        double l = to_double(*is.left);
        double span = is.right ? to_double(*is.right) - l : 4.0;
        ts = {l + span / 16, l + span / 4, l + span * 3 / 4};
    } else if (is.right) {
        double r = to_double(*is.right);
        ts = {r - 3.0, r - 1.0, r - 0.25};
    } else {
        ts = {-1.5, 0.0, 1.2};
    }
    std::vector<double> qs = {-0.5, 0.3, 0.9, 1.0};
    if (spec.params.count("q"))
        qs = {to_double(spec.params.at("q"))};

    std::vector<std::map<std::string, double>> out;
    for (double q : qs)
        for (double t : ts) {
            std::map<std::string, double> extra{{"q", q}, {"alpha", 0.7}, {"mu", 1.3}, {"rho", 0.4}, {"y", 0.2}};
            out.push_back(time_bindings(spec, t, "t", extra));
        }
    return out;
}

OpmResult opm_check(const ProcessSpec& spec, int n)
{
    StructuralMatrix v = structural_matrix(spec, n);
    OpmResult r;
    r.G = tri_mul(tri_mul(v.C, moment_matrix(spec, n)), v.C.transpose());
    r.diagonal = r.G.is_diagonal();
    for (std::size_t i = 0; i < r.G.size(); ++i)
        r.P.push_back(r.G(i, i));
    r.positive = true;
    for (const auto& b : sample_points(spec))
        for (const MPoly& p : r.P)
            if (!(p.eval(b) > 0))
                r.positive = false;
    r.is_opm = r.diagonal && r.positive;
    return r;
}

IndependenceResult independent_increments_check(const StructuralMatrix& v)
{
    IndependenceResult r;
    TriMatrix w = v.V;
    const auto& left = v.spec.index_set.left;
    if (left) {
        std::map<std::string, MPoly> at_l{{"t", MPoly(*left)}};
        bool has_exp = false;
        for (std::size_t i = 0; i < v.C.size(); ++i)
            for (std::size_t j = 0; j <= i; ++j)
                has_exp = has_exp || v.C(i, j).depends_on("E_t");
        if (has_exp) {
            if (*left != 0)
                throw ConfigError("cannot evaluate exp(alpha t) exactly at left endpoint " + to_string(*left));
            at_l["E_t"] = MPoly(1);
        }
        w = tri_mul(v.V, v.C.substitute(at_l));
        r.endpoint_checked = true;
    }
    const int n = v.n;
    for (int d = 1; d <= n; ++d) {
        MPoly g = w(static_cast<std::size_t>(d), 0);
        bool ok = true;
        for (int i = d; i <= n; ++i) {
            MPoly expect = MPoly(binomial(i, d)) * g;
            if (w(static_cast<std::size_t>(i), static_cast<std::size_t>(i - d)) != expect) {
                ok = false;
                r.violations.emplace_back(i, i - d);
            }
        }
        if (ok && r.endpoint_checked && !g.substitute("t", MPoly(*left)).substitute("E_t", MPoly(1)).is_zero()) {
            ok = false;
            r.violations.emplace_back(d, 0);
        }
        if (ok)
            r.g[d] = g;
    }
    r.independent = r.violations.empty();
    if (!r.independent)
        r.witness = r.violations.front();
    return r;
}

MPoly conditional_moment(const ProcessSpec& spec, int n, const std::string& s, const std::string& t, const std::string& y)
{
    TriMatrix a = regression_matrix(structural_matrix(spec, n), s, t);
    MPoly out, yy = MPoly::var(y);
    for (int j = 0; j <= n; ++j)
        out += a(static_cast<std::size_t>(n), static_cast<std::size_t>(j)) * yy.pow(j);
    return out;
}

StationaryForm stationary_form_check(const StructuralMatrix& v)
{
    StationaryForm f;
    f.D = v.V.substitute({{"E_t", MPoly(1)}, {"t", MPoly(0)}});
    std::vector<MPoly> d;
    MPoly e = MPoly::var("E_t");
    for (int k = 0; k <= v.n; ++k)
        d.push_back(e.pow(-k));
    f.holds = tri_mul(f.D, TriMatrix::diagonal(d)) == v.V;
    return f;
}

double podst_defect(const ProcessSpec& spec, int n, double s, double t, const std::map<std::string, double>& extra)
{
    StructuralMatrix v = structural_matrix(spec, n);
    TriMatrix m = moment_matrix(spec, n);
    NumMatrix a = regression_matrix_at(v, s, t, extra);
    NumMatrix ms = m.eval(time_bindings(spec, s, "t", extra));
    NumMatrix mt = m.eval(time_bindings(spec, t, "t", extra));
    NumMatrix k = (a * ms).transpose() * inverse(mt);
    double upper = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i)
        for (std::size_t j = 0; j < k.size(); ++j) {
            scale = std::max(scale, std::abs(k(i, j)));
            if (j > i)
                upper = std::max(upper, std::abs(k(i, j)));
        }
    return scale > 0 ? upper / scale : upper;
}

} // namespace opm
