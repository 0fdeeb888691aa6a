#include "opm/nummatrix.hpp"

#include "opm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace opm {

NumMatrix::NumMatrix(std::size_t n, std::vector<double> rowmajor) : n_(n), a_(std::move(rowmajor))
{
    if (a_.size() != n * n)
        throw DimensionMismatch("NumMatrix needs n*n entries");
}

NumMatrix NumMatrix::identity(std::size_t n)
{
    NumMatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
        m(i, i) = 1.0;
    return m;
}

NumMatrix NumMatrix::transpose() const
{
    NumMatrix t(n_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j)
            t(j, i) = (*this)(i, j);
    return t;
}

NumMatrix NumMatrix::operator*(const NumMatrix& o) const
{
    if (o.n_ != n_)
        throw DimensionMismatch("NumMatrix product");
    NumMatrix r(n_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t k = 0; k < n_; ++k) {
            double v = (*this)(i, k);
            if (v == 0.0)
                continue;
            for (std::size_t j = 0; j < n_; ++j)
                r(i, j) += v * o(k, j);
        }
    return r;
}

NumMatrix NumMatrix::operator-(const NumMatrix& o) const
{
    if (o.n_ != n_)
        throw DimensionMismatch("NumMatrix difference");
    NumMatrix r(n_);
    for (std::size_t i = 0; i < a_.size(); ++i)
        r.a_[i] = a_[i] - o.a_[i];
    return r;
}

double NumMatrix::max_abs() const
{
    double m = 0;
    for (double v : a_)
        m = std::max(m, std::abs(v));
    return m;
}

bool NumMatrix::all_finite() const
{
    return std::all_of(a_.begin(), a_.end(), [](double v) { return std::isfinite(v); });
}

std::string NumMatrix::str(int precision) const
{
    std::ostringstream os;
    os << std::setprecision(precision);
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j < n_; ++j)
            os << (j ? " " : "") << (*this)(i, j);
        os << '\n';
    }
    return os.str();
}

NumMatrix cholesky(const NumMatrix& m)
{
    const std::size_t n = m.size();
    double dmax = 0;
    for (std::size_t i = 0; i < n; ++i)
        dmax = std::max(dmax, std::abs(m(i, i)));
    const double floor = 1e-13 * dmax;

    NumMatrix L(n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = m(j, j);
        for (std::size_t k = 0; k < j; ++k)
            d -= L(j, k) * L(j, k);
        if (!(d > floor))
            throw NotPositiveDefinite("pivot " + std::to_string(j) + " = " + std::to_string(d));
        L(j, j) = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = m(i, j);
            for (std::size_t k = 0; k < j; ++k)
                s -= L(i, k) * L(j, k);
            L(i, j) = s / L(j, j);
        }
    }
    return L;
}

namespace {

struct LU {
    NumMatrix a;
    std::vector<std::size_t> perm;
    int sign = 1;
    bool singular = false;
};

LU decompose(const NumMatrix& m)
{
    LU lu{m, {}, 1, false};
    const std::size_t n = m.size();
    lu.perm.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        lu.perm[i] = i;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(lu.a(i, k)) > std::abs(lu.a(p, k)))
                p = i;
        if (lu.a(p, k) == 0.0) {
            lu.singular = true;
            continue;
        }
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j)
                std::swap(lu.a(k, j), lu.a(p, j));
            std::swap(lu.perm[k], lu.perm[p]);
            lu.sign = -lu.sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            double f = lu.a(i, k) / lu.a(k, k);
            lu.a(i, k) = f;
            for (std::size_t j = k + 1; j < n; ++j)
                lu.a(i, j) -= f * lu.a(k, j);
        }
    }
    return lu;
}

} // namespace

double determinant(const NumMatrix& m)
{
    LU lu = decompose(m);
    if (lu.singular)
        return 0.0;
    double d = lu.sign;
    for (std::size_t i = 0; i < m.size(); ++i)
        d *= lu.a(i, i);
    return d;
}

NumMatrix inverse(const NumMatrix& m)
{
    const std::size_t n = m.size();
    LU lu = decompose(m);
    if (lu.singular)
        throw SingularDiagonal("matrix is singular");
    NumMatrix inv(n);
    for (std::size_t c = 0; c < n; ++c) {
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i) {
            double s = lu.perm[i] == c ? 1.0 : 0.0;
            for (std::size_t k = 0; k < i; ++k)
                s -= lu.a(i, k) * x[k];
            x[i] = s;
        }
        for (std::size_t i = n; i-- > 0;) {
            double s = x[i];
            for (std::size_t k = i + 1; k < n; ++k)
                s -= lu.a(i, k) * x[k];
            x[i] = s / lu.a(i, i);
        }
        for (std::size_t i = 0; i < n; ++i)
            inv(i, c) = x[i];
    }
    return inv;
}

std::vector<double> spd_solve(const NumMatrix& s, const std::vector<double>& b)
{
    NumMatrix L = cholesky(s);
    const std::size_t n = s.size();
    std::vector<double> y(n), x(n);
    for (std::size_t i = 0; i < n; ++i) {
        double v = b[i];
        for (std::size_t k = 0; k < i; ++k)
            v -= L(i, k) * y[k];
        y[i] = v / L(i, i);
    }
    for (std::size_t i = n; i-- > 0;) {
        double v = y[i];
        for (std::size_t k = i + 1; k < n; ++k)
            v -= L(k, i) * x[k];
        x[i] = v / L(i, i);
    }
    return x;
}

} // namespace opm
