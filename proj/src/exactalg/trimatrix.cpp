#include "opm/trimatrix.hpp"

#include "opm/errors.hpp"

#include <sstream>

namespace opm {

TriMatrix::TriMatrix(std::size_t size, Shape shape) : n_(size), shape_(shape), a_(size * size)
{
    if (size == 0)
        throw DimensionMismatch("TriMatrix needs dimension >= 1");
}

TriMatrix::TriMatrix(std::size_t size, std::vector<MPoly> rowmajor, Shape shape)
    : n_(size), shape_(shape), a_(std::move(rowmajor))
{
    if (size == 0 || a_.size() != size * size)
        throw DimensionMismatch("TriMatrix needs size*size entries");
    if (shape_ == Shape::Lower && !is_lower_triangular())
        throw DimensionMismatch("entries above the diagonal of a lower-triangular matrix");
}

TriMatrix TriMatrix::identity(std::size_t size)
{
    TriMatrix m(size);
    for (std::size_t i = 0; i < size; ++i)
        m.a_[i * size + i] = MPoly(1);
    return m;
}

TriMatrix TriMatrix::diagonal(const std::vector<MPoly>& d)
{
    TriMatrix m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i)
        m.a_[i * d.size() + i] = d[i];
    return m;
}

void TriMatrix::set(std::size_t i, std::size_t j, MPoly v)
{
    if (j > i && !v.is_zero())
        shape_ = Shape::Full;
    a_[i * n_ + j] = std::move(v);
}

bool TriMatrix::is_lower_triangular() const
{
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = i + 1; j < n_; ++j)
            if (!(*this)(i, j).is_zero())
                return false;
    return true;
}

bool TriMatrix::is_diagonal() const
{
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j)
            if (i != j && !(*this)(i, j).is_zero())
                return false;
    return true;
}

TriMatrix TriMatrix::transpose() const
{
    TriMatrix t(n_, Shape::Full);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j)
            t.a_[j * n_ + i] = (*this)(i, j);
    if (t.is_lower_triangular())
        t.shape_ = Shape::Lower;
    return t;
}

TriMatrix TriMatrix::submatrix(std::size_t size) const
{
    if (size == 0 || size > n_)
        throw DimensionMismatch("submatrix size");
    TriMatrix s(size, shape_);
    for (std::size_t i = 0; i < size; ++i)
        for (std::size_t j = 0; j < size; ++j)
            s.a_[i * size + j] = (*this)(i, j);
    return s;
}

TriMatrix TriMatrix::map(const std::function<MPoly(const MPoly&)>& f) const
{
    TriMatrix r = *this;
    for (auto& e : r.a_)
        e = f(e);
    if (r.shape_ == Shape::Full && r.is_lower_triangular())
        r.shape_ = Shape::Lower;
    return r;
}

TriMatrix TriMatrix::rename(const std::string& from, const std::string& to) const
{
    return map([&](const MPoly& p) { return p.rename(from, to); });
}

TriMatrix TriMatrix::substitute(const std::map<std::string, MPoly>& values) const
{
    return map([&](const MPoly& p) { return p.substitute(values); });
}

NumMatrix TriMatrix::eval(const std::map<std::string, double>& b) const
{
    NumMatrix m(n_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j)
            m(i, j) = (*this)(i, j).eval(b);
    return m;
}

std::string TriMatrix::str() const
{
    std::ostringstream os;
    for (std::size_t i = 0; i < n_; ++i) {
        os << "[";
        for (std::size_t j = 0; j < n_; ++j)
            os << (j ? " | " : "") << (*this)(i, j).str();
        os << "]\n";
    }
    return os.str();
}

bool operator==(const TriMatrix& a, const TriMatrix& b)
{
    return a.n_ == b.n_ && a.a_ == b.a_;
}

TriMatrix tri_invert(const TriMatrix& m)
{
    if (!m.is_lower_triangular())
        throw DimensionMismatch("tri_invert needs a lower-triangular matrix");
    const std::size_t n = m.size();
    std::vector<MPoly> dinv(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (m(i, i).is_zero())
            throw SingularDiagonal("zero diagonal entry at " + std::to_string(i));
        dinv[i] = m(i, i).inverse_unit();
    }
    // column by column: L X = I, X lower
    TriMatrix x(n);
    for (std::size_t j = 0; j < n; ++j) {
        x.set(j, j, dinv[j]);
        for (std::size_t i = j + 1; i < n; ++i) {
            MPoly s;
            for (std::size_t k = j; k < i; ++k)
                if (!m(i, k).is_zero() && !x(k, j).is_zero())
                    s += m(i, k) * x(k, j);
            x.set(i, j, -(s * dinv[i]));
        }
    }
    return x;
}

TriMatrix tri_mul(const TriMatrix& a, const TriMatrix& b)
{
    if (a.size() != b.size())
        throw DimensionMismatch("tri_mul: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    const std::size_t n = a.size();
    const bool lower = a.shape() == Shape::Lower && b.shape() == Shape::Lower;
    TriMatrix r(n, lower ? Shape::Lower : Shape::Full);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < (lower ? i + 1 : n); ++j) {
            MPoly s;
            for (std::size_t k = 0; k < n; ++k)
                if (!a(i, k).is_zero() && !b(k, j).is_zero())
                    s += a(i, k) * b(k, j);
            r.set(i, j, std::move(s));
        }
    if (!lower && r.is_lower_triangular())
        return TriMatrix(n, [&] {
            std::vector<MPoly> v;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    v.push_back(r(i, j));
            return v;
        }(), Shape::Lower);
    return r;
}

} // namespace opm
