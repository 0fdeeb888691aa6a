#pragma once

#include "opm/mpoly.hpp"
#include "opm/nummatrix.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace opm {

enum class Shape { Lower, Full };
// Square matrix of MPoly entries, indices 0..size()-1.  The matrix for
// polynomials of degree <= n has size n+1.
class TriMatrix {
public:
    TriMatrix() = default;
    explicit TriMatrix(std::size_t size, Shape shape = Shape::Lower);
    TriMatrix(std::size_t size, std::vector<MPoly> rowmajor, Shape shape);

    static TriMatrix identity(std::size_t size);
    static TriMatrix diagonal(const std::vector<MPoly>& d);

    std::size_t size() const { return n_; }
    Shape shape() const { return shape_; }
    const MPoly& operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
    // Writing above the diagonal of a Lower matrix promotes it to Full.
    void set(std::size_t i, std::size_t j, MPoly v);

    bool is_lower_triangular() const;
    bool is_diagonal() const;
    TriMatrix transpose() const;
    TriMatrix submatrix(std::size_t size) const;
    TriMatrix map(const std::function<MPoly(const MPoly&)>& f) const;
    TriMatrix rename(const std::string& from, const std::string& to) const;
    TriMatrix substitute(const std::map<std::string, MPoly>& values) const;

    NumMatrix eval(const std::map<std::string, double>& b) const;

    std::string str() const;

    friend bool operator==(const TriMatrix& a, const TriMatrix& b);
    friend bool operator!=(const TriMatrix& a, const TriMatrix& b) { return !(a == b); }

private:
    std::size_t n_ = 0;
    Shape shape_ = Shape::Lower;
    std::vector<MPoly> a_;
};

// Forward substitution.  Diagonal entries must be units of the ring (nonzero
// constants or monomials in exponential symbols); otherwise SingularDiagonal.
TriMatrix tri_invert(const TriMatrix& m);

TriMatrix tri_mul(const TriMatrix& a, const TriMatrix& b);
inline TriMatrix operator*(const TriMatrix& a, const TriMatrix& b) { return tri_mul(a, b); }

} // namespace opm
