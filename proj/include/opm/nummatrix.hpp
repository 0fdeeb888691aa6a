#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace opm {

// Dense square matrix of doubles, row-major.
class NumMatrix {
public:
    NumMatrix() = default;
    explicit NumMatrix(std::size_t n, double fill = 0.0) : n_(n), a_(n * n, fill) {}
    NumMatrix(std::size_t n, std::vector<double> rowmajor);

    static NumMatrix identity(std::size_t n);

    std::size_t size() const { return n_; }
    double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
    const std::vector<double>& data() const { return a_; }

    NumMatrix transpose() const;
    NumMatrix operator*(const NumMatrix& o) const;
    NumMatrix operator-(const NumMatrix& o) const;
    double max_abs() const;
    bool all_finite() const;

    std::string str(int precision = 6) const;

private:
    std::size_t n_ = 0;
    std::vector<double> a_;
};

// Lower-triangular D with D*D^T = m.  Throws NotPositiveDefinite when a
// pivot falls to 1e-13 times the largest diagonal entry or below.
NumMatrix cholesky(const NumMatrix& m);

// Partial-pivoting LU helpers.
NumMatrix inverse(const NumMatrix& m);
double determinant(const NumMatrix& m);

// Solves S x = b for symmetric positive definite S via cholesky.
std::vector<double> spd_solve(const NumMatrix& s, const std::vector<double>& b);

} // namespace opm
