#pragma once

#include <vector>

// q-integers, q-factorials, q-binomials and q-Pochhammer symbols over any
// commutative ring T constructible from int (Rational, MPoly, double).

namespace opm {

template <class T>
T q_int(int n, const T& q)
{
    T s(0), p(1);
    for (int i = 0; i < n; ++i) {
        s += p;
        p *= q;
    }
    return s;
}

template <class T>
T q_factorial(int n, const T& q)
{
    T f(1);
    for (int i = 2; i <= n; ++i)
        f *= q_int(i, q);
    return f;
}

// q-Pascal rule, so no division is needed
template <class T>
T q_binomial(int n, int k, const T& q)
{
    if (k < 0 || k > n)
        return T(0);
    std::vector<T> row(1, T(1));
    for (int m = 1; m <= n; ++m) {
        std::vector<T> next(static_cast<std::size_t>(m + 1), T(0));
        T qk(1);
        for (int j = 0; j <= m; ++j) {
            T v(0);
            if (j >= 1)
                v += row[static_cast<std::size_t>(j - 1)];
            if (j < m)
                v += qk * row[static_cast<std::size_t>(j)];
            next[static_cast<std::size_t>(j)] = v;
            qk *= q;
        }
        row = std::move(next);
    }
    return row[static_cast<std::size_t>(k)];
}

// (a;q)_n = prod_{i<n} (1 - a q^i)
template <class T>
T q_pochhammer(const T& a, const T& q, int n)
{
    T r(1), qi(1);
    for (int i = 0; i < n; ++i) {
        r *= T(1) - a * qi;
        qi *= q;
    }
    return r;
}

} // namespace opm
