#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "wealthpde/errors.hpp"

namespace wealthpde {

/// Tridiagonal matrix stored by diagonals. lower[0] and upper[n-1] are
/// ignored. All three vectors have length n.
struct Tridiagonal {
    std::vector<double> lower;
    std::vector<double> diag;
    std::vector<double> upper;

    std::size_t size() const { return diag.size(); }
};

/// y = M x.
inline std::vector<double> tridiagonal_apply(const Tridiagonal& m,
                                             const std::vector<double>& x) {
    const std::size_t n = m.size();
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double v = m.diag[i] * x[i];
        if (i > 0) v += m.lower[i] * x[i - 1];
        if (i + 1 < n) v += m.upper[i] * x[i + 1];
        y[i] = v;
    }
    return y;
}

/// Thomas algorithm, no pivoting. Intended for diagonally dominant
/// (M-matrix) systems where elimination is stable by construction.
/// Throws SolverError on a vanishing pivot.
inline std::vector<double> thomas_solve(const Tridiagonal& m,
                                        const std::vector<double>& rhs) {
    const std::size_t n = m.size();
    if (rhs.size() != n || m.lower.size() != n || m.upper.size() != n)
        throw std::invalid_argument("tridiagonal solve: size mismatch");
    if (n == 0) return {};
    std::vector<double> c_star(n, 0.0);
    std::vector<double> x(n, 0.0);

    double pivot = m.diag[0];
    if (pivot == 0.0 || !std::isfinite(pivot))
        throw SolverError("tridiagonal solve: zero pivot at row 0");
    c_star[0] = m.upper[0] / pivot;
    x[0] = rhs[0] / pivot;

    for (std::size_t i = 1; i < n; ++i) {
        pivot = m.diag[i] - m.lower[i] * c_star[i - 1];
        if (pivot == 0.0 || !std::isfinite(pivot))
            throw SolverError("tridiagonal solve: zero pivot at row " + std::to_string(i));
        if (i + 1 < n) c_star[i] = m.upper[i] / pivot;
        x[i] = (rhs[i] - m.lower[i] * x[i - 1]) / pivot;
    }

    for (std::size_t i = n - 1; i-- > 0;)
        x[i] -= c_star[i] * x[i + 1];
    return x;
}

} // namespace wealthpde
