#pragma once

#include "gradcode/rational.hpp"

#include <cstddef>
#include <vector>

namespace gradcode {

using RatVector = std::vector<Rat>;
using RatMatrix = std::vector<RatVector>;

struct RationalSolve {
    bool consistent = false;
    int rank = 0;
    RatVector solution;  // free variables pinned to zero
};

/// Gauss-Jordan elimination over exact rationals on the square system A x = c.
/// Works for singular systems: reports rank and (when consistent) the solution
/// with all free variables set to zero.
inline RationalSolve solve_rational(RatMatrix a, RatVector c) {
    const std::size_t n = c.size();
    std::vector<int> pivot_col_of_row(n, -1);
    std::size_t row = 0;
    for (std::size_t col = 0; col < n && row < n; ++col) {
        std::size_t pivot = row;
        while (pivot < n && a[pivot][col] == 0) ++pivot;
        if (pivot == n) continue;
        std::swap(a[pivot], a[row]);
        std::swap(c[pivot], c[row]);
        const Rat inv_pivot = Rat(1) / a[row][col];
        for (std::size_t j = col; j < n; ++j) a[row][j] *= inv_pivot;
        c[row] *= inv_pivot;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == row || a[i][col] == 0) continue;
            const Rat factor = a[i][col];
            for (std::size_t j = col; j < n; ++j) a[i][j] -= factor * a[row][j];
            c[i] -= factor * c[row];
        }
        pivot_col_of_row[row] = static_cast<int>(col);
        ++row;
    }

    RationalSolve result;
    result.rank = static_cast<int>(row);
    for (std::size_t i = row; i < n; ++i) {
        if (c[i] != 0) return result;  // zero row with nonzero rhs
    }
    result.consistent = true;
    result.solution.assign(n, Rat(0));
    for (std::size_t i = 0; i < row; ++i) result.solution[pivot_col_of_row[i]] = c[i];
    return result;
}

inline RatVector mat_vec(const RatMatrix& a, const RatVector& x) {
    RatVector out(a.size(), Rat(0));
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < x.size(); ++j) {
            if (a[i][j] != 0 && x[j] != 0) out[i] += a[i][j] * x[j];
        }
    }
    return out;
}

inline RatMatrix mat_mul(const RatMatrix& a, const RatMatrix& b) {
    const std::size_t n = a.size(), m = b[0].size(), inner = b.size();
    RatMatrix out(n, RatVector(m, Rat(0)));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < inner; ++k) {
            if (a[i][k] == 0) continue;
            for (std::size_t j = 0; j < m; ++j) {
                if (b[k][j] != 0) out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    return out;
}

/// Minimum-norm solution of A x = c for symmetric PSD A with c in range(A).
/// Nonsingular systems solve directly; singular ones go through A^2 w = c and
/// x = A w, which lands in range(A) and is therefore the minimum-norm solution.
inline RatVector solve_normal_min_norm(const RatMatrix& a, const RatVector& c) {
    RationalSolve direct = solve_rational(a, c);
    if (direct.consistent && direct.rank == static_cast<int>(c.size())) return direct.solution;
    RationalSolve squared = solve_rational(mat_mul(a, a), c);
    return mat_vec(a, squared.solution);
}

}  // namespace gradcode
