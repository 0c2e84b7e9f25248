#pragma once

#include "dmim/matrix.hpp"

namespace dmim {

/// Exact determinant by Bareiss fraction-free elimination. Every division
/// in the schedule is exact over the integers, so T = BigInt never rounds;
/// T = Rational works as well.
template <typename T>
T det_exact(Mat<T> m) {
    if (!m.is_square()) {
        throw ValidationError("det_exact: matrix must be square");
    }
    const int n = m.rows();
    if (n == 0) {
        return T(1);
    }
    T prev_pivot(1);
    bool negate = false;
    for (int k = 0; k + 1 < n; ++k) {
        // Any nonzero pivot works; exact arithmetic needs no magnitude test.
        int pivot_row = -1;
        for (int r = k; r < n; ++r) {
            if (m(r, k) != T(0)) {
                pivot_row = r;
                break;
            }
        }
        if (pivot_row < 0) {
            return T(0);
        }
        if (pivot_row != k) {
            for (int j = k; j < n; ++j) {
                std::swap(m(k, j), m(pivot_row, j));
            }
            negate = !negate;
        }
        for (int i = k + 1; i < n; ++i) {
            for (int j = k + 1; j < n; ++j) {
                m(i, j) = (m(k, k) * m(i, j) - m(i, k) * m(k, j)) / prev_pivot;
            }
            m(i, k) = T(0);
        }
        prev_pivot = m(k, k);
    }
    T det = m(n - 1, n - 1);
    return negate ? T(-det) : det;
}

/// Exact integer determinant of a count matrix.
BigInt det_int(const IntMat& m);

/// Floating-point determinant via LU with partial pivoting.
/// Relative error <= 1e-12 for well-conditioned inputs up to 8x8.
double det_real(const RealMat& m);

/// Permanent via Ryser's formula with Gray-code subset updates,
/// O(2^C * C). Rejects C > 12.
double permanent(const RealMat& m);

/// Permanent as the plain sum over all column permutations. Kept as the
/// slow reference for the Ryser path.
double permanent_naive(const RealMat& m);

/// Number of ordered C-tuples of distinct tasks from a pool of T:
/// binomial(T, C) * C! = T(T-1)...(T-C+1). Zero when T < C.
BigInt ordered_task_count(long long tasks, int choices);

BigInt binomial(long long n, int k);
BigInt factorial(int n);

/// True iff every row and column holds exactly one entry within tol of 1
/// and the rest within tol of 0. Malformed inputs yield false.
bool is_permutation_matrix(const RealMat& m, double tol = 1e-9);

} // namespace dmim
