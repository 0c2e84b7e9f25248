#include "dmim/linalg.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

namespace dmim {

BigInt det_int(const IntMat& m) {
    return det_exact<BigInt>(m);
}

double det_real(const RealMat& m) {
    if (!m.is_square()) {
        throw ValidationError("det_real: matrix must be square");
    }
    const int n = m.rows();
    if (n == 0) {
        return 1.0;
    }
    RealMat a = m;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (!std::isfinite(a(i, j))) {
                throw ValidationError("det_real: entries must be finite");
            }
        }
    }
    double det = 1.0;
    for (int k = 0; k < n; ++k) {
        int pivot_row = k;
        double best = std::abs(a(k, k));
        for (int r = k + 1; r < n; ++r) {
            double v = std::abs(a(r, k));
            if (v > best) {
                best = v;
                pivot_row = r;
            }
        }
        if (best == 0.0) {
            return 0.0;
        }
        if (pivot_row != k) {
            for (int j = k; j < n; ++j) {
                std::swap(a(k, j), a(pivot_row, j));
            }
            det = -det;
        }
        det *= a(k, k);
        for (int i = k + 1; i < n; ++i) {
            double factor = a(i, k) / a(k, k);
            for (int j = k + 1; j < n; ++j) {
                a(i, j) -= factor * a(k, j);
            }
        }
    }
    return det;
}

double permanent(const RealMat& m) {
    if (!m.is_square()) {
        throw ValidationError("permanent: matrix must be square");
    }
    const int n = m.rows();
    if (n > 12) {
        throw ParameterError("permanent: dimension must be <= 12");
    }
    if (n == 0) {
        return 1.0;
    }
    // Ryser: per(A) = (-1)^n * sum over nonempty column subsets S of
    // (-1)^{|S|} * prod_i (sum_{j in S} A(i,j)). Gray-code order changes
    // one column per step, so the row sums update in O(C).
    std::vector<double> row_sum(n, 0.0);
    const std::uint32_t total = 1u << n;
    double acc = 0.0;
    std::uint32_t prev_gray = 0;
    int popcount = 0;
    for (std::uint32_t idx = 1; idx < total; ++idx) {
        std::uint32_t gray = idx ^ (idx >> 1);
        std::uint32_t changed = gray ^ prev_gray;
        int col = std::countr_zero(changed);
        if (gray & changed) {
            ++popcount;
            for (int i = 0; i < n; ++i) {
                row_sum[i] += m(i, col);
            }
        } else {
            --popcount;
            for (int i = 0; i < n; ++i) {
                row_sum[i] -= m(i, col);
            }
        }
        prev_gray = gray;
        double prod = 1.0;
        for (int i = 0; i < n; ++i) {
            prod *= row_sum[i];
        }
        acc += (popcount % 2 == 0) ? -prod : prod;
    }
    return (n % 2 == 0) ? -acc : acc;
}

double permanent_naive(const RealMat& m) {
    if (!m.is_square()) {
        throw ValidationError("permanent_naive: matrix must be square");
    }
    const int n = m.rows();
    if (n == 0) {
        return 1.0;
    }
    std::vector<int> cols(n);
    std::iota(cols.begin(), cols.end(), 0);
    double acc = 0.0;
    do {
        double prod = 1.0;
        for (int i = 0; i < n; ++i) {
            prod *= m(i, cols[i]);
        }
        acc += prod;
    } while (std::next_permutation(cols.begin(), cols.end()));
    return acc;
}

BigInt ordered_task_count(long long tasks, int choices) {
    if (tasks < 0 || choices < 1) {
        throw ParameterError("ordered_task_count: need tasks >= 0 and choices >= 1");
    }
    if (tasks < choices) {
        return BigInt(0);
    }
    BigInt out(1);
    for (int i = 0; i < choices; ++i) {
        out *= BigInt(tasks - i);
    }
    return out;
}

BigInt factorial(int n) {
    if (n < 0) {
        throw ParameterError("factorial: negative argument");
    }
    BigInt out(1);
    for (int i = 2; i <= n; ++i) {
        out *= i;
    }
    return out;
}

BigInt binomial(long long n, int k) {
    if (n < 0 || k < 0) {
        throw ParameterError("binomial: negative argument");
    }
    if (k > n) {
        return BigInt(0);
    }
    if (k == 0) {
        return BigInt(1);
    }
    return ordered_task_count(n, k) / factorial(k);
}

bool is_permutation_matrix(const RealMat& m, double tol) {
    if (!m.is_square() || m.rows() == 0) {
        return false;
    }
    const int n = m.rows();
    std::vector<int> col_ones(n, 0);
    for (int i = 0; i < n; ++i) {
        int row_ones = 0;
        for (int j = 0; j < n; ++j) {
            double v = m(i, j);
            if (std::abs(v - 1.0) <= tol) {
                ++row_ones;
                ++col_ones[j];
            } else if (std::abs(v) > tol) {
                return false;
            }
        }
        if (row_ones != 1) {
            return false;
        }
    }
    for (int j = 0; j < n; ++j) {
        if (col_ones[j] != 1) {
            return false;
        }
    }
    return true;
}

} // namespace dmim
