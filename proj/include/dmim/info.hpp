#pragma once

#include <vector>

#include "dmim/linalg.hpp"
#include "dmim/matrix.hpp"

namespace dmim {

/// Tolerance for validating that probabilities sum to 1 and rows are
/// stochastic. Inputs outside it are rejected, never renormalized.
inline constexpr double kProbTol = 1e-9;

inline constexpr double kInformativeTol = 1e-9;

/// Joint distribution of two variables over the same choice set [C]:
/// p(x, y) = Pr[X = x, Y = y].
class JointDistribution {
public:
    JointDistribution(int choices, RealMat p);
    JointDistribution(std::initializer_list<std::initializer_list<double>> rows);

    int choices() const { return choices_; }
    const RealMat& p() const { return p_; }
    double operator()(int x, int y) const { return p_(x, y); }

    JointDistribution transposed() const { return {choices_, p_.transposed()}; }

private:
    int choices_;
    RealMat p_;
};

/// Row-stochastic C x C matrix: k(x, x') = Pr[X' = x' | X = x].
/// Houses strategies, garblings, and confusion matrices alike.
class TransitionMatrix {
public:
    TransitionMatrix(int choices, RealMat k);
    TransitionMatrix(std::initializer_list<std::initializer_list<double>> rows);

    static TransitionMatrix identity(int choices);
    static TransitionMatrix uniform(int choices);

    int choices() const { return choices_; }
    const RealMat& k() const { return k_; }
    double operator()(int x, int xp) const { return k_(x, xp); }

    bool is_permutation(double tol = kProbTol) const { return is_permutation_matrix(k_, tol); }

private:
    int choices_;
    RealMat k_;
};

/// First applies `first`, then `then`: result(x, z) = sum_y first(x,y) * then(y,z).
TransitionMatrix compose(const TransitionMatrix& first, const TransitionMatrix& then);

/// Probability vector over [C].
class Marginal {
public:
    Marginal(int choices, std::vector<double> q);

    int choices() const { return choices_; }
    const std::vector<double>& q() const { return q_; }
    double operator[](int i) const { return q_[i]; }

private:
    int choices_;
    std::vector<double> q_;
};

/// Determinant mutual information |det(p)|, in [0, (1/C)^C].
/// The determinant is evaluated exactly over rationals (each double is an
/// exact dyadic rational) and rounded once at the end, so dmi(j) equals
/// dmi(transpose(j)) bit-for-bit and is unchanged by relabeling either
/// variable with a permutation.
double dmi(const JointDistribution& j);

/// Post-processes the row variable through k:
/// out(x', y) = sum_x k(x, x') * j(x, y).
JointDistribution garble(const JointDistribution& j, const TransitionMatrix& k);

/// Joint over two reports when each side's signal is pushed through its
/// own strategy: out(a, b) = sum_{x,y} s_row(x,a) * s_col(y,b) * j(x,y).
JointDistribution pair_joint_under_strategies(const JointDistribution& j,
                                              const TransitionMatrix& s_row,
                                              const TransitionMatrix& s_col);

/// True iff |det(p)| exceeds tol.
bool is_informative_pair(const JointDistribution& j, double tol = kInformativeTol);

} // namespace dmim
