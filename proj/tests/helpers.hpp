#pragma once

// Random instance generators for the property suites. Every draw goes
// through Rng, so any failure reproduces from the literal seed in the test.

#include <numeric>
#include <vector>

#include "dmim/info.hpp"
#include "dmim/matrix.hpp"
#include "dmim/rng.hpp"
#include "dmim/sim.hpp"

namespace dmim::testgen {

/// Uniform in (0, 1]; keeps normalization denominators away from zero.
inline double positive_u01(Rng& rng) { return 1.0 - rng.u01(); }

inline RealMat random_joint_matrix(Rng& rng, int c) {
    RealMat m(c, c);
    double total = 0.0;
    for (int i = 0; i < c; ++i)
        for (int j = 0; j < c; ++j) {
            m(i, j) = positive_u01(rng);
            total += m(i, j);
        }
    for (int i = 0; i < c; ++i)
        for (int j = 0; j < c; ++j) m(i, j) /= total;
    return m;
}

inline JointDistribution random_joint(Rng& rng, int c) {
    return {c, random_joint_matrix(rng, c)};
}

inline RealMat random_stochastic_matrix(Rng& rng, int c) {
    RealMat m(c, c);
    for (int i = 0; i < c; ++i) {
        double total = 0.0;
        for (int j = 0; j < c; ++j) {
            m(i, j) = positive_u01(rng);
            total += m(i, j);
        }
        for (int j = 0; j < c; ++j) m(i, j) /= total;
    }
    return m;
}

inline TransitionMatrix random_transition(Rng& rng, int c) {
    return {c, random_stochastic_matrix(rng, c)};
}

inline RealMat random_permutation_matrix(Rng& rng, int c) {
    std::vector<int> perm(c);
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = c - 1; i > 0; --i) {
        int j = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
        std::swap(perm[i], perm[j]);
    }
    RealMat m(c, c, 0.0);
    for (int i = 0; i < c; ++i) m(i, perm[i]) = 1.0;
    return m;
}

inline RealMat random_real_matrix(Rng& rng, int c, double scale) {
    RealMat m(c, c);
    for (int i = 0; i < c; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = rng.u01() * scale;
    return m;
}

inline IntMat random_int_matrix(Rng& rng, int c, int max_entry) {
    IntMat m(c, c);
    for (int i = 0; i < c; ++i)
        for (int j = 0; j < c; ++j)
            m(i, j) = BigInt(rng.next_u64() % static_cast<std::uint64_t>(max_entry + 1));
    return m;
}

/// Joint with numerators in 1..max_num over their common sum: exact, and
/// its double projection is clean enough for the 1e-9 validators.
inline RatMat random_rat_joint(Rng& rng, int c, int max_num = 30) {
    std::vector<BigInt> nums(static_cast<size_t>(c) * c);
    BigInt total(0);
    for (auto& v : nums) {
        v = BigInt(1 + rng.next_u64() % static_cast<std::uint64_t>(max_num));
        total += v;
    }
    RatMat m(c, c);
    for (int i = 0; i < c; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = Rational(nums[static_cast<size_t>(i) * c + j], total);
    return m;
}

inline RatMat random_rat_stochastic(Rng& rng, int c, int max_num = 30) {
    RatMat m(c, c);
    for (int i = 0; i < c; ++i) {
        std::vector<BigInt> nums(c);
        BigInt total(0);
        for (auto& v : nums) {
            v = BigInt(1 + rng.next_u64() % static_cast<std::uint64_t>(max_num));
            total += v;
        }
        for (int j = 0; j < c; ++j) m(i, j) = Rational(nums[j], total);
    }
    return m;
}

inline WorldModel random_full_joint_world(Rng& rng, int agents, int c) {
    size_t cells = 1;
    for (int i = 0; i < agents; ++i) cells *= static_cast<size_t>(c);
    std::vector<double> table(cells);
    double total = 0.0;
    for (double& v : table) {
        v = positive_u01(rng);
        total += v;
    }
    for (double& v : table) v /= total;
    return WorldModel(FullJoint(agents, c, std::move(table)));
}

inline WorldModel random_ground_truth_world(Rng& rng, int agents, int c) {
    std::vector<double> g(c);
    double total = 0.0;
    for (double& v : g) {
        v = positive_u01(rng);
        total += v;
    }
    for (double& v : g) v /= total;
    std::vector<TransitionMatrix> conf;
    conf.reserve(agents);
    for (int i = 0; i < agents; ++i) conf.push_back(random_transition(rng, c));
    return WorldModel(GroundTruth(Marginal(c, std::move(g)), std::move(conf)));
}

/// Identity leaning mixture (1-w)*I + w*random with w in [0.1, 0.4], so
/// |det| >= (1-2w)^(C-1) > 0: the map provably keeps information.
inline TransitionMatrix informative_transition(Rng& rng, int c) {
    double w = 0.1 + 0.3 * rng.u01();
    RealMat s = random_stochastic_matrix(rng, c);
    RealMat m(c, c);
    for (int i = 0; i < c; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = w * s(i, j) + (i == j ? 1.0 - w : 0.0);
    return {c, m};
}

/// Ground truth whose marginal is floored away from the boundary and whose
/// confusions are informative_transition draws, so every agent's signal
/// provably carries information about the truth.
inline WorldModel informative_ground_truth_world(Rng& rng, int agents, int c) {
    std::vector<double> g(c);
    double total = 0.0;
    for (double& v : g) {
        v = 0.2 + rng.u01();
        total += v;
    }
    for (double& v : g) v /= total;
    std::vector<TransitionMatrix> conf;
    conf.reserve(agents);
    for (int i = 0; i < agents; ++i) conf.push_back(informative_transition(rng, c));
    return WorldModel(GroundTruth(Marginal(c, std::move(g)), std::move(conf)));
}

inline StrategyProfile informative_profile(Rng& rng, int agents, int c) {
    std::vector<TransitionMatrix> s;
    s.reserve(agents);
    for (int i = 0; i < agents; ++i) s.push_back(informative_transition(rng, c));
    return StrategyProfile(std::move(s));
}

inline StrategyProfile random_profile(Rng& rng, int agents, int c) {
    std::vector<TransitionMatrix> s;
    s.reserve(agents);
    for (int i = 0; i < agents; ++i) s.push_back(random_transition(rng, c));
    return StrategyProfile(std::move(s));
}

} // namespace dmim::testgen
