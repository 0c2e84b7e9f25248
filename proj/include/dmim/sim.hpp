#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "dmim/info.hpp"
#include "dmim/matrix.hpp"
#include "dmim/mechanism.hpp"

namespace dmim {

/// Explicit prior over all agents' signal tuples. Table is indexed with
/// agent 0 as the most significant digit: index = ((x_0*C + x_1)*C + ...).
/// Capped at 4 agents; the table grows as C^n.
struct FullJoint {
    int agents;
    int choices;
    std::vector<double> table;

    FullJoint(int agents, int choices, std::vector<double> table);
};

/// Latent ground truth G plus per-agent confusion matrices: signals are
/// conditionally independent given G by construction. confusion[i](g, x)
/// is the chance agent i perceives x when the truth is g.
struct GroundTruth {
    Marginal g_dist;
    std::vector<TransitionMatrix> confusion;

    GroundTruth(Marginal g_dist, std::vector<TransitionMatrix> confusion);
    int agents() const { return static_cast<int>(confusion.size()); }
    int choices() const { return g_dist.choices(); }
};

class WorldModel {
public:
    WorldModel(FullJoint w) : model_(std::move(w)) {}
    WorldModel(GroundTruth w) : model_(std::move(w)) {}

    int agents() const;
    int choices() const;
    bool has_ground_truth() const { return std::holds_alternative<GroundTruth>(model_); }
    const FullJoint& full_joint() const;
    const GroundTruth& ground_truth() const;

private:
    std::variant<FullJoint, GroundTruth> model_;
};

/// One report strategy per agent, applied identically on every task.
struct StrategyProfile {
    std::vector<TransitionMatrix> s;

    explicit StrategyProfile(std::vector<TransitionMatrix> s);
    int agents() const { return static_cast<int>(s.size()); }
    int choices() const { return s.front().choices(); }
};

StrategyProfile truthful_profile(int agents, int choices);

/// Exact-rational twins of the world and strategy types, for the
/// enumeration oracle. Validation is exact: sums must equal 1, not merely
/// land within a tolerance.
struct RatFullJoint {
    int agents;
    int choices;
    std::vector<Rational> table;

    RatFullJoint(int agents, int choices, std::vector<Rational> table);
};

struct RatGroundTruth {
    std::vector<Rational> g_dist;
    std::vector<RatMat> confusion;

    RatGroundTruth(std::vector<Rational> g_dist, std::vector<RatMat> confusion);
    int agents() const { return static_cast<int>(confusion.size()); }
    int choices() const { return static_cast<int>(g_dist.size()); }
};

class RatWorld {
public:
    RatWorld(RatFullJoint w) : model_(std::move(w)) {}
    RatWorld(RatGroundTruth w) : model_(std::move(w)) {}

    int agents() const;
    int choices() const;
    bool has_ground_truth() const { return std::holds_alternative<RatGroundTruth>(model_); }
    const RatFullJoint& full_joint() const;
    const RatGroundTruth& ground_truth() const;

private:
    std::variant<RatFullJoint, RatGroundTruth> model_;
};

struct RatStrategyProfile {
    std::vector<RatMat> s;

    explicit RatStrategyProfile(std::vector<RatMat> s);
    int agents() const { return static_cast<int>(s.size()); }
    int choices() const { return s.front().rows(); }
};

RatStrategyProfile rat_truthful_profile(int agents, int choices);

/// Double projections, so one exact instance can drive both the oracle and
/// the floating-point paths.
WorldModel to_world(const RatWorld& w);
StrategyProfile to_profile(const RatStrategyProfile& s);

/// Marginal joint distribution of the signal pair (i, j).
JointDistribution pairwise_signal_joint(const WorldModel& w, int i, int j);
RatMat rat_pairwise_signal_joint(const RatWorld& w, int i, int j);

/// Draws T i.i.d. signal tuples and pushes each agent's signal through her
/// strategy. Fixed draw order per task (signals, then reports agent by
/// agent), so output is a pure function of the seed.
ReportMatrix sample_reports(const WorldModel& w, const StrategyProfile& s, int tasks,
                            std::uint64_t seed);

/// Analytic E[p_i] = sum over peers of a1*a2*dmi(report-pair joint)^2,
/// a_l = ordered_task_count(|T_l|, C).
std::vector<double> expected_payment_exact(const WorldModel& w, const StrategyProfile& s,
                                           const TaskSplit& split);

/// Analytic E[q_i] = E[p_i] / ((n-1)*a1*a2) = mean of peers' dmi^2.
std::vector<double> expected_normalized_payment(const WorldModel& w, const StrategyProfile& s,
                                                const TaskSplit& split);

/// Exact E[p_i] by brute force: for each peer pair, every possible
/// length-T sequence of report pairs is enumerated with its exact rational
/// probability and the two blocks' determinant product. Feasible only
/// while (C^2)^T <= 10^6; independent of the analytic formula by design.
std::vector<Rational> enumerate_expected_payment(const RatWorld& w,
                                                 const RatStrategyProfile& s,
                                                 const TaskSplit& split);

struct TrialConfig {
    WorldModel world;
    StrategyProfile strategies;
    TaskSplit split;
    long long trials;
    std::uint64_t master_seed;
    /// Deviation thresholds: trial counts of |q_i - E[q_i]| > alpha.
    std::vector<double> alpha_thresholds;
    /// Worker count for the parallel path; 0 picks the runtime default.
    int threads = 0;
};

/// Every field is derived from exact integer accumulators once at the end,
/// so equal configurations give bitwise-equal stats at any worker count.
struct TrialStats {
    long long trials = 0;
    /// Analytic E[q_i], the reference the deviation counts are against.
    std::vector<double> expected_normalized;
    std::vector<double> mean_raw;
    std::vector<double> mean_normalized;
    std::vector<double> variance_normalized;
    std::vector<double> alpha_thresholds;
    /// deviation_counts[a][i]: trials with |q_i - E[q_i]| > alpha_thresholds[a].
    std::vector<std::vector<long long>> deviation_counts;
    /// Per unordered agent pair in lexicographic order: mean and sample
    /// variance of det(M_1)/f(|T_1|, C).
    std::vector<double> det1_scaled_mean;
    std::vector<double> det1_scaled_variance;

    bool operator==(const TrialStats&) const = default;
};

/// Monte Carlo over independent mechanism rounds; parallel when built with
/// OpenMP. Per-trial substreams come from trial_seed, and all merging is
/// exact integer addition, so the result matches monte_carlo_reference
/// bit for bit.
TrialStats monte_carlo(const TrialConfig& cfg);

/// Single-threaded reference of the same computation, kept for testing the
/// parallel path and as the benchmark baseline.
TrialStats monte_carlo_reference(const TrialConfig& cfg);

/// dmi(report, ground truth)^2 for one agent.
double quality_score(const WorldModel& w, const StrategyProfile& s, int i);

struct Theorem2Entry {
    int agent_i;
    int agent_j;
    double payment_gap;
    double quality_gap;
    double ratio;
    double constant;
};

struct Theorem2Report {
    std::vector<double> expected_payment;
    std::vector<double> quality;
    /// One entry per agent pair whose quality gap exceeds 1e-9.
    std::vector<Theorem2Entry> pairs;
    double max_rel_mismatch = 0.0;
};

/// For every agent pair with distinct qualities, compares the payment-gap
/// to quality-gap ratio against the analytic constant
/// sum over other agents k of a1*a2*det(row-stochastic map from G to
/// agent k's report)^2. Both sides are evaluated in exact rational
/// arithmetic from the given (dyadic) inputs.
Theorem2Report theorem2_check(const WorldModel& w, const StrategyProfile& s,
                              const TaskSplit& split);

} // namespace dmim
