#pragma once

#include <vector>

#include "dmim/linalg.hpp"
#include "dmim/matrix.hpp"

namespace dmim {

/// Core sizes of a mechanism run. The payment scheme needs n >= 2 agents,
/// at least 2 choices, and T >= 2C tasks so both blocks can reach size C.
struct ExperimentParams {
    int agents;
    int tasks;
    int choices;

    ExperimentParams(int agents, int tasks, int choices);
};

/// Complete n x T matrix of answers in 1..C. Task and agent indices are
/// zero-based in code; answer values keep their one-based labels.
class ReportMatrix {
public:
    ReportMatrix(int agents, int tasks, int choices, std::vector<int> entries);

    int agents() const { return agents_; }
    int tasks() const { return tasks_; }
    int choices() const { return choices_; }

    int operator()(int agent, int task) const {
        return entries_[static_cast<size_t>(agent) * tasks_ + task];
    }

    bool operator==(const ReportMatrix&) const = default;

private:
    int agents_;
    int tasks_;
    int choices_;
    std::vector<int> entries_;
};

/// Partition of the zero-based task indices 0..T-1 into two blocks.
class TaskSplit {
public:
    /// Builds the split from the first block; the second is the complement.
    TaskSplit(int tasks, std::vector<int> first_block);

    int tasks() const { return tasks_; }
    const std::vector<int>& t1() const { return t1_; }
    const std::vector<int>& t2() const { return t2_; }

private:
    int tasks_;
    std::vector<int> t1_;
    std::vector<int> t2_;
};

/// First floor(T/2) tasks vs. the rest. Content-independent, so it cannot
/// leak report information into the block assignment.
TaskSplit default_split(int tasks, int choices);

/// C x C count matrix of co-occurring answer pairs of two agents over one
/// task block: entry (c, c') counts tasks where agent i answered c+1 and
/// agent j answered c'+1. Entries sum to the block size.
using AnswerMatrix = IntMat;

AnswerMatrix answer_matrix(const ReportMatrix& r, int agent_i, int agent_j,
                           const std::vector<int>& block);

struct PaymentResult {
    std::vector<BigInt> raw;
    std::vector<double> normalized;
    /// Common positive denominator (n-1) * a1 * a2 with
    /// a_l = ordered_task_count(|T_l|, C); normalized = raw / denominator.
    BigInt denominator;
};

/// Each agent's payment: sum over peers of the product of the two blocks'
/// answer-matrix determinants. Raw values are exact; normalization divides
/// by (n-1)*a1*a2 once, in rational arithmetic rounded to double.
PaymentResult payments(const ReportMatrix& r, const TaskSplit& split);

/// One-based agent ids sorted by payment, highest first; ties broken by
/// ascending id. Ordering uses the exact raw values (the normalization
/// constant is shared, so the order is the same).
std::vector<int> rank_agents(const PaymentResult& p);

/// Task count sufficient for Pr[|q_i - E q_i| > alpha] <= delta when every
/// report pair's joint has permanent at most kappa:
/// 4C / (1 - (1 - alpha^2 delta / (3 (C!+1) (n-1) kappa))^(1/C)).
double task_bound_g(double alpha, double delta, int choices, double kappa, int n);

/// Single-pair variant with the pair's permanent in place of (n-1)*kappa:
/// 4C / (1 - (1 - alpha^2 delta / (3 per_u (C!+1)))^(1/C)).
double task_bound_h(double alpha, double delta, int choices, double per_u);

/// Upper bound on Var[det(M_l) / f(Tl, C)] given the pair's permanent:
/// (1/f(Tl,C) + C! (1 - f(Tl-C,C)/f(Tl,C))) * per_u, f = ordered_task_count.
double variance_bound(long long tl, int choices, double per_u);

} // namespace dmim
