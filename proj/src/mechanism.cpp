#include "dmim/mechanism.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dmim/errors.hpp"

namespace dmim {

ExperimentParams::ExperimentParams(int agents, int tasks, int choices)
    : agents(agents), tasks(tasks), choices(choices) {
    if (agents < 2)
        throw ParameterError("need at least 2 agents, got " + std::to_string(agents));
    if (choices < 2)
        throw ParameterError("need at least 2 choices, got " + std::to_string(choices));
    if (tasks < 2 * choices)
        throw ParameterError("need at least 2C = " + std::to_string(2 * choices) +
                             " tasks, got " + std::to_string(tasks));
}

ReportMatrix::ReportMatrix(int agents, int tasks, int choices, std::vector<int> entries)
    : agents_(agents), tasks_(tasks), choices_(choices), entries_(std::move(entries)) {
    if (agents_ < 2) throw ValidationError("report matrix needs at least 2 agents");
    if (tasks_ < 1) throw ValidationError("report matrix needs at least 1 task");
    if (choices_ < 2) throw ValidationError("report matrix needs at least 2 choices");
    if (entries_.size() != static_cast<size_t>(agents_) * tasks_)
        throw ValidationError("report matrix expects " +
                              std::to_string(static_cast<long long>(agents_) * tasks_) +
                              " entries, got " + std::to_string(entries_.size()));
    for (size_t k = 0; k < entries_.size(); ++k) {
        int v = entries_[k];
        if (v < 1 || v > choices_)
            throw ValidationError("answer " + std::to_string(v) + " of agent " +
                                  std::to_string(k / tasks_ + 1) + " on task " +
                                  std::to_string(k % tasks_ + 1) + " is outside 1.." +
                                  std::to_string(choices_));
    }
}

TaskSplit::TaskSplit(int tasks, std::vector<int> first_block)
    : tasks_(tasks), t1_(std::move(first_block)) {
    if (tasks_ < 2) throw ValidationError("task split needs at least 2 tasks");
    std::sort(t1_.begin(), t1_.end());
    std::vector<bool> in_first(tasks_, false);
    for (int t : t1_) {
        if (t < 0 || t >= tasks_)
            throw ValidationError("split block holds task index " + std::to_string(t + 1) +
                                  ", valid range is 1.." + std::to_string(tasks_));
        if (in_first[t])
            throw ValidationError("split block lists task " + std::to_string(t + 1) + " twice");
        in_first[t] = true;
    }
    t2_.reserve(tasks_ - t1_.size());
    for (int t = 0; t < tasks_; ++t)
        if (!in_first[t]) t2_.push_back(t);
    if (t1_.empty() || t2_.empty()) throw ValidationError("both split blocks must be nonempty");
}

TaskSplit default_split(int tasks, int choices) {
    if (choices < 2) throw ParameterError("need at least 2 choices");
    if (tasks < 2 * choices)
        throw ParameterError("need at least 2C = " + std::to_string(2 * choices) +
                             " tasks to split, got " + std::to_string(tasks));
    std::vector<int> first(tasks / 2);
    std::iota(first.begin(), first.end(), 0);
    return {tasks, std::move(first)};
}

AnswerMatrix answer_matrix(const ReportMatrix& r, int agent_i, int agent_j,
                           const std::vector<int>& block) {
    if (agent_i == agent_j)
        throw ValidationError("answer matrix needs two distinct agents, got " +
                              std::to_string(agent_i + 1) + " twice");
    if (agent_i < 0 || agent_i >= r.agents() || agent_j < 0 || agent_j >= r.agents())
        throw ValidationError("agent index outside 1.." + std::to_string(r.agents()));
    if (block.empty()) throw ValidationError("answer matrix needs a nonempty task block");
    const int c = r.choices();
    AnswerMatrix m(c, c, BigInt(0));
    for (int t : block) {
        if (t < 0 || t >= r.tasks())
            throw ValidationError("task index " + std::to_string(t + 1) + " outside 1.." +
                                  std::to_string(r.tasks()));
        m(r(agent_i, t) - 1, r(agent_j, t) - 1) += 1;
    }
    return m;
}

namespace {

void check_split_blocks(const ReportMatrix& r, const TaskSplit& split) {
    if (split.tasks() != r.tasks())
        throw ValidationError("split covers " + std::to_string(split.tasks()) +
                              " tasks, reports have " + std::to_string(r.tasks()));
    const size_t c = static_cast<size_t>(r.choices());
    if (split.t1().size() < c || split.t2().size() < c)
        throw ParameterError("each split block needs at least C = " +
                             std::to_string(r.choices()) + " tasks, got " +
                             std::to_string(split.t1().size()) + " and " +
                             std::to_string(split.t2().size()));
}

} // namespace

PaymentResult payments(const ReportMatrix& r, const TaskSplit& split) {
    check_split_blocks(r, split);
    const int n = r.agents();
    const int c = r.choices();

    PaymentResult out;
    out.raw.assign(n, BigInt(0));
    // det(M^{ji}) = det(transpose(M^{ij})) = det(M^{ij}), so one product per
    // unordered pair feeds both agents.
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            BigInt d1 = det_int(answer_matrix(r, i, j, split.t1()));
            BigInt d2 = det_int(answer_matrix(r, i, j, split.t2()));
            BigInt product = d1 * d2;
            out.raw[i] += product;
            out.raw[j] += product;
        }
    }

    out.denominator = BigInt(n - 1) *
                      ordered_task_count(static_cast<long long>(split.t1().size()), c) *
                      ordered_task_count(static_cast<long long>(split.t2().size()), c);
    out.normalized.reserve(n);
    for (const BigInt& p : out.raw)
        out.normalized.push_back(Rational(p, out.denominator).convert_to<double>());
    return out;
}

std::vector<int> rank_agents(const PaymentResult& p) {
    std::vector<int> order(p.raw.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (p.raw[a] != p.raw[b]) return p.raw[a] > p.raw[b];
        return a < b;
    });
    for (int& id : order) id += 1;
    return order;
}

namespace {

void check_bound_common(double alpha, double delta, int choices) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ParameterError("alpha must be positive");
    if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("delta must lie in (0, 1)");
    if (choices < 2) throw ParameterError("need at least 2 choices");
}

double bound_from_ratio(double ratio, int choices) {
    if (!(ratio < 1.0))
        throw ParameterError("bound formula leaves its domain: alpha^2 delta too large "
                             "for the given permanent");
    return 4.0 * choices / (1.0 - std::pow(1.0 - ratio, 1.0 / choices));
}

} // namespace

double task_bound_g(double alpha, double delta, int choices, double kappa, int n) {
    check_bound_common(alpha, delta, choices);
    if (!(kappa > 0.0 && kappa <= 1.0)) throw ParameterError("kappa must lie in (0, 1]");
    if (!(alpha < kappa)) throw ParameterError("alpha must be smaller than kappa");
    if (n < 2) throw ParameterError("need at least 2 agents");
    double cf = factorial(choices).convert_to<double>();
    double ratio = alpha * alpha * delta / (3.0 * (cf + 1.0) * (n - 1) * kappa);
    return bound_from_ratio(ratio, choices);
}

double task_bound_h(double alpha, double delta, int choices, double per_u) {
    check_bound_common(alpha, delta, choices);
    if (!(per_u > 0.0) || !std::isfinite(per_u))
        throw ParameterError("permanent must be positive");
    double cf = factorial(choices).convert_to<double>();
    double ratio = alpha * alpha * delta / (3.0 * per_u * (cf + 1.0));
    return bound_from_ratio(ratio, choices);
}

double variance_bound(long long tl, int choices, double per_u) {
    if (choices < 2) throw ParameterError("need at least 2 choices");
    if (tl < choices)
        throw ParameterError("block size " + std::to_string(tl) + " is below C = " +
                             std::to_string(choices));
    if (per_u < 0.0 || !std::isfinite(per_u))
        throw ParameterError("permanent must be non-negative");
    BigInt f = ordered_task_count(tl, choices);
    BigInt f_short = ordered_task_count(tl - choices, choices);
    Rational factor = Rational(BigInt(1), f) +
                      Rational(factorial(choices)) * (Rational(1) - Rational(f_short, f));
    return factor.convert_to<double>() * per_u;
}

} // namespace dmim
