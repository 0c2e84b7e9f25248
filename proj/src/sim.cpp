#include "dmim/sim.hpp"

#include <cmath>
#include <string>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dmim/errors.hpp"
#include "dmim/rng.hpp"

namespace dmim {

namespace {

long long ipow_ll(int base, int exp) {
    long long out = 1;
    for (int i = 0; i < exp; ++i) out *= base;
    return out;
}

void check_pair(int agents, int i, int j) {
    if (i < 0 || i >= agents || j < 0 || j >= agents)
        throw ValidationError("agent index outside 1.." + std::to_string(agents));
    if (i == j)
        throw ValidationError("need two distinct agents, got " + std::to_string(i + 1) +
                              " twice");
}

void check_block_sizes(const TaskSplit& split, int choices) {
    if (split.t1().size() < static_cast<size_t>(choices) ||
        split.t2().size() < static_cast<size_t>(choices))
        throw ParameterError("each split block needs at least C = " + std::to_string(choices) +
                             " tasks, got " + std::to_string(split.t1().size()) + " and " +
                             std::to_string(split.t2().size()));
}

void check_world_profile(const WorldModel& w, const StrategyProfile& s) {
    if (s.agents() != w.agents())
        throw ValidationError("strategy profile covers " + std::to_string(s.agents()) +
                              " agents, world has " + std::to_string(w.agents()));
    if (s.choices() != w.choices())
        throw ValidationError("strategy choice count disagrees with the world");
}

} // namespace

FullJoint::FullJoint(int agents, int choices, std::vector<double> table)
    : agents(agents), choices(choices), table(std::move(table)) {
    if (agents < 2) throw ValidationError("world needs at least 2 agents");
    if (agents > 4)
        throw ParameterError("full joint table is capped at 4 agents, got " +
                             std::to_string(agents));
    if (choices < 2) throw ValidationError("world needs at least 2 choices");
    size_t want = 1;
    for (int i = 0; i < agents; ++i) want *= static_cast<size_t>(choices);
    if (this->table.size() != want)
        throw ValidationError("full joint table expects " + std::to_string(want) +
                              " entries, got " + std::to_string(this->table.size()));
    double total = 0.0;
    for (double v : this->table) {
        if (!std::isfinite(v)) throw ValidationError("full joint table has a non-finite entry");
        if (v < 0.0) throw ValidationError("full joint table has a negative entry");
        total += v;
    }
    if (std::fabs(total - 1.0) > kProbTol)
        throw ValidationError("full joint table sums to " + std::to_string(total) +
                              ", expected 1");
}

GroundTruth::GroundTruth(Marginal g_dist, std::vector<TransitionMatrix> confusion)
    : g_dist(std::move(g_dist)), confusion(std::move(confusion)) {
    if (this->confusion.size() < 2) throw ValidationError("world needs at least 2 agents");
    for (const TransitionMatrix& m : this->confusion)
        if (m.choices() != this->g_dist.choices())
            throw ValidationError("confusion matrix size disagrees with the truth marginal");
}

int WorldModel::agents() const {
    return std::holds_alternative<FullJoint>(model_) ? std::get<FullJoint>(model_).agents
                                                     : std::get<GroundTruth>(model_).agents();
}

int WorldModel::choices() const {
    return std::holds_alternative<FullJoint>(model_) ? std::get<FullJoint>(model_).choices
                                                     : std::get<GroundTruth>(model_).choices();
}

const FullJoint& WorldModel::full_joint() const {
    if (!std::holds_alternative<FullJoint>(model_))
        throw ValidationError("world model holds no full joint table");
    return std::get<FullJoint>(model_);
}

const GroundTruth& WorldModel::ground_truth() const {
    if (!std::holds_alternative<GroundTruth>(model_))
        throw ValidationError("world model holds no ground truth");
    return std::get<GroundTruth>(model_);
}

StrategyProfile::StrategyProfile(std::vector<TransitionMatrix> s_in) : s(std::move(s_in)) {
    if (s.size() < 2) throw ValidationError("strategy profile needs at least 2 agents");
    for (const TransitionMatrix& m : s)
        if (m.choices() != s.front().choices())
            throw ValidationError("strategy matrices disagree on choice count");
}

StrategyProfile truthful_profile(int agents, int choices) {
    std::vector<TransitionMatrix> s;
    s.reserve(agents);
    for (int i = 0; i < agents; ++i) s.push_back(TransitionMatrix::identity(choices));
    return StrategyProfile(std::move(s));
}

namespace {

void check_rat_dist(const std::vector<Rational>& q, const char* what) {
    Rational total(0);
    for (const Rational& v : q) {
        if (v < 0) throw ValidationError(std::string(what) + " has a negative entry");
        total += v;
    }
    if (total != 1) throw ValidationError(std::string(what) + " must sum to exactly 1");
}

void check_rat_stochastic(const RatMat& m, const char* what) {
    if (!m.is_square() || m.rows() < 2)
        throw ValidationError(std::string(what) + " must be square with at least 2 choices");
    for (int x = 0; x < m.rows(); ++x) {
        Rational row(0);
        for (int y = 0; y < m.cols(); ++y) {
            if (m(x, y) < 0) throw ValidationError(std::string(what) + " has a negative entry");
            row += m(x, y);
        }
        if (row != 1)
            throw ValidationError(std::string(what) + " row " + std::to_string(x) +
                                  " must sum to exactly 1");
    }
}

} // namespace

RatFullJoint::RatFullJoint(int agents, int choices, std::vector<Rational> table)
    : agents(agents), choices(choices), table(std::move(table)) {
    if (agents < 2) throw ValidationError("world needs at least 2 agents");
    if (agents > 4)
        throw ParameterError("full joint table is capped at 4 agents, got " +
                             std::to_string(agents));
    if (choices < 2) throw ValidationError("world needs at least 2 choices");
    size_t want = 1;
    for (int i = 0; i < agents; ++i) want *= static_cast<size_t>(choices);
    if (this->table.size() != want)
        throw ValidationError("full joint table expects " + std::to_string(want) +
                              " entries, got " + std::to_string(this->table.size()));
    check_rat_dist(this->table, "full joint table");
}

RatGroundTruth::RatGroundTruth(std::vector<Rational> g_dist, std::vector<RatMat> confusion)
    : g_dist(std::move(g_dist)), confusion(std::move(confusion)) {
    if (this->g_dist.size() < 2) throw ValidationError("world needs at least 2 choices");
    if (this->confusion.size() < 2) throw ValidationError("world needs at least 2 agents");
    check_rat_dist(this->g_dist, "truth marginal");
    for (const RatMat& m : this->confusion) {
        check_rat_stochastic(m, "confusion matrix");
        if (m.rows() != choices())
            throw ValidationError("confusion matrix size disagrees with the truth marginal");
    }
}

int RatWorld::agents() const {
    return std::holds_alternative<RatFullJoint>(model_)
               ? std::get<RatFullJoint>(model_).agents
               : std::get<RatGroundTruth>(model_).agents();
}

int RatWorld::choices() const {
    return std::holds_alternative<RatFullJoint>(model_)
               ? std::get<RatFullJoint>(model_).choices
               : std::get<RatGroundTruth>(model_).choices();
}

const RatFullJoint& RatWorld::full_joint() const {
    if (!std::holds_alternative<RatFullJoint>(model_))
        throw ValidationError("world model holds no full joint table");
    return std::get<RatFullJoint>(model_);
}

const RatGroundTruth& RatWorld::ground_truth() const {
    if (!std::holds_alternative<RatGroundTruth>(model_))
        throw ValidationError("world model holds no ground truth");
    return std::get<RatGroundTruth>(model_);
}

RatStrategyProfile::RatStrategyProfile(std::vector<RatMat> s_in) : s(std::move(s_in)) {
    if (s.size() < 2) throw ValidationError("strategy profile needs at least 2 agents");
    for (const RatMat& m : s) {
        check_rat_stochastic(m, "strategy matrix");
        if (m.rows() != s.front().rows())
            throw ValidationError("strategy matrices disagree on choice count");
    }
}

RatStrategyProfile rat_truthful_profile(int agents, int choices) {
    std::vector<RatMat> s;
    s.reserve(agents);
    for (int i = 0; i < agents; ++i) s.push_back(RatMat::identity(choices));
    return RatStrategyProfile(std::move(s));
}

namespace {

double to_d(const Rational& v) { return v.convert_to<double>(); }

RealMat rat_to_real(const RatMat& m) {
    RealMat out(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) out(i, j) = to_d(m(i, j));
    return out;
}

RatMat real_to_rat(const RealMat& m) {
    RatMat out(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) out(i, j) = Rational(m(i, j));
    return out;
}

} // namespace

WorldModel to_world(const RatWorld& w) {
    if (w.has_ground_truth()) {
        const RatGroundTruth& gt = w.ground_truth();
        std::vector<double> g;
        g.reserve(gt.g_dist.size());
        for (const Rational& v : gt.g_dist) g.push_back(to_d(v));
        std::vector<TransitionMatrix> conf;
        conf.reserve(gt.confusion.size());
        for (const RatMat& m : gt.confusion)
            conf.emplace_back(m.rows(), rat_to_real(m));
        return WorldModel(GroundTruth(Marginal(gt.choices(), std::move(g)), std::move(conf)));
    }
    const RatFullJoint& fj = w.full_joint();
    std::vector<double> table;
    table.reserve(fj.table.size());
    for (const Rational& v : fj.table) table.push_back(to_d(v));
    return WorldModel(FullJoint(fj.agents, fj.choices, std::move(table)));
}

StrategyProfile to_profile(const RatStrategyProfile& s) {
    std::vector<TransitionMatrix> out;
    out.reserve(s.s.size());
    for (const RatMat& m : s.s) out.emplace_back(m.rows(), rat_to_real(m));
    return StrategyProfile(std::move(out));
}

JointDistribution pairwise_signal_joint(const WorldModel& w, int i, int j) {
    check_pair(w.agents(), i, j);
    const int c = w.choices();
    RealMat p(c, c, 0.0);
    if (w.has_ground_truth()) {
        const GroundTruth& gt = w.ground_truth();
        for (int x = 0; x < c; ++x)
            for (int y = 0; y < c; ++y) {
                double s = 0.0;
                for (int g = 0; g < c; ++g)
                    s += gt.g_dist[g] * gt.confusion[i](g, x) * gt.confusion[j](g, y);
                p(x, y) = s;
            }
    } else {
        const FullJoint& fj = w.full_joint();
        const int n = fj.agents;
        for (size_t idx = 0; idx < fj.table.size(); ++idx) {
            size_t rest = idx;
            int xi = 0, xj = 0;
            for (int a = n - 1; a >= 0; --a) {
                int digit = static_cast<int>(rest % c);
                if (a == i) xi = digit;
                if (a == j) xj = digit;
                rest /= c;
            }
            p(xi, xj) += fj.table[idx];
        }
    }
    return {c, std::move(p)};
}

RatMat rat_pairwise_signal_joint(const RatWorld& w, int i, int j) {
    check_pair(w.agents(), i, j);
    const int c = w.choices();
    RatMat p(c, c, Rational(0));
    if (w.has_ground_truth()) {
        const RatGroundTruth& gt = w.ground_truth();
        for (int x = 0; x < c; ++x)
            for (int y = 0; y < c; ++y) {
                Rational s(0);
                for (int g = 0; g < c; ++g)
                    s += gt.g_dist[g] * gt.confusion[i](g, x) * gt.confusion[j](g, y);
                p(x, y) = s;
            }
    } else {
        const RatFullJoint& fj = w.full_joint();
        const int n = fj.agents;
        for (size_t idx = 0; idx < fj.table.size(); ++idx) {
            size_t rest = idx;
            int xi = 0, xj = 0;
            for (int a = n - 1; a >= 0; --a) {
                int digit = static_cast<int>(rest % c);
                if (a == i) xi = digit;
                if (a == j) xj = digit;
                rest /= c;
            }
            p(xi, xj) += fj.table[idx];
        }
    }
    return p;
}

ReportMatrix sample_reports(const WorldModel& w, const StrategyProfile& s, int tasks,
                            std::uint64_t seed) {
    check_world_profile(w, s);
    if (tasks < 1) throw ValidationError("need at least 1 task to sample");
    const int n = w.agents();
    const int c = w.choices();

    std::vector<std::vector<double>> strat_rows(static_cast<size_t>(n) * c);
    for (int i = 0; i < n; ++i)
        for (int x = 0; x < c; ++x) {
            std::vector<double> row(c);
            for (int a = 0; a < c; ++a) row[a] = s.s[i](x, a);
            strat_rows[static_cast<size_t>(i) * c + x] = std::move(row);
        }
    std::vector<std::vector<double>> conf_rows;
    if (w.has_ground_truth()) {
        const GroundTruth& gt = w.ground_truth();
        conf_rows.resize(static_cast<size_t>(n) * c);
        for (int i = 0; i < n; ++i)
            for (int g = 0; g < c; ++g) {
                std::vector<double> row(c);
                for (int x = 0; x < c; ++x) row[x] = gt.confusion[i](g, x);
                conf_rows[static_cast<size_t>(i) * c + g] = std::move(row);
            }
    }

    Rng rng(seed);
    std::vector<int> entries(static_cast<size_t>(n) * tasks);
    std::vector<int> signal(n);
    for (int t = 0; t < tasks; ++t) {
        if (w.has_ground_truth()) {
            int g = rng.categorical(w.ground_truth().g_dist.q());
            for (int i = 0; i < n; ++i)
                signal[i] = rng.categorical(conf_rows[static_cast<size_t>(i) * c + g]);
        } else {
            long long idx = rng.categorical(w.full_joint().table);
            for (int i = n - 1; i >= 0; --i) {
                signal[i] = static_cast<int>(idx % c);
                idx /= c;
            }
        }
        for (int i = 0; i < n; ++i) {
            int report = rng.categorical(strat_rows[static_cast<size_t>(i) * c + signal[i]]);
            entries[static_cast<size_t>(i) * tasks + t] = report + 1;
        }
    }
    return {n, tasks, c, std::move(entries)};
}

namespace {

/// dmi^2 of the report-pair joint for every unordered pair.
std::vector<std::vector<double>> pair_dmi_squared(const WorldModel& w,
                                                  const StrategyProfile& s) {
    const int n = w.agents();
    std::vector<std::vector<double>> out(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            JointDistribution u = pairwise_signal_joint(w, i, j);
            double v = dmi(pair_joint_under_strategies(u, s.s[i], s.s[j]));
            out[i][j] = out[j][i] = v * v;
        }
    return out;
}

} // namespace

std::vector<double> expected_payment_exact(const WorldModel& w, const StrategyProfile& s,
                                           const TaskSplit& split) {
    check_world_profile(w, s);
    check_block_sizes(split, w.choices());
    const int n = w.agents();
    const int c = w.choices();
    double a1 = ordered_task_count(static_cast<long long>(split.t1().size()), c)
                    .convert_to<double>();
    double a2 = ordered_task_count(static_cast<long long>(split.t2().size()), c)
                    .convert_to<double>();
    auto d2 = pair_dmi_squared(w, s);
    std::vector<double> out(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (j != i) out[i] += a1 * a2 * d2[i][j];
    return out;
}

std::vector<double> expected_normalized_payment(const WorldModel& w, const StrategyProfile& s,
                                                const TaskSplit& split) {
    check_world_profile(w, s);
    check_block_sizes(split, w.choices());
    const int n = w.agents();
    auto d2 = pair_dmi_squared(w, s);
    std::vector<double> out(n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j)
            if (j != i) out[i] += d2[i][j];
        out[i] /= n - 1;
    }
    return out;
}

namespace {

RatMat rat_pair_joint_under_strategies(const RatMat& u, const RatMat& s_row,
                                       const RatMat& s_col) {
    const int c = u.rows();
    RatMat out(c, c, Rational(0));
    for (int a = 0; a < c; ++a)
        for (int b = 0; b < c; ++b) {
            Rational acc(0);
            for (int x = 0; x < c; ++x)
                for (int y = 0; y < c; ++y) acc += s_row(x, a) * s_col(y, b) * u(x, y);
            out(a, b) = acc;
        }
    return out;
}

/// E[det(M_1) det(M_2)] for one pair, by walking every length-T sequence
/// of report pairs with its exact probability.
Rational enumerate_pair_value(const RatMat& report_joint, const TaskSplit& split) {
    const int c = report_joint.rows();
    const int tasks = split.tasks();
    std::vector<bool> in_t1(tasks, false);
    for (int t : split.t1()) in_t1[t] = true;

    const int cells = c * c;
    std::vector<int> digit(tasks, 0);
    std::vector<BigInt> m1(static_cast<size_t>(cells)), m2(static_cast<size_t>(cells));
    Rational total(0);
    const long long count = ipow_ll(cells, tasks);
    for (long long seq = 0; seq < count; ++seq) {
        Rational prob(1);
        bool zero = false;
        for (int t = 0; t < tasks && !zero; ++t) {
            const Rational& f = report_joint(digit[t] / c, digit[t] % c);
            if (f == 0)
                zero = true;
            else
                prob *= f;
        }
        if (!zero) {
            std::fill(m1.begin(), m1.end(), BigInt(0));
            std::fill(m2.begin(), m2.end(), BigInt(0));
            for (int t = 0; t < tasks; ++t)
                (in_t1[t] ? m1 : m2)[digit[t]] += 1;
            IntMat b1(c, c), b2(c, c);
            for (int x = 0; x < c; ++x)
                for (int y = 0; y < c; ++y) {
                    b1(x, y) = m1[static_cast<size_t>(x) * c + y];
                    b2(x, y) = m2[static_cast<size_t>(x) * c + y];
                }
            total += prob * Rational(det_int(b1) * det_int(b2));
        }
        for (int t = 0; t < tasks; ++t) {
            if (++digit[t] < cells) break;
            digit[t] = 0;
        }
    }
    return total;
}

} // namespace

std::vector<Rational> enumerate_expected_payment(const RatWorld& w,
                                                 const RatStrategyProfile& s,
                                                 const TaskSplit& split) {
    if (s.agents() != w.agents())
        throw ValidationError("strategy profile covers " + std::to_string(s.agents()) +
                              " agents, world has " + std::to_string(w.agents()));
    if (s.choices() != w.choices())
        throw ValidationError("strategy choice count disagrees with the world");
    check_block_sizes(split, w.choices());

    const int c = w.choices();
    const int tasks = split.tasks();
    BigInt outcome_count(1);
    for (int t = 0; t < tasks; ++t) outcome_count *= c * c;
    if (outcome_count > 1'000'000)
        throw ParameterError("enumeration needs (C^2)^T <= 10^6, got " +
                             outcome_count.str());

    const int n = w.agents();
    std::vector<Rational> out(n, Rational(0));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            RatMat u = rat_pairwise_signal_joint(w, i, j);
            RatMat reports = rat_pair_joint_under_strategies(u, s.s[i], s.s[j]);
            Rational value = enumerate_pair_value(reports, split);
            out[i] += value;
            out[j] += value;
        }
    return out;
}

namespace {

struct Accum {
    std::vector<BigInt> sum_p;
    std::vector<BigInt> sum_p_sq;
    std::vector<BigInt> sum_d1;
    std::vector<BigInt> sum_d1_sq;
    std::vector<std::vector<long long>> dev;

    Accum(int agents, int pairs, int alphas)
        : sum_p(agents, BigInt(0)),
          sum_p_sq(agents, BigInt(0)),
          sum_d1(pairs, BigInt(0)),
          sum_d1_sq(pairs, BigInt(0)),
          dev(alphas, std::vector<long long>(agents, 0)) {}

    void merge(const Accum& o) {
        for (size_t i = 0; i < sum_p.size(); ++i) {
            sum_p[i] += o.sum_p[i];
            sum_p_sq[i] += o.sum_p_sq[i];
        }
        for (size_t p = 0; p < sum_d1.size(); ++p) {
            sum_d1[p] += o.sum_d1[p];
            sum_d1_sq[p] += o.sum_d1_sq[p];
        }
        for (size_t a = 0; a < dev.size(); ++a)
            for (size_t i = 0; i < dev[a].size(); ++i) dev[a][i] += o.dev[a][i];
    }
};

struct TrialPlan {
    int agents;
    int choices;
    int pairs;
    std::vector<double> expected_q;
    BigInt denominator;
    double denominator_d;
};

TrialPlan plan_trials(const TrialConfig& cfg) {
    check_world_profile(cfg.world, cfg.strategies);
    check_block_sizes(cfg.split, cfg.world.choices());
    if (cfg.trials < 1) throw ParameterError("need at least 1 trial");
    for (double a : cfg.alpha_thresholds)
        if (!(a >= 0.0) || !std::isfinite(a))
            throw ValidationError("deviation thresholds must be non-negative");

    TrialPlan plan;
    plan.agents = cfg.world.agents();
    plan.choices = cfg.world.choices();
    plan.pairs = plan.agents * (plan.agents - 1) / 2;
    plan.expected_q = expected_normalized_payment(cfg.world, cfg.strategies, cfg.split);
    const int c = plan.choices;
    plan.denominator =
        BigInt(plan.agents - 1) *
        ordered_task_count(static_cast<long long>(cfg.split.t1().size()), c) *
        ordered_task_count(static_cast<long long>(cfg.split.t2().size()), c);
    plan.denominator_d = plan.denominator.convert_to<double>();
    return plan;
}

void run_trial(const TrialConfig& cfg, const TrialPlan& plan, long long trial, Accum& acc) {
    ReportMatrix reports = sample_reports(cfg.world, cfg.strategies, cfg.split.tasks(),
                                          trial_seed(cfg.master_seed, trial));
    const int n = plan.agents;
    std::vector<BigInt> raw(n, BigInt(0));
    int pair = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j, ++pair) {
            BigInt d1 = det_int(answer_matrix(reports, i, j, cfg.split.t1()));
            BigInt d2 = det_int(answer_matrix(reports, i, j, cfg.split.t2()));
            acc.sum_d1[pair] += d1;
            acc.sum_d1_sq[pair] += d1 * d1;
            BigInt product = d1 * d2;
            raw[i] += product;
            raw[j] += product;
        }
    for (int i = 0; i < n; ++i) {
        acc.sum_p[i] += raw[i];
        acc.sum_p_sq[i] += raw[i] * raw[i];
        double q = raw[i].convert_to<double>() / plan.denominator_d;
        for (size_t a = 0; a < cfg.alpha_thresholds.size(); ++a)
            if (std::fabs(q - plan.expected_q[i]) > cfg.alpha_thresholds[a]) ++acc.dev[a][i];
    }
}

TrialStats finalize(const TrialConfig& cfg, const TrialPlan& plan, const Accum& acc) {
    const BigInt trials(cfg.trials);
    TrialStats stats;
    stats.trials = cfg.trials;
    stats.expected_normalized = plan.expected_q;
    stats.alpha_thresholds = cfg.alpha_thresholds;
    stats.deviation_counts = acc.dev;

    const int n = plan.agents;
    stats.mean_raw.reserve(n);
    stats.mean_normalized.reserve(n);
    stats.variance_normalized.reserve(n);
    for (int i = 0; i < n; ++i) {
        stats.mean_raw.push_back(Rational(acc.sum_p[i], trials).convert_to<double>());
        stats.mean_normalized.push_back(
            Rational(acc.sum_p[i], trials * plan.denominator).convert_to<double>());
        if (cfg.trials < 2) {
            stats.variance_normalized.push_back(0.0);
        } else {
            BigInt num = trials * acc.sum_p_sq[i] - acc.sum_p[i] * acc.sum_p[i];
            BigInt den = trials * (trials - 1) * plan.denominator * plan.denominator;
            stats.variance_normalized.push_back(Rational(num, den).convert_to<double>());
        }
    }

    const BigInt f1 = ordered_task_count(static_cast<long long>(cfg.split.t1().size()),
                                         plan.choices);
    stats.det1_scaled_mean.reserve(plan.pairs);
    stats.det1_scaled_variance.reserve(plan.pairs);
    for (int p = 0; p < plan.pairs; ++p) {
        stats.det1_scaled_mean.push_back(
            Rational(acc.sum_d1[p], trials * f1).convert_to<double>());
        if (cfg.trials < 2) {
            stats.det1_scaled_variance.push_back(0.0);
        } else {
            BigInt num = trials * acc.sum_d1_sq[p] - acc.sum_d1[p] * acc.sum_d1[p];
            BigInt den = trials * (trials - 1) * f1 * f1;
            stats.det1_scaled_variance.push_back(Rational(num, den).convert_to<double>());
        }
    }
    return stats;
}

} // namespace

TrialStats monte_carlo_reference(const TrialConfig& cfg) {
    TrialPlan plan = plan_trials(cfg);
    Accum acc(plan.agents, plan.pairs, static_cast<int>(cfg.alpha_thresholds.size()));
    for (long long t = 0; t < cfg.trials; ++t) run_trial(cfg, plan, t, acc);
    return finalize(cfg, plan, acc);
}

TrialStats monte_carlo(const TrialConfig& cfg) {
#ifdef _OPENMP
    TrialPlan plan = plan_trials(cfg);
    const int alphas = static_cast<int>(cfg.alpha_thresholds.size());
    Accum total(plan.agents, plan.pairs, alphas);
    int workers = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();
#pragma omp parallel num_threads(workers)
    {
        Accum local(plan.agents, plan.pairs, alphas);
#pragma omp for schedule(static) nowait
        for (long long t = 0; t < cfg.trials; ++t) run_trial(cfg, plan, t, local);
#pragma omp critical
        total.merge(local);
    }
    return finalize(cfg, plan, total);
#else
    return monte_carlo_reference(cfg);
#endif
}

double quality_score(const WorldModel& w, const StrategyProfile& s, int i) {
    if (!w.has_ground_truth())
        throw ValidationError("quality score needs a world with ground truth");
    check_world_profile(w, s);
    if (i < 0 || i >= w.agents())
        throw ValidationError("agent index outside 1.." + std::to_string(w.agents()));
    const GroundTruth& gt = w.ground_truth();
    const int c = w.choices();
    RealMat p(c, c, 0.0);
    for (int a = 0; a < c; ++a)
        for (int g = 0; g < c; ++g) {
            double acc = 0.0;
            for (int x = 0; x < c; ++x) acc += gt.confusion[i](g, x) * s.s[i](x, a);
            p(a, g) = gt.g_dist[g] * acc;
        }
    double v = dmi(JointDistribution(c, std::move(p)));
    return v * v;
}

Theorem2Report theorem2_check(const WorldModel& w, const StrategyProfile& s,
                              const TaskSplit& split) {
    if (!w.has_ground_truth())
        throw ValidationError("the proportionality check needs a world with ground truth");
    check_world_profile(w, s);
    check_block_sizes(split, w.choices());
    const int n = w.agents();
    const int c = w.choices();
    if (n < 3) throw ParameterError("the proportionality check needs at least 3 agents");

    // Everything below runs on exact rationals built from the double
    // inputs, so the ratio and the analytic constant agree exactly
    // whenever the quality gap is nonzero.
    const GroundTruth& gt = w.ground_truth();
    std::vector<Rational> g(c);
    for (int v = 0; v < c; ++v) g[v] = Rational(gt.g_dist[v]);
    std::vector<RatMat> conf(n), strat(n), report_given_g(n);
    for (int i = 0; i < n; ++i) {
        conf[i] = real_to_rat(gt.confusion[i].k());
        strat[i] = real_to_rat(s.s[i].k());
        report_given_g[i] = mat_mul(conf[i], strat[i]);
    }

    const Rational informative_tol(kInformativeTol);
    std::vector<Rational> quality(n), det_report_given_g(n);
    int informative = 0;
    for (int i = 0; i < n; ++i) {
        RatMat joint(c, c);
        for (int a = 0; a < c; ++a)
            for (int v = 0; v < c; ++v) joint(a, v) = g[v] * report_given_g[i](v, a);
        Rational d = det_exact(std::move(joint));
        quality[i] = d * d;
        det_report_given_g[i] = det_exact(RatMat(report_given_g[i]));
        if (quality[i] > informative_tol) ++informative;
    }
    if (informative < 3)
        throw ParameterError("the proportionality check needs at least 3 informative agents, "
                             "found " + std::to_string(informative));

    const Rational a1a2(ordered_task_count(static_cast<long long>(split.t1().size()), c) *
                        ordered_task_count(static_cast<long long>(split.t2().size()), c));
    std::vector<std::vector<Rational>> pair_term(n, std::vector<Rational>(n, Rational(0)));
    std::vector<Rational> expected(n, Rational(0));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            RatMat u(c, c);
            for (int x = 0; x < c; ++x)
                for (int y = 0; y < c; ++y) {
                    Rational acc(0);
                    for (int v = 0; v < c; ++v) acc += g[v] * conf[i](v, x) * conf[j](v, y);
                    u(x, y) = acc;
                }
            RatMat reports = rat_pair_joint_under_strategies(u, strat[i], strat[j]);
            Rational d = det_exact(std::move(reports));
            pair_term[i][j] = pair_term[j][i] = a1a2 * d * d;
            expected[i] += pair_term[i][j];
            expected[j] += pair_term[i][j];
        }

    Theorem2Report report;
    report.expected_payment.reserve(n);
    report.quality.reserve(n);
    for (int i = 0; i < n; ++i) {
        report.expected_payment.push_back(to_d(expected[i]));
        report.quality.push_back(to_d(quality[i]));
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            Rational quality_gap = quality[i] - quality[j];
            Rational abs_gap = quality_gap < 0 ? Rational(-quality_gap) : quality_gap;
            if (abs_gap <= informative_tol) continue;
            Rational payment_gap = expected[i] - expected[j];
            Rational ratio = payment_gap / quality_gap;
            Rational constant(0);
            for (int k = 0; k < n; ++k)
                if (k != i && k != j)
                    constant += a1a2 * det_report_given_g[k] * det_report_given_g[k];
            Theorem2Entry entry{i + 1,           j + 1,       to_d(payment_gap),
                                to_d(quality_gap), to_d(ratio), to_d(constant)};
            report.pairs.push_back(entry);
            double denom = std::max(std::fabs(entry.constant), 1e-300);
            double mismatch = std::fabs(entry.ratio - entry.constant) / denom;
            if (mismatch > report.max_rel_mismatch) report.max_rel_mismatch = mismatch;
        }
    return report;
}

} // namespace dmim
