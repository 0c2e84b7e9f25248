#include "dmim/info.hpp"

#include <cmath>
#include <utility>

#include "dmim/errors.hpp"

namespace dmim {

namespace {

void check_square_prob_matrix(const RealMat& m, const char* what) {
    if (!m.is_square())
        throw ValidationError(std::string(what) + " matrix must be square, got " +
                              std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    if (m.rows() < 2)
        throw ValidationError(std::string(what) + " needs at least 2 choices, got " +
                              std::to_string(m.rows()));
    for (double v : m.flat()) {
        if (!std::isfinite(v))
            throw ValidationError(std::string(what) + " has a non-finite entry");
        if (v < 0.0)
            throw ValidationError(std::string(what) + " has a negative entry");
    }
}

} // namespace

JointDistribution::JointDistribution(int choices, RealMat p)
    : choices_(choices), p_(std::move(p)) {
    check_square_prob_matrix(p_, "joint distribution");
    if (p_.rows() != choices_)
        throw ValidationError("joint distribution size disagrees with choice count");
    double total = 0.0;
    for (double v : p_.flat()) total += v;
    if (std::fabs(total - 1.0) > kProbTol)
        throw ValidationError("joint distribution entries sum to " + std::to_string(total) +
                              ", expected 1");
}

JointDistribution::JointDistribution(std::initializer_list<std::initializer_list<double>> rows)
    : JointDistribution(static_cast<int>(rows.size()), RealMat(rows)) {}

TransitionMatrix::TransitionMatrix(int choices, RealMat k)
    : choices_(choices), k_(std::move(k)) {
    check_square_prob_matrix(k_, "transition matrix");
    if (k_.rows() != choices_)
        throw ValidationError("transition matrix size disagrees with choice count");
    for (int x = 0; x < choices_; ++x) {
        double row = 0.0;
        for (int xp = 0; xp < choices_; ++xp) {
            if (k_(x, xp) > 1.0 + kProbTol)
                throw ValidationError("transition matrix entry exceeds 1");
            row += k_(x, xp);
        }
        if (std::fabs(row - 1.0) > kProbTol)
            throw ValidationError("transition matrix row " + std::to_string(x) + " sums to " +
                                  std::to_string(row) + ", expected 1");
    }
}

TransitionMatrix::TransitionMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : TransitionMatrix(static_cast<int>(rows.size()), RealMat(rows)) {}

TransitionMatrix TransitionMatrix::identity(int choices) {
    return {choices, RealMat::identity(choices)};
}

TransitionMatrix TransitionMatrix::uniform(int choices) {
    if (choices < 2) throw ValidationError("transition matrix needs at least 2 choices");
    return {choices, RealMat(choices, choices, 1.0 / choices)};
}

TransitionMatrix compose(const TransitionMatrix& first, const TransitionMatrix& then) {
    if (first.choices() != then.choices())
        throw ValidationError("cannot compose transition matrices of different sizes");
    return {first.choices(), mat_mul(first.k(), then.k())};
}

Marginal::Marginal(int choices, std::vector<double> q) : choices_(choices), q_(std::move(q)) {
    if (choices_ < 2) throw ValidationError("marginal needs at least 2 choices");
    if (static_cast<int>(q_.size()) != choices_)
        throw ValidationError("marginal length disagrees with choice count");
    double total = 0.0;
    for (double v : q_) {
        if (!std::isfinite(v)) throw ValidationError("marginal has a non-finite entry");
        if (v < 0.0) throw ValidationError("marginal has a negative entry");
        total += v;
    }
    if (std::fabs(total - 1.0) > kProbTol)
        throw ValidationError("marginal entries sum to " + std::to_string(total) + ", expected 1");
}

double dmi(const JointDistribution& j) {
    const int c = j.choices();
    RatMat exact(c, c);
    for (int x = 0; x < c; ++x)
        for (int y = 0; y < c; ++y) exact(x, y) = Rational(j(x, y));
    Rational d = det_exact(std::move(exact));
    if (d < 0) d = -d;
    return d.convert_to<double>();
}

JointDistribution garble(const JointDistribution& j, const TransitionMatrix& k) {
    if (j.choices() != k.choices())
        throw ValidationError("garbling size disagrees with joint distribution");
    const int c = j.choices();
    RealMat out(c, c, 0.0);
    for (int xp = 0; xp < c; ++xp)
        for (int y = 0; y < c; ++y) {
            double s = 0.0;
            for (int x = 0; x < c; ++x) s += k(x, xp) * j(x, y);
            out(xp, y) = s;
        }
    return {c, std::move(out)};
}

JointDistribution pair_joint_under_strategies(const JointDistribution& j,
                                              const TransitionMatrix& s_row,
                                              const TransitionMatrix& s_col) {
    if (j.choices() != s_row.choices() || j.choices() != s_col.choices())
        throw ValidationError("strategy size disagrees with joint distribution");
    const int c = j.choices();
    RealMat out(c, c, 0.0);
    for (int a = 0; a < c; ++a)
        for (int b = 0; b < c; ++b) {
            double s = 0.0;
            for (int x = 0; x < c; ++x)
                for (int y = 0; y < c; ++y) s += s_row(x, a) * s_col(y, b) * j(x, y);
            out(a, b) = s;
        }
    return {c, std::move(out)};
}

bool is_informative_pair(const JointDistribution& j, double tol) {
    return dmi(j) > tol;
}

} // namespace dmim
