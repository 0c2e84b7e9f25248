// Acceptance gate: ten end-to-end checks, one PASS/FAIL line each.
// Exit status is the number of failed checks.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "dmim/errors.hpp"
#include "dmim/files.hpp"
#include "dmim/info.hpp"
#include "dmim/linalg.hpp"
#include "dmim/mechanism.hpp"
#include "dmim/rng.hpp"
#include "dmim/sim.hpp"
#include "helpers.hpp"

using namespace dmim;
using namespace dmim::testgen;
namespace fs = std::filesystem;

namespace {

int failures = 0;

template <typename F>
void criterion(int id, const char* label, double limit_s, F&& body) {
    auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    std::string note;
    try {
        ok = body();
    } catch (const std::exception& e) {
        note = std::string(" [threw: ") + e.what() + "]";
    }
    double dt =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (dt > limit_s) {
        ok = false;
        note += " [over the time limit]";
    }
    std::printf("%s  criterion %2d  %-52s  %6.2fs / %gs%s\n", ok ? "PASS" : "FAIL", id,
                label, dt, limit_s, note.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

WorldModel correlated_world() {
    return WorldModel(FullJoint(2, 2, {0.4, 0.1, 0.1, 0.4}));
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::string s((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return s;
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: %s <path-to-cli>\n", argv[0]);
        return 2;
    }
    const std::string cli = argv[1];

    criterion(1, "fixture report set pays 24 raw to both agents", 1.0, [] {
        std::vector<int> entries{1, 1, 2, 2, 2, 1, 1, 2, 2, 2, 2,
                                 2, 2, 1, 1, 1, 2, 2, 1, 1, 2, 2};
        ReportMatrix r(2, 11, 2, std::move(entries));
        TaskSplit split = default_split(11, 2);
        bool ok = det_int(answer_matrix(r, 0, 1, split.t1())) == BigInt(-6);
        ok = ok && det_int(answer_matrix(r, 0, 1, split.t2())) == BigInt(-4);
        PaymentResult p = payments(r, split);
        ok = ok && p.raw == std::vector<BigInt>{BigInt(24), BigInt(24)};
        ok = ok && p.denominator == BigInt(600);
        ok = ok && p.normalized[0] == 0.04 && p.normalized[1] == 0.04;
        return ok;
    });

    criterion(2, "enumeration equals the analytic value exactly", 30.0, [] {
        Rng rng(55002);
        TaskSplit split = default_split(4, 2);
        const Rational a1a2(4);
        for (int iter = 0; iter < 20; ++iter) {
            RatWorld w(RatFullJoint(2, 2, random_rat_joint(rng, 2).flat()));
            RatMat s0 = random_rat_stochastic(rng, 2);
            RatMat s1 = random_rat_stochastic(rng, 2);
            RatMat u = rat_pairwise_signal_joint(w, 0, 1);
            RatMat pushed(2, 2, Rational(0));
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) {
                    Rational acc(0);
                    for (int x = 0; x < 2; ++x)
                        for (int y = 0; y < 2; ++y) acc += s0(x, a) * s1(y, b) * u(x, y);
                    pushed(a, b) = acc;
                }
            Rational d = det_exact(std::move(pushed));
            Rational want = a1a2 * d * d;
            std::vector<Rational> got =
                enumerate_expected_payment(w, RatStrategyProfile({s0, s1}), split);
            if (got[0] != want || got[1] != want) return false;
        }
        return true;
    });

    criterion(3, "truthful expected payments stay in range", 10.0, [] {
        Rng rng(55003);
        for (int iter = 0; iter < 1000; ++iter) {
            int c = 2 + iter % 3;
            int n = 2 + static_cast<int>(rng.next_u64() % 2);
            WorldModel w = (rng.next_u64() % 2 == 0)
                               ? random_full_joint_world(rng, n, c)
                               : random_ground_truth_world(rng, n, c);
            TaskSplit split = default_split(2 * c + static_cast<int>(rng.next_u64() % 4), c);
            std::vector<double> q =
                expected_normalized_payment(w, truthful_profile(n, c), split);
            double cap = std::pow(1.0 / c, c) + 1e-12;
            for (double v : q)
                if (!(v >= 0.0 && v <= cap)) return false;
        }
        return true;
    });

    criterion(4, "truthful reporting dominates", 30.0, [] {
        Rng rng(55004);
        int strict_checked = 0;
        for (int iter = 0; iter < 1000; ++iter) {
            int c = (rng.next_u64() % 2 == 0) ? 2 : 3;
            TaskSplit split = default_split(2 * c + static_cast<int>(rng.next_u64() % 3), c);
            WorldModel w = random_full_joint_world(rng, 2, c);
            bool peer_truthful = rng.next_u64() % 2 == 0;
            TransitionMatrix opp =
                peer_truthful ? TransitionMatrix::identity(c) : random_transition(rng, c);
            TransitionMatrix dev = random_transition(rng, c);
            double e_truth = expected_payment_exact(
                w, StrategyProfile({TransitionMatrix::identity(c), opp}), split)[0];
            double e_dev =
                expected_payment_exact(w, StrategyProfile({dev, opp}), split)[0];
            if (!(e_truth >= e_dev - 1e-12)) return false;
            if (peer_truthful && dmi(pairwise_signal_joint(w, 0, 1)) > 1e-3 &&
                std::fabs(det_real(dev.k())) < 1.0 - 1e-3) {
                if (!(e_truth - e_dev > 1e-9)) return false;
                ++strict_checked;
            }
        }
        return strict_checked > 100;
    });

    criterion(5, "dmi symmetry, range, scaling, monotonicity", 30.0, [] {
        Rng rng(55005);
        int strict_checked = 0;
        for (int iter = 0; iter < 10000; ++iter) {
            int c = 2 + iter % 5;
            JointDistribution j = random_joint(rng, c);
            double before = dmi(j);
            if (dmi(j.transposed()) != before) return false;
            if (!(before >= 0.0 && before <= std::pow(1.0 / c, c) + 1e-12)) return false;
            TransitionMatrix k = random_transition(rng, c);
            double after = dmi(garble(j, k));
            double detk = std::fabs(det_real(k.k()));
            if (std::fabs(after - before * detk) > 1e-9) return false;
            if (!(after <= before + 1e-12)) return false;
            if (before > 1e-6 && !k.is_permutation() && detk < 1.0 - 1e-6) {
                if (!(before - after > 1e-9)) return false;
                ++strict_checked;
            }
        }
        return strict_checked > 1000;
    });

    criterion(6, "stochastic determinants peak at permutations", 10.0, [] {
        Rng rng(55006);
        for (int iter = 0; iter < 10000; ++iter) {
            int c = 2 + iter % 5;
            if (std::fabs(det_real(random_stochastic_matrix(rng, c))) > 1.0 + 1e-12)
                return false;
        }
        for (int c = 2; c <= 4; ++c) {
            std::vector<int> perm(c);
            for (int i = 0; i < c; ++i) perm[i] = i;
            do {
                RealMat p(c, c, 0.0);
                for (int i = 0; i < c; ++i) p(i, perm[i]) = 1.0;
                if (std::fabs(det_real(p)) != 1.0) return false;
                for (double eps : {0.01, 0.1}) {
                    RealMat q(c, c);
                    for (int i = 0; i < c; ++i)
                        for (int j = 0; j < c; ++j)
                            q(i, j) = (1.0 - eps) * p(i, j) + eps / c;
                    if (!(std::fabs(det_real(q)) < 1.0 - eps / 2.0)) return false;
                }
            } while (std::next_permutation(perm.begin(), perm.end()));
        }
        return true;
    });

    criterion(7, "payment gaps proportional to quality gaps", 30.0, [] {
        Rng rng(55007);
        for (int iter = 0; iter < 100; ++iter) {
            int n = 3 + iter % 3;
            int c = 2 + static_cast<int>(rng.next_u64() % 2);
            bool truthful = rng.next_u64() % 2 == 0;
            for (int attempt = 0;; ++attempt) {
                if (attempt >= 200) return false;
                WorldModel w = informative_ground_truth_world(rng, n, c);
                StrategyProfile s =
                    truthful ? truthful_profile(n, c) : informative_profile(rng, n, c);
                int informative = 0;
                for (int i = 0; i < n; ++i)
                    if (quality_score(w, s, i) > 1e-8) ++informative;
                if (informative < 3) continue;
                Theorem2Report report =
                    theorem2_check(w, s, default_split(2 * c + 1, c));
                if (report.pairs.empty()) return false;
                if (report.max_rel_mismatch > 1e-9) return false;
                break;
            }
        }
        return true;
    });

    criterion(8, "trial mean and spread match the analysis", 60.0, [] {
        TrialConfig cfg{correlated_world(), truthful_profile(2, 2), default_split(4, 2),
                        100000,             909090,                 {},
                        0};
        TrialStats stats = monte_carlo(cfg);
        double n = static_cast<double>(stats.trials);
        // denominator (n-1)*a1*a2 = 4, so SE of the raw mean is 4x the
        // normalized one
        double se_raw = 4.0 * std::sqrt(stats.variance_normalized[0] / n);
        bool ok = std::fabs(stats.mean_raw[0] - 0.09) <= 4.0 * se_raw;
        double cap = variance_bound(2, 2, 0.17) * 1.05;
        ok = ok && stats.det1_scaled_variance[0] <= cap;
        return ok;
    });

    criterion(9, "task-count bound keeps deviations below delta", 300.0, [] {
        double h = task_bound_h(0.5, 0.5, 2, 1.0);
        bool ok = std::fabs(h - 1147.98601381502328) <= 1e-3;
        ok = ok && h <= 1200.0;
        TrialConfig cfg{correlated_world(), truthful_profile(2, 2),
                        default_split(1200, 2),
                        10000,              55009,
                        {0.5},              0};
        TrialStats stats = monte_carlo(cfg);
        for (long long bad : stats.deviation_counts[0])
            ok = ok && static_cast<double>(bad) / static_cast<double>(stats.trials) <= 0.5;
        return ok;
    });

    criterion(10, "CLI simulation output is byte-stable", 60.0, [&cli] {
        fs::create_directories("scratch_acceptance");
        fs::path cfg = "scratch_acceptance/sim.json";
        {
            std::ofstream out(cfg, std::ios::binary | std::ios::trunc);
            out << R"({"world": {"type": "full_joint", "agents": 2, "choices": 2,
                        "table": [0.4, 0.1, 0.1, 0.4]},
                       "strategies": "truthful", "T": 4, "split": "half",
                       "trials": 2000, "seed": 424242,
                       "alpha_thresholds": [0.1]})";
        }
        auto run = [&](int threads, const char* out_name) -> std::string {
            fs::path out = fs::path("scratch_acceptance") / out_name;
            std::string cmd = "OMP_NUM_THREADS=" + std::to_string(threads) + " \"" + cli +
                              "\" simulate --config \"" + cfg.string() + "\" --out \"" +
                              out.string() + "\"";
            if (std::system(cmd.c_str()) != 0) return "";
            return slurp(out);
        };
        std::string first = run(1, "t1a.json");
        std::string again = run(1, "t1b.json");
        std::string wide = run(4, "t4.json");
        return !first.empty() && first == again && first == wide;
    });

    return failures;
}
