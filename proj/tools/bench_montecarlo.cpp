#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include "dmim/info.hpp"
#include "dmim/mechanism.hpp"
#include "dmim/sim.hpp"

namespace {

using namespace dmim;

double run_ms(const TrialConfig& cfg, bool reference, TrialStats& out) {
    auto start = std::chrono::steady_clock::now();
    out = reference ? monte_carlo_reference(cfg) : monte_carlo(cfg);
    auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(stop - start).count();
}

} // namespace

int main(int argc, char** argv) {
    long long trials = 20000;
    int tasks = 200;
    CLI::App app{"Timing: serial reference vs. parallel Monte Carlo"};
    app.add_option("--trials", trials, "Rounds per run");
    app.add_option("--tasks", tasks, "Tasks per round");
    CLI11_PARSE(app, argc, argv);

    GroundTruth world(Marginal(2, {0.5, 0.5}),
                      {TransitionMatrix{{0.9, 0.1}, {0.2, 0.8}},
                       TransitionMatrix{{0.85, 0.15}, {0.1, 0.9}},
                       TransitionMatrix{{0.7, 0.3}, {0.3, 0.7}}});
    TrialConfig cfg{WorldModel(std::move(world)),
                    truthful_profile(3, 2),
                    default_split(tasks, 2),
                    trials,
                    20260819u,
                    {0.25},
                    0};

    std::printf("agents=3 choices=2 tasks=%d trials=%lld\n", tasks, trials);

    TrialStats reference;
    double ref_ms = run_ms(cfg, true, reference);
    std::printf("%-22s %10.1f ms\n", "serial reference", ref_ms);

#ifdef _OPENMP
    int max_threads = omp_get_max_threads();
#else
    int max_threads = 1;
    std::printf("(built without OpenMP; parallel path falls back to the reference)\n");
#endif
    std::vector<int> counts;
    for (int t = 1; t <= max_threads; t *= 2) counts.push_back(t);
    if (counts.back() != max_threads) counts.push_back(max_threads);

    bool all_match = true;
    for (int t : counts) {
        TrialConfig run_cfg = cfg;
        run_cfg.threads = t;
        TrialStats stats;
        double ms = run_ms(run_cfg, false, stats);
        bool match = stats == reference;
        all_match = all_match && match;
        std::printf("parallel threads=%-5d %10.1f ms  speedup %5.2fx  match=%s\n", t, ms,
                    ref_ms / ms, match ? "yes" : "NO");
    }
    if (!all_match) {
        std::printf("MISMATCH: parallel stats differ from the serial reference\n");
        return 1;
    }
    return 0;
}
