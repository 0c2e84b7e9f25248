#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dmim/errors.hpp"
#include "dmim/files.hpp"
#include "dmim/info.hpp"
#include "dmim/linalg.hpp"
#include "dmim/mechanism.hpp"
#include "dmim/rng.hpp"
#include "dmim/sim.hpp"

namespace {

using namespace dmim;

std::string join_doubles(const std::vector<double>& v) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += fmt_g12(v[i]);
    }
    return out;
}

std::string join_ints(const std::vector<int>& v, int offset = 0) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += std::to_string(v[i] + offset);
    }
    return out;
}

std::string join_longs(const std::vector<long long>& v) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += std::to_string(v[i]);
    }
    return out;
}

std::string join_bigints(const std::vector<BigInt>& v) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += v[i].str();
    }
    return out;
}

std::string split_json(const TaskSplit& split) {
    // Task ids are one-based on the boundary.
    std::string out = "{\"t1\": [" + join_ints(split.t1(), 1) + "], \"t2\": [" +
                      join_ints(split.t2(), 1) + "]}";
    return out;
}

TaskSplit split_from_spec(const std::string& spec, int tasks, int choices) {
    if (spec == "half") return default_split(tasks, choices);
    std::vector<int> first;
    size_t pos = 0;
    while (pos <= spec.size()) {
        size_t comma = spec.find(',', pos);
        if (comma == std::string::npos) comma = spec.size();
        std::string field = spec.substr(pos, comma - pos);
        if (field.empty())
            throw ValidationError("split spec: empty task id in '" + spec + "'");
        try {
            first.push_back(std::stoi(field) - 1);
        } catch (const std::exception&) {
            throw ValidationError("split spec: '" + field + "' is not a task id");
        }
        pos = comma + 1;
        if (comma == spec.size()) break;
    }
    return {tasks, std::move(first)};
}

int run_pay(const std::string& reports_path, int choices, const std::string& split_spec,
            const std::string& out_path) {
    ReportMatrix reports = parse_reports_csv(reports_path, choices);
    ExperimentParams params(reports.agents(), reports.tasks(), reports.choices());
    TaskSplit split = split_from_spec(split_spec, params.tasks, params.choices);
    PaymentResult pay = payments(reports, split);
    std::vector<int> ranking = rank_agents(pay);

    std::string doc;
    doc += "{\n";
    doc += "  \"agents\": " + std::to_string(params.agents) + ",\n";
    doc += "  \"tasks\": " + std::to_string(params.tasks) + ",\n";
    doc += "  \"choices\": " + std::to_string(params.choices) + ",\n";
    doc += "  \"split\": " + split_json(split) + ",\n";
    doc += "  \"raw\": [" + join_bigints(pay.raw) + "],\n";
    doc += "  \"denominator\": " + pay.denominator.str() + ",\n";
    doc += "  \"normalized\": [" + join_doubles(pay.normalized) + "],\n";
    doc += "  \"ranking\": [" + join_ints(ranking) + "]\n";
    doc += "}\n";
    write_output(doc, out_path);
    return 0;
}

int run_simulate(const std::string& config_path, bool seed_given, std::uint64_t seed_override,
                 const std::string& out_path) {
    TrialConfig cfg = parse_sim_config(config_path);
    if (seed_given) cfg.master_seed = seed_override;

    TrialStats stats = monte_carlo(cfg);

    std::string doc;
    doc += "{\n";
    doc += "  \"agents\": " + std::to_string(cfg.world.agents()) + ",\n";
    doc += "  \"choices\": " + std::to_string(cfg.world.choices()) + ",\n";
    doc += "  \"tasks\": " + std::to_string(cfg.split.tasks()) + ",\n";
    doc += "  \"trials\": " + std::to_string(cfg.trials) + ",\n";
    doc += "  \"seed\": " + std::to_string(cfg.master_seed) + ",\n";
    doc += "  \"split\": " + split_json(cfg.split) + ",\n";
    doc += "  \"expected_normalized\": [" + join_doubles(stats.expected_normalized) + "],\n";
    doc += "  \"mean_normalized\": [" + join_doubles(stats.mean_normalized) + "],\n";
    doc += "  \"variance_normalized\": [" + join_doubles(stats.variance_normalized) + "],\n";
    doc += "  \"mean_raw\": [" + join_doubles(stats.mean_raw) + "],\n";
    if (cfg.trials == 1) {
        // A single round is a payment computation; echo the exact values.
        ReportMatrix reports = sample_reports(cfg.world, cfg.strategies, cfg.split.tasks(),
                                              trial_seed(cfg.master_seed, 0));
        PaymentResult pay = payments(reports, cfg.split);
        doc += "  \"raw\": [" + join_bigints(pay.raw) + "],\n";
    }
    doc += "  \"deviations\": [";
    for (size_t a = 0; a < stats.alpha_thresholds.size(); ++a) {
        if (a) doc += ", ";
        doc += "{\"alpha\": " + fmt_g12(stats.alpha_thresholds[a]) + ", \"counts\": [" +
               join_longs(stats.deviation_counts[a]) + "]}";
    }
    doc += "],\n";
    doc += "  \"pairs\": [";
    int pair = 0;
    for (int i = 0; i < cfg.world.agents(); ++i)
        for (int j = i + 1; j < cfg.world.agents(); ++j, ++pair) {
            if (pair) doc += ", ";
            doc += "{\"agents\": [" + std::to_string(i + 1) + ", " + std::to_string(j + 1) +
                   "], \"det1_scaled_mean\": " + fmt_g12(stats.det1_scaled_mean[pair]) +
                   ", \"det1_scaled_variance\": " +
                   fmt_g12(stats.det1_scaled_variance[pair]) + "}";
        }
    doc += "]\n";
    doc += "}\n";
    write_output(doc, out_path);
    return 0;
}

int run_dmi(const std::string& joint_path, const std::string& out_path) {
    RealMat m = parse_matrix_file(joint_path);
    JointDistribution joint(m.rows(), std::move(m));
    double value = dmi(joint);
    bool informative = is_informative_pair(joint);

    std::string doc;
    doc += "{\n";
    doc += "  \"choices\": " + std::to_string(joint.choices()) + ",\n";
    doc += "  \"dmi\": " + fmt_g12(value) + ",\n";
    doc += "  \"informative\": " + std::string(informative ? "true" : "false") + "\n";
    doc += "}\n";
    write_output(doc, out_path);
    return 0;
}

int run_bound(double alpha, double delta, int choices, bool kappa_given, double kappa,
              int agents, bool per_given, double per_u, const std::string& out_path) {
    if (kappa_given == per_given)
        throw ParameterError("pass exactly one of --kappa (with --agents) or --per");

    std::string doc;
    doc += "{\n";
    doc += "  \"alpha\": " + fmt_g12(alpha) + ",\n";
    doc += "  \"delta\": " + fmt_g12(delta) + ",\n";
    doc += "  \"choices\": " + std::to_string(choices) + ",\n";
    double value = 0.0;
    if (kappa_given) {
        value = task_bound_g(alpha, delta, choices, kappa, agents);
        doc += "  \"bound\": \"g\",\n";
        doc += "  \"kappa\": " + fmt_g12(kappa) + ",\n";
        doc += "  \"agents\": " + std::to_string(agents) + ",\n";
    } else {
        value = task_bound_h(alpha, delta, choices, per_u);
        doc += "  \"bound\": \"h\",\n";
        doc += "  \"per\": " + fmt_g12(per_u) + ",\n";
    }
    doc += "  \"value\": " + fmt_g12(value) + ",\n";
    doc += "  \"min_tasks\": " + fmt_g12(std::ceil(value)) + "\n";
    doc += "}\n";
    write_output(doc, out_path);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Determinant-based peer prediction: payments, simulation, bounds"};
    app.require_subcommand(1);

    std::string reports_path, config_path, joint_path, out_path;
    std::string split_spec = "half";
    int choices = 0, agents = 0;
    double alpha = 0.0, delta = 0.0, kappa = 0.0, per_u = 0.0;
    std::uint64_t seed_override = 0;

    CLI::App* pay = app.add_subcommand("pay", "Score a reports file");
    pay->add_option("--reports", reports_path, "CSV file: agent,task,answer")->required();
    pay->add_option("--choices", choices, "Number of answer choices C")->required();
    pay->add_option("--split", split_spec,
                    "'half' or comma-separated one-based task ids of the first block");
    pay->add_option("--out", out_path, "Write the document here instead of stdout");

    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo mechanism rounds");
    simulate->add_option("--config", config_path, "JSON simulation config")->required();
    CLI::Option* seed_opt =
        simulate->add_option("--seed", seed_override, "Override the config seed");
    simulate->add_option("--out", out_path, "Write the document here instead of stdout");

    CLI::App* dmi_cmd = app.add_subcommand("dmi", "Determinant mutual information of a joint");
    dmi_cmd->add_option("joint", joint_path, "JSON file holding a square probability matrix")
        ->required();
    dmi_cmd->add_option("--out", out_path, "Write the document here instead of stdout");

    CLI::App* bound = app.add_subcommand("bound", "Sufficient task-count bounds");
    bound->add_option("--alpha", alpha, "Deviation threshold")->required();
    bound->add_option("--delta", delta, "Failure probability")->required();
    bound->add_option("--choices", choices, "Number of answer choices C")->required();
    CLI::Option* kappa_opt =
        bound->add_option("--kappa", kappa, "Worst-case pair permanent over all pairs");
    bound->add_option("--agents", agents, "Agent count n (with --kappa)");
    CLI::Option* per_opt = bound->add_option("--per", per_u, "Single pair's permanent");
    bound->add_option("--out", out_path, "Write the document here instead of stdout");

    try {
        app.parse(argc, argv);
        if (pay->parsed()) return run_pay(reports_path, choices, split_spec, out_path);
        if (simulate->parsed())
            return run_simulate(config_path, seed_opt->count() > 0, seed_override, out_path);
        if (dmi_cmd->parsed()) return run_dmi(joint_path, out_path);
        if (bound->parsed())
            return run_bound(alpha, delta, choices, kappa_opt->count() > 0, kappa, agents,
                             per_opt->count() > 0, per_u, out_path);
        return 2;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const ParameterError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
