// shedad — district-heating substation anomaly detection.
//
// Subcommands:
//   simulate   generate a synthetic network CSV plus ground truth
//   run        full detection pipeline on a meter CSV
//   eval       confusion metrics of a report against ground truth
//   metrics    cluster-quality scores for one or more labelings
//
// Exit codes: 0 success, 1 usage error, 2 data/config error, 3 internal error.

#include <cstdio>
#include <exception>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <shedad/shedad.hpp>

namespace {

struct CommonArgs {
    std::string config_file;
    std::vector<std::string> overrides;  // --set key=value
    std::string input;
    std::string out_dir;
    long long seed = -1;  // -1: keep config value
    int workers = -1;
    shedad::CmdOptions opts;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_input) {
    cmd->add_option("-c,--config", args.config_file, "config file (key = value lines)");
    cmd->add_option("--set", args.overrides, "override a config key (key=value, repeatable)");
    if (with_input) cmd->add_option("-i,--input", args.input, "input meter CSV");
    cmd->add_option("-o,--out", args.out_dir, "output directory");
    cmd->add_option("--seed", args.seed, "random seed");
    cmd->add_option("--workers", args.workers, "worker threads (0 = all cores)");
    cmd->add_flag("--force", args.opts.force, "overwrite existing outputs");
}

// Precedence: config file < --set overrides < dedicated flags.
shedad::RunConfig build_config(const CommonArgs& args) {
    shedad::RunConfig cfg;
    if (!args.config_file.empty()) cfg = shedad::load_run_config(args.config_file, cfg);
    for (const auto& kv : args.overrides) {
        auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw shedad::DataError("--set expects key=value, got '" + kv + "'");
        std::string key = kv.substr(0, eq);
        std::string value = kv.substr(eq + 1);
        while (!key.empty() && key.back() == ' ') key.pop_back();
        while (!value.empty() && value.front() == ' ') value.erase(value.begin());
        shedad::apply_config_entry(cfg, key, value);
    }
    if (!args.input.empty()) cfg.input = args.input;
    if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
    if (args.seed >= 0) cfg.seed = static_cast<std::uint64_t>(args.seed);
    if (args.workers >= 0) cfg.workers = args.workers;
    return cfg;
}

shedad::Logger stderr_logger() {
    return [](const std::string& msg) { std::fprintf(stderr, "[shedad] %s\n", msg.c_str()); };
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SHEDAD: similarity-graph anomaly detection for district-heating substations"};
    app.require_subcommand(1);

    CommonArgs sim_args, run_args, metrics_args;

    auto* sim = app.add_subcommand("simulate", "generate a synthetic network CSV");
    add_common(sim, sim_args, false);
    std::string faults_file;
    sim->add_option("--faults", faults_file, "fault list JSON (overrides built-in assignment)");

    auto* run = app.add_subcommand("run", "run the detection pipeline");
    add_common(run, run_args, true);
    run->add_flag("--debug-dump", run_args.opts.debug_dump,
                  "write intermediate matrices and graphs under <out>/debug/");

    auto* eval = app.add_subcommand("eval", "score a report against ground truth");
    std::string eval_report, eval_truth, eval_out;
    bool eval_force = false;
    eval->add_option("--report", eval_report, "report.json from 'run'")->required();
    eval->add_option("--truth", eval_truth, "ground_truth.json from 'simulate'")->required();
    eval->add_option("-o,--out", eval_out, "write JSON here instead of stdout");
    eval->add_flag("--force", eval_force, "overwrite existing output");

    auto* metrics = app.add_subcommand("metrics", "cluster-quality scores for labelings");
    add_common(metrics, metrics_args, true);
    std::vector<std::string> labeling_specs;
    std::string metrics_out = "metrics_long.csv";
    metrics->add_option("--labels", labeling_specs,
                        "labeling as method=assignment.csv (repeatable)")
        ->required();
    metrics->add_option("--out-csv", metrics_out, "output CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (sim->parsed()) {
            shedad::RunConfig cfg = build_config(sim_args);
            if (!faults_file.empty()) cfg.faults_file = faults_file;
            shedad::cmd_simulate(cfg, sim_args.opts, stderr_logger());
        } else if (run->parsed()) {
            shedad::RunConfig cfg = build_config(run_args);
            shedad::cmd_run(cfg, run_args.opts, stderr_logger());
        } else if (eval->parsed()) {
            nlohmann::json result = shedad::cmd_eval(eval_report, eval_truth, eval_out, eval_force);
            if (eval_out.empty()) std::cout << result.dump(2) << "\n";
        } else if (metrics->parsed()) {
            shedad::RunConfig cfg = build_config(metrics_args);
            std::vector<shedad::LabelingInput> labelings;
            for (const auto& spec : labeling_specs) {
                auto eq = spec.find('=');
                if (eq == std::string::npos)
                    throw shedad::DataError("--labels expects method=path, got '" + spec + "'");
                labelings.push_back({spec.substr(0, eq), spec.substr(eq + 1)});
            }
            shedad::cmd_metrics(cfg, labelings, metrics_out, metrics_args.opts, stderr_logger());
        }
    } catch (const shedad::DataError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 3;
    }
    return 0;
}
