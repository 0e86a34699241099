// Command-line driver: dataset generation, target optimization, training,
// benchmark evaluation, calibration, bound instantiation, figure data and
// the sensitivity sweep.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <string>

#include "uqq/bounds.hpp"
#include "uqq/experiment.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int shots = 0;
    bool shots_set = false;
    double alpha = 0.0;
    bool alpha_set = false;
    bool conformal = false;
    int t_base = 0;
    bool t_base_set = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "flat key = value config file");
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--seed", args.seed, "master seed")->each([&](const std::string&) {
        args.seed_set = true;
    });
    cmd->add_option("--shots", args.shots, "finite shots per evaluation")
        ->each([&](const std::string&) { args.shots_set = true; });
    cmd->add_option("--alpha", args.alpha, "trust-region confidence level")
        ->each([&](const std::string&) { args.alpha_set = true; });
    cmd->add_flag("--conformal", args.conformal, "use the conformal quantile radius");
    cmd->add_option("--tbase", args.t_base, "base polish budget")
        ->each([&](const std::string&) { args.t_base_set = true; });
}

uqq::ExperimentConfig build_config(const CommonArgs& args) {
    uqq::ExperimentConfig cfg;
    if (!args.config_path.empty()) cfg = uqq::parse_config_file(args.config_path);
    if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
    if (args.seed_set) cfg.master_seed = args.seed;
    if (args.shots_set && args.shots > 0) cfg.shots = args.shots;
    if (args.alpha_set) cfg.alpha = args.alpha;
    if (args.conformal) cfg.conformal = true;
    if (args.t_base_set) cfg.t_base = args.t_base;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"graph-conditioned trust-region search for MaxCut QAOA"};
    app.require_subcommand(1);

    CommonArgs args;

    auto* generate = app.add_subcommand("generate", "write train/val/test graph files");
    add_common(generate, args);

    auto* targets = app.add_subcommand("targets", "optimize per-graph target angles");
    add_common(targets, args);

    auto* train = app.add_subcommand("train", "train predictor + point baseline per seed");
    add_common(train, args);

    auto* evaluate = app.add_subcommand("evaluate", "run the benchmark suites");
    std::string suite = "main";
    evaluate->add_option("--suite", suite, "main | crosssize | shots | ablation | lofo");
    add_common(evaluate, args);

    auto* calibrate = app.add_subcommand("calibrate", "refit calibration constants");
    std::uint64_t calib_seed = 0;
    bool calib_seed_set = false;
    calibrate->add_option("--model-seed", calib_seed, "training seed of the checkpoint")
        ->each([&](const std::string&) { calib_seed_set = true; });
    add_common(calibrate, args);

    auto* bounds = app.add_subcommand("bounds", "plug-in bound table");
    uqq::BoundInputs bi;
    bounds->add_option("--m", bi.m, "edge count");
    bounds->add_option("--p", bi.p, "circuit depth");
    bounds->add_option("--bound-alpha", bi.alpha, "confidence level");
    bounds->add_option("--sigma", bi.sigma, "isotropic per-axis std");
    bounds->add_option("--rstar", bi.r_star, "objective quality at the mean");
    bounds->add_option("--eps", bi.epsilon, "per-layer depolarizing strength");
    bounds->add_option("--K", bi.best_of_k, "best-of-K sample count");
    add_common(bounds, args);

    auto* report = app.add_subcommand("report", "emit plot-ready figure data");
    add_common(report, args);

    auto* sensitivity = app.add_subcommand("sensitivity", "loss-weight sensitivity sweep");
    add_common(sensitivity, args);

    auto* pipeline = app.add_subcommand("pipeline", "generate -> targets -> train -> evaluate");
    add_common(pipeline, args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed()) {
            const auto cfg = build_config(args);
            const auto files = uqq::stage_generate(cfg);
            std::printf("wrote %s\n", files.train.c_str());
            std::printf("wrote %s\n", files.val.c_str());
            for (const auto& [n, path] : files.test) std::printf("wrote %s\n", path.c_str());
        } else if (targets->parsed()) {
            const auto cfg = build_config(args);
            uqq::stage_targets(cfg);
            std::printf("targets written for train/val splits in %s\n", cfg.out_dir.c_str());
        } else if (train->parsed()) {
            const auto cfg = build_config(args);
            uqq::stage_train(cfg);
            std::printf("trained %zu seed(s) into %s\n", cfg.seeds.size(),
                        cfg.out_dir.c_str());
        } else if (evaluate->parsed()) {
            const auto cfg = build_config(args);
            const auto rows = uqq::stage_evaluate(cfg, suite);
            const std::string path = cfg.out_dir + (suite == "main"
                                                        ? "/results.csv"
                                                        : "/results_" + suite + ".csv");
            uqq::write_results_csv(rows, path);
            if (suite == "main") uqq::write_summary_tables(rows, cfg, cfg.out_dir);
            std::printf("wrote %s (%zu rows)\n", path.c_str(), rows.size());
        } else if (calibrate->parsed()) {
            const auto cfg = build_config(args);
            const std::uint64_t seed = calib_seed_set ? calib_seed : cfg.seeds.at(0);
            uqq::stage_calibrate(cfg, seed);
            std::printf("calibration refit for seed %llu\n",
                        static_cast<unsigned long long>(seed));
        } else if (bounds->parsed()) {
            if (args.alpha_set) bi.alpha = args.alpha;
            const auto rows = uqq::bound_table(bi);
            std::printf("%-24s %14s  %s\n", "quantity", "value", "detail");
            for (const auto& row : rows)
                std::printf("%-24s %14.6g  %s\n", row.name.c_str(), row.value,
                            row.detail.c_str());
        } else if (report->parsed()) {
            const auto cfg = build_config(args);
            uqq::stage_report(cfg);
            std::printf("figure data written to %s/figures\n", cfg.out_dir.c_str());
        } else if (sensitivity->parsed()) {
            const auto cfg = build_config(args);
            uqq::stage_sensitivity(cfg);
            std::printf("wrote %s/sensitivity.csv\n", cfg.out_dir.c_str());
        } else if (pipeline->parsed()) {
            const auto cfg = build_config(args);
            uqq::run_full_pipeline(cfg);
            std::printf("pipeline complete: %s/results.csv\n", cfg.out_dir.c_str());
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
