#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "uqq/baselines.hpp"
#include "uqq/calibration.hpp"
#include "uqq/dataset.hpp"
#include "uqq/pipeline.hpp"
#include "uqq/train.hpp"

namespace uqq {

struct ExperimentConfig {
    // dataset
    std::vector<int> sizes{8, 10, 12, 14, 16};
    int train_n = 14;
    int train_per_family = 60;
    int val_per_family = 20;
    int test_per_family = 12;
    // run parameters
    int t_base = 30;
    double alpha = 0.95;
    bool conformal = false;
    std::optional<int> shots;
    double epsilon = 0.0;
    std::vector<std::uint64_t> seeds{42, 123, 456, 789, 1024};
    std::vector<std::string> methods{"random", "heuristic", "knn",
                                     "tqa",    "gnn_point", "uq_qaoa"};
    std::string out_dir = "out";
    std::uint64_t master_seed = 42;
    // training
    int epochs = 300;
    int k = 6;
    int hidden = 64;
    double lambda_w = 0.1;
    double lambda_c = 0.05;
    double tau_w = 0.5;
    double tau_c = 0.1;
    // target generation
    int target_restarts = 8;
    int target_iters = 100;
    // baseline budgets (defaults land eval counts in the reference bands)
    int random_restarts_count = 4;
    int restart_iters = 60;
    int knn_k = 5;
    double tqa_delta = 0.75;
    double heuristic_jitter = 0.05;
    int p = 2;
};

/// Flat `key = value` config file; unknown keys are rejected.
ExperimentConfig parse_config_file(const std::string& path);
void apply_config_entry(ExperimentConfig& cfg, const std::string& key,
                        const std::string& value);

// --- pipeline stages (each is a CLI subcommand) ---

DatasetFiles stage_generate(const ExperimentConfig& cfg);
void stage_targets(const ExperimentConfig& cfg);

struct SeedArtifacts {
    std::string model_path;
    std::string point_path;
    std::string calibration_path;
};
SeedArtifacts seed_artifact_paths(const ExperimentConfig& cfg, std::uint64_t seed);

/// Trains the Gaussian predictor and the point baseline for one seed,
/// fits calibration constants on the validation split, embeds them in the
/// checkpoint and writes the calibration file + training logs.
SeedArtifacts stage_train_seed(const ExperimentConfig& cfg, std::uint64_t seed,
                               const TrainingConfig* overrides = nullptr);
void stage_train(const ExperimentConfig& cfg);

/// Recomputes calibration constants for an existing checkpoint.
void stage_calibrate(const ExperimentConfig& cfg, std::uint64_t seed);

struct EvalRow {
    std::string instance;
    std::string family;
    int n = 0;
    std::string method;
    std::uint64_t seed = 0;
    long evals = 0;
    double best_f = 0.0;
    double ratio = 0.0;
    double wall_ms = 0.0;
    // uq diagnostics
    double uncertainty = 0.0;
    double z_score = 0.0;
    int budget_k = 0;
    int budget_t = 0;
};

/// Shared per-seed context for method dispatch.
struct MethodContext {
    GinModel model;
    GinModel point_model;
    CalibrationConstants calibration;
    std::vector<std::vector<double>> train_targets;
    std::vector<HandcraftedFeatures> train_features;
};

MethodContext load_method_context(const ExperimentConfig& cfg, std::uint64_t seed);

EvalRow run_method(const std::string& method, const GraphRecord& record,
                   const MethodContext& ctx, const ExperimentConfig& cfg,
                   std::uint64_t train_seed);

/// suite: main | crosssize | lofo | ablation | shots
std::vector<EvalRow> stage_evaluate(const ExperimentConfig& cfg,
                                    const std::string& suite = "main");

void write_results_csv(const std::vector<EvalRow>& rows, const std::string& path);
std::vector<EvalRow> read_results_csv(const std::string& path);
void write_summary_tables(const std::vector<EvalRow>& rows, const ExperimentConfig& cfg,
                          const std::string& out_dir);

/// Plot-ready figure data derived from the results directory.
void stage_report(const ExperimentConfig& cfg);

/// Loss-weight sensitivity sweep (retrains per setting, evaluates the
/// uncertainty pipeline only).
void stage_sensitivity(const ExperimentConfig& cfg);

/// generate -> targets -> train -> evaluate(main) -> summaries, all under
/// the master seed. Used by the determinism check and the CLI.
void run_full_pipeline(const ExperimentConfig& cfg);

}  // namespace uqq
