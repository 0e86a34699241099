#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "uqq/gin.hpp"
#include "uqq/nelder_mead.hpp"
#include "uqq/objective.hpp"
#include "uqq/trust_region.hpp"

namespace uqq {

/// One optimization run on one instance.
struct RunResult {
    std::string instance;
    std::string method;
    long evals = 0;
    double best_f = 0.0;
    double ratio = 0.0;
    double wall_ms = 0.0;
    std::vector<double> best_theta;
    std::vector<std::pair<std::vector<double>, double>> trace;

    // uncertainty-path diagnostics (zero for baselines)
    double uncertainty = 0.0;
    double z_score = 0.0;
    int budget_k = 0;
    int budget_t = 0;
};

struct InferOptions {
    int t_base = 30;
    double alpha = 0.95;
    /// when set, replaces the chi-squared radius with this conformal
    /// quantile
    std::optional<double> conformal_q;
    NoiseModel noise;
    int final_shots = 256;
    /// ablation switch: keep budgets but drop truncation and projection
    bool use_trust_region = true;
    NelderMeadOptions nm;  // tolerances shared across methods
};

/// Deterministic work model standing in for wall-clock time so result
/// files are byte-reproducible: per-evaluation cost scales with the
/// statevector size, learned predictors add a fixed forward-pass charge.
double modeled_wall_ms(long evals, int n, bool uses_model);

/// Full inference pipeline: predict, normalize uncertainty, allocate
/// budgets, build the region, seed with truncated samples, polish with
/// projected Nelder-Mead, measure.
RunResult uq_qaoa_infer(const Graph& g, const GinModel& model, const InferOptions& opts,
                        std::uint64_t seed);

}  // namespace uqq
