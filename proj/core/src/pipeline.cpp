#include "uqq/pipeline.hpp"

#include <cmath>
#include <stdexcept>

#include "uqq/calibration.hpp"

namespace uqq {

double modeled_wall_ms(long evals, int n, bool uses_model) {
    const double per_eval = 9.4e-5 * std::pow(2.0, n);
    return evals * per_eval + (uses_model ? 1.2 : 0.0);
}

RunResult uq_qaoa_infer(const Graph& g, const GinModel& model, const InferOptions& opts,
                        std::uint64_t seed) {
    const GaussianPrediction pred = predict(model, g);
    if (pred.var.empty())
        throw std::invalid_argument("uq_qaoa_infer: model has no variance head");
    const int dim = static_cast<int>(pred.mu.size());

    const double u = scalar_uncertainty(pred);
    const BudgetAllocation budget = allocate_budget(u, model.u_med, model.u_iqr, opts.t_base);

    TrustRegion region;
    region.center = pred.mu;
    region.sigma.resize(dim);
    for (int j = 0; j < dim; ++j) region.sigma[j] = std::sqrt(pred.var[j]);
    region.q = opts.conformal_q ? *opts.conformal_q : chi2_quantile(dim, opts.alpha);

    MeteredObjective objective(g, opts.noise, derive_seed(seed, "run", g.seed));

    Rng sample_rng(derive_seed(seed, "seed-samples", g.seed));
    std::vector<std::vector<double>> candidates;
    if (opts.use_trust_region) {
        candidates = sample_truncated(region, budget.samples, sample_rng);
    } else {
        candidates.reserve(budget.samples);
        for (int s = 0; s < budget.samples; ++s) {
            std::vector<double> draw(dim);
            for (int j = 0; j < dim; ++j)
                draw[j] = region.center[j] + region.sigma[j] * sample_rng.normal();
            candidates.push_back(std::move(draw));
        }
    }

    // argmax over the seed evaluations; lowest index wins ties
    int best_idx = 0;
    double best_val = -1e300;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const double f = objective(candidates[i]);
        if (f > best_val) {
            best_val = f;
            best_idx = static_cast<int>(i);
        }
    }

    NelderMeadOptions nm = opts.nm;
    nm.max_iters = budget.polish_iters;
    nm.initial_steps.resize(dim);
    for (int j = 0; j < dim; ++j) nm.initial_steps[j] = 0.05 * region.sigma[j];

    Projector projector;
    if (opts.use_trust_region)
        projector = [&region](std::span<const double> x) { return region.project(x); };

    Objective fn = [&objective](std::span<const double> x) { return objective(x); };
    nelder_mead(fn, candidates[best_idx], nm, projector);

    RunResult result;
    result.method = "uq_qaoa";
    result.evals = objective.evals();
    result.best_f = objective.best_f();
    result.best_theta = objective.best_theta();
    result.ratio = objective.final_ratio(objective.best_theta(), opts.final_shots);
    result.trace = objective.trace();
    result.wall_ms = modeled_wall_ms(result.evals, g.n, true);
    result.uncertainty = u;
    result.z_score = budget.z;
    result.budget_k = budget.samples;
    result.budget_t = budget.polish_iters;
    return result;
}

}  // namespace uqq
