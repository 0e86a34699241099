#include "uqq/baselines.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace uqq {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

RunResult refine_from_starts(const Graph& g, const std::vector<std::vector<double>>& starts,
                             int iters_per_start, const BaselineOptions& opts,
                             std::uint64_t seed, const std::string& method, bool uses_model) {
    if (starts.empty()) throw std::invalid_argument("refine_from_starts: no start points");
    MeteredObjective objective(g, opts.noise, derive_seed(seed, "run", g.seed));
    Objective fn = [&objective](std::span<const double> x) { return objective(x); };

    NelderMeadOptions nm = opts.nm;
    nm.max_iters = iters_per_start;
    for (const auto& start : starts) nelder_mead(fn, start, nm);

    RunResult result;
    result.method = method;
    result.evals = objective.evals();
    result.best_f = objective.best_f();
    result.best_theta = objective.best_theta();
    result.ratio = objective.final_ratio(objective.best_theta(), opts.final_shots);
    result.trace = objective.trace();
    result.wall_ms = modeled_wall_ms(result.evals, g.n, uses_model);
    return result;
}

RunResult random_restarts(const Graph& g, int p, int restarts, int iters,
                          const BaselineOptions& opts, std::uint64_t seed) {
    Rng rng(derive_seed(seed, "random-starts", g.seed));
    std::vector<std::vector<double>> starts(restarts, std::vector<double>(2 * p));
    for (auto& start : starts)
        for (double& v : start) v = rng.uniform(-kPi, kPi);
    return refine_from_starts(g, starts, iters, opts, seed, "random", false);
}

std::vector<double> median_target(const std::vector<std::vector<double>>& targets) {
    if (targets.empty()) throw std::invalid_argument("median_target: empty target set");
    const std::size_t dim = targets[0].size();
    std::vector<double> median(dim);
    std::vector<double> column(targets.size());
    for (std::size_t j = 0; j < dim; ++j) {
        for (std::size_t i = 0; i < targets.size(); ++i) column[i] = targets[i][j];
        std::sort(column.begin(), column.end());
        const std::size_t mid = column.size() / 2;
        median[j] = column.size() % 2 == 1 ? column[mid]
                                           : 0.5 * (column[mid - 1] + column[mid]);
    }
    return median;
}

RunResult concentration_heuristic(const Graph& g,
                                  const std::vector<std::vector<double>>& training_targets,
                                  int iters, const BaselineOptions& opts, std::uint64_t seed,
                                  double jitter) {
    const std::vector<double> center = median_target(training_targets);
    std::vector<double> jittered = center;
    for (double& v : jittered) v += jitter;
    return refine_from_starts(g, {center, jittered}, iters, opts, seed, "heuristic", false);
}

std::vector<double> knn_initial_angles(const Graph& g,
                                       const std::vector<HandcraftedFeatures>& train_features,
                                       const std::vector<std::vector<double>>& train_targets,
                                       int k) {
    const int n_train = static_cast<int>(train_features.size());
    if (k < 1 || k > n_train)
        throw std::invalid_argument("knn_initial_angles: k exceeds training set");
    if (train_targets.size() != train_features.size())
        throw std::invalid_argument("knn_initial_angles: features/targets mismatch");

    constexpr int kDim = 8;
    std::array<double, kDim> mean{}, stdev{};
    for (const auto& f : train_features)
        for (int j = 0; j < kDim; ++j) mean[j] += f.v[j] / n_train;
    for (const auto& f : train_features)
        for (int j = 0; j < kDim; ++j) {
            const double d = f.v[j] - mean[j];
            stdev[j] += d * d / n_train;
        }
    for (int j = 0; j < kDim; ++j) stdev[j] = std::sqrt(stdev[j]);

    const HandcraftedFeatures query = handcrafted(g);
    std::vector<std::pair<double, int>> dist(n_train);
    for (int i = 0; i < n_train; ++i) {
        double d2 = 0.0;
        for (int j = 0; j < kDim; ++j) {
            if (stdev[j] <= 0.0) continue;  // zero-variance feature dropped
            const double d = (train_features[i].v[j] - query.v[j]) / stdev[j];
            d2 += d * d;
        }
        dist[i] = {d2, i};
    }
    std::stable_sort(dist.begin(), dist.end());

    std::vector<double> start(train_targets[0].size(), 0.0);
    for (int t = 0; t < k; ++t) {
        const auto& target = train_targets[dist[t].second];
        for (std::size_t j = 0; j < start.size(); ++j) start[j] += target[j] / k;
    }
    return start;
}

RunResult knn_run(const Graph& g, const std::vector<HandcraftedFeatures>& train_features,
                  const std::vector<std::vector<double>>& train_targets, int k, int iters,
                  const BaselineOptions& opts, std::uint64_t seed) {
    const auto start = knn_initial_angles(g, train_features, train_targets, k);
    return refine_from_starts(g, {start}, iters, opts, seed, "knn", false);
}

std::vector<double> tqa_initial_angles(int p, double delta) {
    if (p < 1) throw std::invalid_argument("tqa_initial_angles: p must be >= 1");
    std::vector<double> flat(2 * p);
    for (int l = 1; l <= p; ++l) {
        flat[l - 1] = (static_cast<double>(l) / p) * delta;
        flat[p + l - 1] = (1.0 - static_cast<double>(l) / p) * delta;
    }
    return flat;
}

RunResult tqa_run(const Graph& g, int p, double delta, int iters, const BaselineOptions& opts,
                  std::uint64_t seed) {
    return refine_from_starts(g, {tqa_initial_angles(p, delta)}, iters, opts, seed, "tqa",
                              false);
}

RunResult gnn_point_run(const Graph& g, const GinModel& point_model, int iters,
                        const BaselineOptions& opts, std::uint64_t seed) {
    const GaussianPrediction pred = predict(point_model, g);
    RunResult result =
        refine_from_starts(g, {pred.mu}, iters, opts, seed, "gnn_point", true);
    return result;
}

}  // namespace uqq
