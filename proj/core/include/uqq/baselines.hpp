#pragma once

#include <cstdint>
#include <vector>

#include "uqq/gin.hpp"
#include "uqq/pipeline.hpp"
#include "uqq/spectral.hpp"

namespace uqq {

/// Shared refinement: unconstrained Nelder-Mead runs from each start, all
/// metered through one objective; the final measurement happens at the
/// best angles across restarts.
struct BaselineOptions {
    NoiseModel noise;
    int final_shots = 256;
    NelderMeadOptions nm;
};

RunResult refine_from_starts(const Graph& g, const std::vector<std::vector<double>>& starts,
                             int iters_per_start, const BaselineOptions& opts,
                             std::uint64_t seed, const std::string& method, bool uses_model);

/// 4 independent restarts from Uniform[-pi, pi]^(2p).
RunResult random_restarts(const Graph& g, int p, int restarts, int iters,
                          const BaselineOptions& opts, std::uint64_t seed);

/// 2 restarts from the coordinatewise median of the training targets; the
/// second start is jittered by +0.05 per coordinate.
RunResult concentration_heuristic(const Graph& g,
                                  const std::vector<std::vector<double>>& training_targets,
                                  int iters, const BaselineOptions& opts, std::uint64_t seed,
                                  double jitter = 0.05);

std::vector<double> median_target(const std::vector<std::vector<double>>& targets);

/// k-NN over standardized handcrafted features (zero-variance dimensions
/// dropped from the metric); start = mean of the neighbors' targets.
std::vector<double> knn_initial_angles(const Graph& g,
                                       const std::vector<HandcraftedFeatures>& train_features,
                                       const std::vector<std::vector<double>>& train_targets,
                                       int k);
RunResult knn_run(const Graph& g, const std::vector<HandcraftedFeatures>& train_features,
                  const std::vector<std::vector<double>>& train_targets, int k, int iters,
                  const BaselineOptions& opts, std::uint64_t seed);

/// Trotterized-annealing linear ramp gamma_l = (l/p) delta,
/// beta_l = (1 - l/p) delta.
std::vector<double> tqa_initial_angles(int p, double delta = 0.75);
RunResult tqa_run(const Graph& g, int p, double delta, int iters, const BaselineOptions& opts,
                  std::uint64_t seed);

/// Deterministic point predictor: start at the model mean, fixed budget.
RunResult gnn_point_run(const Graph& g, const GinModel& point_model, int iters,
                        const BaselineOptions& opts, std::uint64_t seed);

}  // namespace uqq
