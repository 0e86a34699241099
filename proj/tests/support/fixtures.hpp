#pragma once

#include <vector>

#include "support/grad_check.hpp"
#include "uqq/graph.hpp"
#include "uqq/losses.hpp"
#include "uqq/spectral.hpp"

namespace uqq::testing {

/// Small random batch (graphs, features, targets, loss constants) for the
/// gradient checks and loss tests.
inline LossBatch make_batch(int count, int n, int k, int p, std::uint64_t seed) {
    LossBatch batch;
    Rng rng(seed);
    std::vector<std::vector<double>> target_rows;
    batch.targets = Mat(count, 2 * p);
    for (int i = 0; i < count; ++i) {
        const GraphFamily family =
            static_cast<GraphFamily>(rng.uniform_int(4));
        const Graph g = generate(family == GraphFamily::REG3 && n % 2 ? GraphFamily::ER
                                                                      : family,
                                 n, derive_seed(seed, "batch-graph", i));
        batch.features.push_back(feature_matrix(g, spectral_encoding(g, k, 0)));
        batch.a_hats.push_back(normalized_adjacency(g));
        std::vector<double> target(2 * p);
        for (double& v : target) v = rng.uniform(-1.0, 1.0);
        target_rows.push_back(target);
        for (int j = 0; j < 2 * p; ++j) batch.targets(i, j) = target[j];
    }
    batch.w2_weights = pairwise_target_weights(target_rows, 0.5);
    batch.positives = positive_sets(target_rows, median_pairwise_distance(target_rows));
    return batch;
}

}  // namespace uqq::testing
