#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uqq/gin.hpp"
#include "uqq/graph.hpp"

namespace uqq {

struct TrainingConfig {
    double lambda_w = 0.1;
    double lambda_c = 0.05;
    double tau_w = 0.5;
    double tau_c = 0.1;
    double lr = 1e-3;
    double weight_decay = 1e-5;
    int epochs = 300;  // split into two equal phases
    double grad_clip = 1.0;
    int patience = 50;
    std::uint64_t seed = 42;
    int k = 6;
    int hidden = 64;
    /// contrastive threshold; <= 0 means "median pairwise target distance"
    double contrastive_delta = 0.0;
    /// train the deterministic single-head baseline with the phase-1
    /// objective only
    bool point_model = false;
    /// set k = 0 semantics (degree feature only) by dropping the encoding
    bool spectral_pe = true;
};

struct TrainLogRow {
    int epoch = 0;
    int phase = 1;
    double train_loss = 0.0;
    double val_loss = 0.0;
    double lr = 0.0;
};

struct TrainResult {
    GinModel model;
    std::vector<TrainLogRow> log;
    double best_val_loss = 0.0;
    int best_epoch = -1;
};

struct TrainExample {
    Graph graph;
    std::vector<double> target;  // 2p flat angles
};

/// Two-phase full-batch Adam training. Phase 1 minimizes the mean-squared
/// mean error plus the contrastive term; phase 2 the NLL plus Wasserstein
/// and contrastive regularizers. Cosine-annealed learning rate restarting
/// at the phase boundary, global-norm gradient clipping, early stopping on
/// the phase-2 validation loss, best-validation weights returned (snapped
/// to the float32 checkpoint grid). Per-epoch random sign flips are applied
/// to the spectral encodings of the training set.
TrainResult train(const std::vector<TrainExample>& train_set,
                  const std::vector<TrainExample>& val_set, const TrainingConfig& config);

void write_training_log(const std::vector<TrainLogRow>& log, const std::string& path);

}  // namespace uqq
