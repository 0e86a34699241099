#pragma once

#include <vector>

#include "uqq/autodiff.hpp"

namespace uqq {

/// (1/N) sum_i ||mu_i - target_i||^2 over the batch.
Tape::Id loss_mse(Tape& tape, Tape::Id mu, const Mat& targets);

/// Heteroscedastic Gaussian negative log-likelihood, averaged over the
/// batch: (1/N) sum_i sum_j [(mu_ij - t_ij)^2 / var_ij + logvar_ij].
Tape::Id loss_nll(Tape& tape, Tape::Id mu, Tape::Id logvar, const Mat& targets);

/// Pairwise 2-Wasserstein regularizer for diagonal Gaussians,
/// (1/N^2) sum_{i != j} w_ij (||mu_i - mu_j||^2 + ||s_i - s_j||^2) with
/// s = exp(logvar / 2) and constant similarity weights w.
Tape::Id loss_w2(Tape& tape, Tape::Id mu, Tape::Id logvar, const Mat& weights);

/// Supervised contrastive loss over L2-normalized embeddings with cosine
/// similarity and temperature tau. positives[i] lists the positive set of
/// anchor i; anchors with an empty set are skipped (contribute zero while
/// the 1/N normalization keeps the full batch size).
Tape::Id loss_contrastive(Tape& tape, Tape::Id embeddings,
                          const std::vector<std::vector<int>>& positives, double tau);

/// Similarity weights w_ij = exp(-||t_i - t_j||^2 / (2 tau_w^2)) used by
/// the Wasserstein regularizer; diagonal is zero.
Mat pairwise_target_weights(const std::vector<std::vector<double>>& targets, double tau_w);

/// Positive sets P(i) = { j != i : ||t_i - t_j|| < delta }.
std::vector<std::vector<int>> positive_sets(const std::vector<std::vector<double>>& targets,
                                            double delta);

/// Median pairwise distance between targets (the contrastive threshold).
double median_pairwise_distance(const std::vector<std::vector<double>>& targets);

}  // namespace uqq
