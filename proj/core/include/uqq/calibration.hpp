#pragma once

#include <span>
#include <string>
#include <vector>

#include "uqq/gin.hpp"

namespace uqq {

struct CalibrationConstants {
    double u_med = 0.0;
    double u_iqr = 0.0;
    std::vector<double> conformal_scores;  // sorted ascending
};

/// U(G) = tr(Sigma)/2p, the mean predicted variance.
double scalar_uncertainty(const GaussianPrediction& pred);

/// Mahalanobis score of a target under the prediction:
/// sum_j (t_j - mu_j)^2 / var_j.
double conformal_score(const GaussianPrediction& pred, std::span<const double> target);

/// Median / IQR of the scalar uncertainties (type-7 linearly interpolated
/// quartiles) plus the sorted conformal scores. Throws when the IQR
/// degenerates to zero.
CalibrationConstants fit_constants(const std::vector<GaussianPrediction>& preds,
                                   const std::vector<std::vector<double>>& targets);

/// k-th order statistic with k = ceil((M+1)(1-alpha)); throws when the
/// score set is too small for the requested level.
double conformal_quantile(const CalibrationConstants& constants, double alpha);
double conformal_quantile(std::span<const double> sorted_scores, double alpha);

/// Quantile-binned expected calibration error after min-max normalizing
/// both signals; degenerate (constant) signals map to 0.5.
double ece(std::span<const double> uncertainties, std::span<const double> errors, int bins = 10);

struct ReliabilityBin {
    double mean_predicted = 0.0;
    double mean_observed = 0.0;
    int count = 0;
};

std::vector<ReliabilityBin> reliability_bins(std::span<const double> uncertainties,
                                             std::span<const double> errors, int bins = 10);

/// Spearman rank correlation with mean ranks for ties.
double spearman_rho(std::span<const double> x, std::span<const double> y);

void write_calibration(const CalibrationConstants& constants, const std::string& path);
CalibrationConstants read_calibration(const std::string& path);

/// Linear-interpolation (type-7) quantile of a sorted vector.
double quantile_type7(std::span<const double> sorted_values, double prob);

}  // namespace uqq
