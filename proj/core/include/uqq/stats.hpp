#pragma once

#include <span>
#include <vector>

namespace uqq {

double mean(std::span<const double> x);
double sample_std(std::span<const double> x);  // unbiased (n-1)
double median(std::vector<double> x);          // by value, sorts a copy

struct WilcoxonResult {
    double statistic = 0.0;  // W+ (sum of positive ranks)
    double z = 0.0;
    double p_value = 0.0;    // two-sided, tie-corrected normal approximation
    double effect_size = 0.0;  // |z| / sqrt(n)
    int n_used = 0;            // pairs remaining after dropping zeros
};

/// Paired signed-rank test. Zero differences are dropped; ranks use mean
/// ranks for ties; variance is tie-corrected. Throws when no nonzero pairs
/// remain or fewer than 10 usable pairs exist (normal approximation only).
WilcoxonResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y);

double normal_cdf(double z);

}  // namespace uqq
