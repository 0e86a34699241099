#pragma once

#include <span>
#include <vector>

#include "uqq/rng.hpp"

namespace uqq {

/// chi-squared CDF with dof degrees of freedom (regularized lower
/// incomplete gamma).
double chi2_cdf(int dof, double x);

/// alpha-quantile of the chi-squared distribution, inverted by bisection
/// to an interval of width 1e-10.
double chi2_quantile(int dof, double alpha);

/// Axis-aligned Mahalanobis ellipsoid
/// { theta : sum_j (theta_j - center_j)^2 / sigma_j^2 <= q }.
struct TrustRegion {
    std::vector<double> center;
    std::vector<double> sigma;  // per-axis scale (standard deviation)
    double q = 0.0;             // squared radius

    int dim() const { return static_cast<int>(center.size()); }
    double mahalanobis_sq(std::span<const double> theta) const;
    bool contains(std::span<const double> theta, double tol = 1e-9) const;

    /// Radial rescale back to the boundary for points outside; identity
    /// inside. Idempotent.
    std::vector<double> project(std::span<const double> theta) const;
};

/// Rejection sampling from N(center, diag sigma^2) restricted to the
/// region. Throws after 10 * count / alpha_floor draws without enough
/// acceptances. attempts_out (optional) reports the total proposals used.
std::vector<std::vector<double>> sample_truncated(const TrustRegion& tr, int count, Rng& rng,
                                                  long* attempts_out = nullptr);

/// Uniform draw inside the ellipsoid (radius-scaled sphere sampling);
/// used by landscape diagnostics and property tests.
std::vector<double> sample_uniform_in_region(const TrustRegion& tr, Rng& rng);

/// Per-instance sampling / polish budget derived from the normalized
/// uncertainty z-score:
///   K = clamp(floor(1 + 4 sigmoid(z)), 1, 5)
///   T = clamp(floor(T_base (0.5 + max(z, 0))), 5, 2 T_base)
struct BudgetAllocation {
    int samples = 1;       // K
    int polish_iters = 5;  // T
    double z = 0.0;
};

BudgetAllocation allocate_budget(double u, double u_med, double u_iqr, int t_base);

}  // namespace uqq
