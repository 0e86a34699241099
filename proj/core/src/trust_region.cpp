#include "uqq/trust_region.hpp"

#include <cmath>
#include <stdexcept>

namespace uqq {

namespace {

// Regularized lower incomplete gamma P(a, x), series for x < a + 1 and
// continued fraction otherwise (Lentz).
double gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_p: bad arguments");
    if (x == 0.0) return 0.0;
    const double lg = std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a, sum = 1.0 / a, del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-16) break;
        }
        return sum * std::exp(-x + a * std::log(x) - lg);
    }
    double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return 1.0 - std::exp(-x + a * std::log(x) - lg) * h;
}

}  // namespace

double chi2_cdf(int dof, double x) {
    if (dof < 1) throw std::invalid_argument("chi2_cdf: dof must be >= 1");
    if (x <= 0.0) return 0.0;
    return gamma_p(0.5 * dof, 0.5 * x);
}

double chi2_quantile(int dof, double alpha) {
    if (dof < 1) throw std::invalid_argument("chi2_quantile: dof must be >= 1");
    if (alpha <= 0.0 || alpha >= 1.0)
        throw std::invalid_argument("chi2_quantile: alpha must be in (0, 1)");
    double lo = 0.0, hi = 1.0;
    while (chi2_cdf(dof, hi) < alpha) hi *= 2.0;
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        if (chi2_cdf(dof, mid) < alpha)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double TrustRegion::mahalanobis_sq(std::span<const double> theta) const {
    if (theta.size() != center.size())
        throw std::invalid_argument("TrustRegion: dimension mismatch");
    double s = 0.0;
    for (std::size_t j = 0; j < center.size(); ++j) {
        const double d = (theta[j] - center[j]) / sigma[j];
        s += d * d;
    }
    return s;
}

bool TrustRegion::contains(std::span<const double> theta, double tol) const {
    return mahalanobis_sq(theta) <= q + tol * std::max(1.0, q);
}

std::vector<double> TrustRegion::project(std::span<const double> theta) const {
    const double score = mahalanobis_sq(theta);
    std::vector<double> out(theta.begin(), theta.end());
    // the relative band keeps re-projection of a freshly projected point an
    // exact identity despite rounding in the rescale
    if (score <= q * (1.0 + 1e-12) || score == 0.0) return out;
    const double factor = std::sqrt(q / score);
    for (std::size_t j = 0; j < center.size(); ++j)
        out[j] = center[j] + factor * (out[j] - center[j]);
    return out;
}

std::vector<std::vector<double>> sample_truncated(const TrustRegion& tr, int count, Rng& rng,
                                                  long* attempts_out) {
    if (count < 1) throw std::invalid_argument("sample_truncated: count must be >= 1");
    const int d = tr.dim();
    // cap sized for confidence levels >= 0.68; generous in practice
    const long max_attempts = static_cast<long>(10.0 * count / 0.68) + 64;
    std::vector<std::vector<double>> out;
    out.reserve(count);
    long attempts = 0;
    std::vector<double> draw(d);
    while (static_cast<int>(out.size()) < count) {
        if (attempts >= max_attempts)
            throw std::runtime_error("sample_truncated: acceptance failure");
        ++attempts;
        for (int j = 0; j < d; ++j) draw[j] = tr.center[j] + tr.sigma[j] * rng.normal();
        if (tr.mahalanobis_sq(draw) <= tr.q) out.push_back(draw);
    }
    if (attempts_out) *attempts_out = attempts;
    return out;
}

std::vector<double> sample_uniform_in_region(const TrustRegion& tr, Rng& rng) {
    const int d = tr.dim();
    std::vector<double> dir(d);
    double norm = 0.0;
    do {
        norm = 0.0;
        for (int j = 0; j < d; ++j) {
            dir[j] = rng.normal();
            norm += dir[j] * dir[j];
        }
    } while (norm == 0.0);
    norm = std::sqrt(norm);
    const double radius = std::sqrt(tr.q) * std::pow(rng.uniform(), 1.0 / d);
    std::vector<double> out(d);
    for (int j = 0; j < d; ++j)
        out[j] = tr.center[j] + tr.sigma[j] * radius * dir[j] / norm;
    return out;
}

BudgetAllocation allocate_budget(double u, double u_med, double u_iqr, int t_base) {
    if (u_iqr <= 0.0) throw std::invalid_argument("allocate_budget: U_iqr must be positive");
    if (t_base < 1) throw std::invalid_argument("allocate_budget: T_base must be >= 1");
    BudgetAllocation b;
    b.z = (u - u_med) / u_iqr;
    const double sig = 1.0 / (1.0 + std::exp(-b.z));
    b.samples = static_cast<int>(std::floor(1.0 + 4.0 * sig));
    b.samples = std::min(5, std::max(1, b.samples));
    const double zp = std::max(b.z, 0.0);
    b.polish_iters = static_cast<int>(std::floor(t_base * (0.5 + zp)));
    b.polish_iters = std::min(2 * t_base, std::max(5, b.polish_iters));
    return b;
}

}  // namespace uqq
