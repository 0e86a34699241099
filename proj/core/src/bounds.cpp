#include "uqq/bounds.hpp"

#include <cmath>
#include <cstdio>

#include "uqq/qaoa.hpp"
#include "uqq/trust_region.hpp"

namespace uqq {

double lipschitz_bound(int m, int p) { return 2.0 * m * std::sqrt(2.0 * p); }

double landscape_slack(int m, int p, double alpha, double sigma_max) {
    const double q = chi2_quantile(2 * p, alpha);
    return lipschitz_bound(m, p) * std::sqrt(q * sigma_max * sigma_max);
}

double best_of_k_gap(int m, int p, double sigma, int k) {
    const double trace = 2.0 * p * sigma * sigma;
    return lipschitz_bound(m, p) * std::sqrt(trace) / std::sqrt(static_cast<double>(k));
}

double volume_ratio(int p, double alpha, double sigma) {
    const double q = chi2_quantile(2 * p, alpha);
    const double pi = 3.14159265358979323846;
    double gamma_p1 = 1.0;  // Gamma(p + 1) = p!
    for (int i = 2; i <= p; ++i) gamma_p1 *= i;
    return std::pow(pi, p) * std::pow(q, p) /
           (gamma_p1 * std::pow(2.0 * pi, 2.0 * p)) * std::pow(sigma, 2.0 * p);
}

double generalization_gap(const BoundInputs& in) {
    const double prod_s = std::pow(in.spectral_norm, in.layers);
    const double complexity = 2.0 * in.b_x * prod_s *
                              std::sqrt(2.0 * in.layers * std::log(2.0 * in.width)) /
                              std::sqrt(static_cast<double>(in.n_train));
    const double concentration =
        3.0 * in.loss_bound * std::sqrt(std::log(2.0 / in.delta) / (2.0 * in.n_train));
    return complexity + concentration;
}

std::vector<BoundRow> bound_table(const BoundInputs& in) {
    std::vector<BoundRow> rows;
    char buf[160];

    const double lg = lipschitz_bound(in.m, in.p);
    rows.push_back({"lipschitz", lg, ""});

    const double slack = landscape_slack(in.m, in.p, in.alpha, in.sigma);
    std::snprintf(buf, sizeof(buf), ">= %.3f C_max - %.2f", in.r_star, slack);
    rows.push_back({"landscape_lower_bound", slack, buf});

    const double gap = best_of_k_gap(in.m, in.p, in.sigma, in.best_of_k);
    std::snprintf(buf, sizeof(buf), "<= %.2f (K = %d)", gap, in.best_of_k);
    rows.push_back({"best_of_k_gap", gap, buf});

    const double vr = volume_ratio(in.p, in.alpha, in.sigma);
    std::snprintf(buf, sizeof(buf), "%.3e", vr);
    rows.push_back({"volume_ratio", vr, buf});

    const double nu = noise_strength(in.epsilon, in.p);
    const double coef = (1.0 - nu) * in.r_star;
    const double constant = (1.0 - nu) * slack - nu * 0.5 * in.m;
    std::snprintf(buf, sizeof(buf), ">= %.4f C_max - %.2f (eps = %g)", coef, constant,
                  in.epsilon);
    rows.push_back({"noisy_lower_bound", constant, buf});

    const double gen = generalization_gap(in);
    std::snprintf(buf, sizeof(buf), "<= empirical risk + %.2f", gen);
    rows.push_back({"generalization_gap", gen, buf});
    return rows;
}

}  // namespace uqq
