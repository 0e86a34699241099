#pragma once

#include <string>
#include <vector>

namespace uqq {

/// Inputs for the plug-in bound table. sigma is the isotropic per-axis
/// standard deviation proxy; the generalization constants follow the
/// spectral-norm Rademacher bound.
struct BoundInputs {
    int m = 21;
    int p = 2;
    double alpha = 0.95;
    double sigma = 0.15;
    double r_star = 0.851;
    double epsilon = 0.01;
    int best_of_k = 3;
    // generalization constants
    double b_x = 2.1;
    double spectral_norm = 1.5;  // per-layer, assumed equal
    int layers = 3;
    int width = 64;
    double loss_bound = 8.1;
    int n_train = 240;
    double delta = 0.05;
};

struct BoundRow {
    std::string name;
    double value = 0.0;
    std::string detail;  // printable form, e.g. ">= 0.851 C_max - 38.81"
};

/// Global Lipschitz bound 2 m sqrt(2p).
double lipschitz_bound(int m, int p);

/// L_G sqrt(chi^2_{2p}(alpha) sigma_max^2): worst-case objective drop over
/// the region.
double landscape_slack(int m, int p, double alpha, double sigma_max);

/// L_G sqrt(tr Sigma) / sqrt(K) for isotropic sigma.
double best_of_k_gap(int m, int p, double sigma, int k);

/// Ellipsoid-to-hypercube volume ratio at confidence alpha, isotropic
/// sigma, against [-pi, pi]^(2p).
double volume_ratio(int p, double alpha, double sigma);

/// Spectral-norm complexity + concentration terms of the generalization
/// bound: 2 B_x (prod s_l) sqrt(2 L log(2 d)) / sqrt(N)
/// + 3 M sqrt(log(2/delta) / (2N)).
double generalization_gap(const BoundInputs& in);

std::vector<BoundRow> bound_table(const BoundInputs& in);

}  // namespace uqq
