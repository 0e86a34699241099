#include "uqq/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace uqq {

double mean(std::span<const double> x) {
    if (x.empty()) throw std::invalid_argument("mean: empty input");
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

double sample_std(std::span<const double> x) {
    if (x.size() < 2) return 0.0;
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return std::sqrt(s / static_cast<double>(x.size() - 1));
}

double median(std::vector<double> x) {
    if (x.empty()) throw std::invalid_argument("median: empty input");
    std::sort(x.begin(), x.end());
    const std::size_t mid = x.size() / 2;
    return x.size() % 2 == 1 ? x[mid] : 0.5 * (x[mid - 1] + x[mid]);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

WilcoxonResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("wilcoxon: length mismatch");
    std::vector<double> diffs;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        if (d != 0.0) diffs.push_back(d);
    }
    const int n = static_cast<int>(diffs.size());
    if (n == 0) throw std::invalid_argument("wilcoxon: all differences are zero");
    if (n < 10)
        throw std::invalid_argument("wilcoxon: need >= 10 nonzero pairs for the normal "
                                    "approximation");

    std::vector<std::size_t> order(diffs.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(diffs[a]) < std::abs(diffs[b]);
    });

    std::vector<double> ranks(diffs.size());
    double tie_term = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() &&
               std::abs(diffs[order[j + 1]]) == std::abs(diffs[order[i]]))
            ++j;
        const double mean_rank = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
        const double t = static_cast<double>(j - i + 1);
        if (t > 1.0) tie_term += t * t * t - t;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mean_rank;
        i = j + 1;
    }

    double w_plus = 0.0;
    for (std::size_t k = 0; k < diffs.size(); ++k)
        if (diffs[k] > 0.0) w_plus += ranks[k];

    const double nn = static_cast<double>(n);
    const double mu = nn * (nn + 1.0) / 4.0;
    const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;

    WilcoxonResult result;
    result.statistic = w_plus;
    result.n_used = n;
    result.z = var > 0.0 ? (w_plus - mu) / std::sqrt(var) : 0.0;
    result.p_value = 2.0 * (1.0 - normal_cdf(std::abs(result.z)));
    result.effect_size = std::abs(result.z) / std::sqrt(nn);
    return result;
}

}  // namespace uqq
