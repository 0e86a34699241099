#include "uqq/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace uqq {

double scalar_uncertainty(const GaussianPrediction& pred) {
    if (pred.var.empty()) throw std::invalid_argument("scalar_uncertainty: no variance head");
    double s = 0.0;
    for (double v : pred.var) s += v;
    return s / static_cast<double>(pred.var.size());
}

double conformal_score(const GaussianPrediction& pred, std::span<const double> target) {
    if (target.size() != pred.mu.size())
        throw std::invalid_argument("conformal_score: dimension mismatch");
    double s = 0.0;
    for (std::size_t j = 0; j < target.size(); ++j) {
        const double d = target[j] - pred.mu[j];
        s += d * d / pred.var[j];
    }
    return s;
}

double quantile_type7(std::span<const double> sorted_values, double prob) {
    const std::size_t n = sorted_values.size();
    if (n == 0) throw std::invalid_argument("quantile_type7: empty input");
    if (n == 1) return sorted_values[0];
    const double h = prob * (static_cast<double>(n) - 1.0);
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, n - 1);
    const double frac = h - static_cast<double>(lo);
    return sorted_values[lo] + frac * (sorted_values[hi] - sorted_values[lo]);
}

CalibrationConstants fit_constants(const std::vector<GaussianPrediction>& preds,
                                   const std::vector<std::vector<double>>& targets) {
    if (preds.size() < 2) throw std::invalid_argument("fit_constants: need >= 2 items");
    if (preds.size() != targets.size())
        throw std::invalid_argument("fit_constants: predictions/targets mismatch");

    std::vector<double> us(preds.size());
    for (std::size_t i = 0; i < preds.size(); ++i) us[i] = scalar_uncertainty(preds[i]);
    std::sort(us.begin(), us.end());

    CalibrationConstants out;
    out.u_med = quantile_type7(us, 0.5);
    out.u_iqr = quantile_type7(us, 0.75) - quantile_type7(us, 0.25);
    if (out.u_iqr <= 0.0)
        throw std::runtime_error("fit_constants: degenerate uncertainty IQR");

    out.conformal_scores.resize(preds.size());
    for (std::size_t i = 0; i < preds.size(); ++i)
        out.conformal_scores[i] = conformal_score(preds[i], targets[i]);
    std::sort(out.conformal_scores.begin(), out.conformal_scores.end());
    return out;
}

double conformal_quantile(std::span<const double> sorted_scores, double alpha) {
    const long m = static_cast<long>(sorted_scores.size());
    if (m < 1) throw std::invalid_argument("conformal_quantile: empty score set");
    if (alpha <= 0.0 || alpha >= 1.0)
        throw std::invalid_argument("conformal_quantile: alpha must be in (0, 1)");
    const long k = static_cast<long>(std::ceil((m + 1) * (1.0 - alpha) - 1e-12));
    if (k > m)
        throw std::invalid_argument("conformal_quantile: too few scores for requested alpha");
    return sorted_scores[k - 1];
}

double conformal_quantile(const CalibrationConstants& constants, double alpha) {
    return conformal_quantile(std::span<const double>(constants.conformal_scores), alpha);
}

namespace {

std::vector<double> min_max_normalize(std::span<const double> x) {
    auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
    const double lo = *lo_it, hi = *hi_it;
    std::vector<double> out(x.size());
    if (hi - lo <= 0.0) {
        std::fill(out.begin(), out.end(), 0.5);
        return out;
    }
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - lo) / (hi - lo);
    return out;
}

}  // namespace

std::vector<ReliabilityBin> reliability_bins(std::span<const double> uncertainties,
                                             std::span<const double> errors, int bins) {
    if (uncertainties.size() != errors.size() || uncertainties.empty())
        throw std::invalid_argument("reliability_bins: bad inputs");
    if (bins < 2) throw std::invalid_argument("reliability_bins: bins must be >= 2");

    const auto u = min_max_normalize(uncertainties);
    const auto e = min_max_normalize(errors);
    const std::size_t n = u.size();

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return u[a] < u[b]; });

    // tie-aware decile bins: equal predicted values never straddle a bin
    // boundary, so a constant signal forms a single effective level
    std::vector<ReliabilityBin> out(bins);
    std::size_t idx = 0;
    for (int b = 0; b < bins && idx < n; ++b) {
        const std::size_t nominal_end = n * static_cast<std::size_t>(b + 1) / bins;
        std::size_t end = std::max(nominal_end, idx + 1);
        while (end < n && u[order[end]] == u[order[end - 1]]) ++end;
        if (b == bins - 1) end = n;
        for (; idx < end; ++idx) {
            out[b].mean_predicted += u[order[idx]];
            out[b].mean_observed += e[order[idx]];
            ++out[b].count;
        }
        if (out[b].count > 0) {
            out[b].mean_predicted /= out[b].count;
            out[b].mean_observed /= out[b].count;
        }
    }
    return out;
}

double ece(std::span<const double> uncertainties, std::span<const double> errors, int bins) {
    const auto rel = reliability_bins(uncertainties, errors, bins);
    const double n = static_cast<double>(uncertainties.size());
    double total = 0.0;
    for (const auto& bin : rel)
        total += (bin.count / n) * std::abs(bin.mean_predicted - bin.mean_observed);
    return total;
}

namespace {

std::vector<double> ranks_with_ties(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
        const double mean_rank = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = mean_rank;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

double spearman_rho(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 3)
        throw std::invalid_argument("spearman_rho: need >= 3 paired values");
    const auto rx = ranks_with_ties(x);
    const auto ry = ranks_with_ties(y);
    const std::size_t n = rx.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0)
        throw std::invalid_argument("spearman_rho: constant input");
    return sxy / std::sqrt(sxx * syy);
}

void write_calibration(const CalibrationConstants& constants, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_calibration: cannot open " + path);
    char buf[96];
    std::snprintf(buf, sizeof(buf), "u_med %.17g\n", constants.u_med);
    out << buf;
    std::snprintf(buf, sizeof(buf), "u_iqr %.17g\n", constants.u_iqr);
    out << buf;
    out << "scores " << constants.conformal_scores.size() << "\n";
    for (double s : constants.conformal_scores) {
        std::snprintf(buf, sizeof(buf), "%.17g\n", s);
        out << buf;
    }
}

CalibrationConstants read_calibration(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_calibration: cannot open " + path);
    CalibrationConstants out;
    std::string key;
    std::size_t count = 0;
    if (!(in >> key >> out.u_med) || key != "u_med")
        throw std::runtime_error("read_calibration: bad format");
    if (!(in >> key >> out.u_iqr) || key != "u_iqr")
        throw std::runtime_error("read_calibration: bad format");
    if (!(in >> key >> count) || key != "scores")
        throw std::runtime_error("read_calibration: bad format");
    out.conformal_scores.resize(count);
    for (auto& s : out.conformal_scores)
        if (!(in >> s)) throw std::runtime_error("read_calibration: truncated scores");
    return out;
}

}  // namespace uqq
