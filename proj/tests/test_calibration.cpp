#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "uqq/calibration.hpp"
#include "uqq/rng.hpp"

using namespace uqq;

namespace {

GaussianPrediction pred_with_u(double u) {
    GaussianPrediction p;
    p.mu = {0.0, 0.0, 0.0, 0.0};
    p.var = {u, u, u, u};
    return p;
}

}  // namespace

TEST_CASE("scalar uncertainty is the mean variance") {
    CHECK(scalar_uncertainty(pred_with_u(1.0)) == doctest::Approx(1.0));
    const double e2 = std::exp(2.0);
    CHECK(scalar_uncertainty(pred_with_u(e2)) == doctest::Approx(e2));

    GaussianPrediction mixed;
    mixed.mu = {0, 0, 0, 0};
    mixed.var = {1.0, 2.0, 3.0, 4.0};
    CHECK(scalar_uncertainty(mixed) == doctest::Approx(2.5));

    // invariant under coordinate permutation
    GaussianPrediction perm = mixed;
    std::reverse(perm.var.begin(), perm.var.end());
    CHECK(scalar_uncertainty(perm) == scalar_uncertainty(mixed));
}

TEST_CASE("fit_constants uses type-7 quartiles") {
    std::vector<GaussianPrediction> preds{pred_with_u(1), pred_with_u(2), pred_with_u(3),
                                          pred_with_u(4)};
    std::vector<std::vector<double>> targets(4, {0.1, 0.1, 0.1, 0.1});
    const CalibrationConstants c = fit_constants(preds, targets);
    CHECK(c.u_med == doctest::Approx(2.5));
    CHECK(c.u_iqr == doctest::Approx(1.5));
    CHECK(std::is_sorted(c.conformal_scores.begin(), c.conformal_scores.end()));
}

TEST_CASE("degenerate IQR is an error") {
    std::vector<GaussianPrediction> preds(4, pred_with_u(2.0));
    std::vector<std::vector<double>> targets(4, {0.0, 0.0, 0.0, 0.0});
    CHECK_THROWS(fit_constants(preds, targets));
}

TEST_CASE("conformal scores are order-invariant") {
    Rng rng(3);
    std::vector<GaussianPrediction> preds;
    std::vector<std::vector<double>> targets;
    for (int i = 0; i < 12; ++i) {
        GaussianPrediction p;
        for (int j = 0; j < 4; ++j) {
            p.mu.push_back(rng.uniform(-1, 1));
            p.var.push_back(rng.uniform(0.1, 1.0));
        }
        preds.push_back(p);
        targets.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1),
                           rng.uniform(-1, 1)});
    }
    const auto a = fit_constants(preds, targets);
    std::reverse(preds.begin(), preds.end());
    std::reverse(targets.begin(), targets.end());
    const auto b = fit_constants(preds, targets);
    CHECK(a.conformal_scores == b.conformal_scores);
}

TEST_CASE("conformal quantile is the k-th order statistic") {
    std::vector<double> scores{1, 2, 3, 4, 5, 6, 7, 8, 9};
    // alpha = 0.1: k = ceil(10 * 0.9) = 9 -> the largest score
    CHECK(conformal_quantile(scores, 0.1) == doctest::Approx(9.0));

    std::vector<double> eighty(80);
    for (int i = 0; i < 80; ++i) eighty[i] = i + 1;
    // M = 80: k = ceil(81 * 0.9) = 73
    CHECK(conformal_quantile(eighty, 0.10) == doctest::Approx(73.0));

    // monotone nondecreasing in 1 - alpha
    double prev = 0.0;
    for (double alpha : {0.5, 0.3, 0.2, 0.1, 0.05}) {
        const double q = conformal_quantile(eighty, alpha);
        CHECK(q >= prev);
        prev = q;
    }

    // M too small for the level
    std::vector<double> few{1.0, 2.0};
    CHECK_THROWS(conformal_quantile(few, 0.1));  // k = ceil(3 * 0.9) = 3 > 2
}

TEST_CASE("ece reference behaviors") {
    const int n = 1000;
    std::vector<double> pred(n), obs(n);
    for (int i = 0; i < n; ++i) pred[i] = static_cast<double>(i) / (n - 1);

    SUBCASE("perfect calibration gives zero") {
        CHECK(ece(pred, pred, 10) == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("anti-calibrated uniform signal exceeds 0.4") {
        for (int i = 0; i < n; ++i) obs[i] = 1.0 - pred[i];
        CHECK(ece(pred, obs, 10) > 0.4);
    }
    SUBCASE("constant predictions reduce to the mean gap") {
        std::fill(pred.begin(), pred.end(), 0.7);
        for (int i = 0; i < n; ++i) obs[i] = static_cast<double>(i) / (n - 1);
        // constant signal normalizes to 0.5 everywhere
        CHECK(ece(pred, obs, 10) == doctest::Approx(std::abs(0.5 - 0.5)).epsilon(1e-9));
    }
}

TEST_CASE("reliability deciles have exactly the requested bins") {
    Rng rng(9);
    std::vector<double> u(200), e(200);
    for (int i = 0; i < 200; ++i) {
        u[i] = rng.uniform();
        e[i] = rng.uniform();
    }
    const auto bins = reliability_bins(u, e, 10);
    REQUIRE(bins.size() == 10);
    int total = 0;
    for (const auto& bin : bins) total += bin.count;
    CHECK(total == 200);
}

TEST_CASE("spearman correlation") {
    std::vector<double> x{1, 2, 3, 4, 5};
    std::vector<double> inc{2, 4, 6, 8, 10};
    CHECK(spearman_rho(x, inc) == doctest::Approx(1.0));
    std::vector<double> dec{5, 4, 3, 2, 1};
    CHECK(spearman_rho(x, dec) == doctest::Approx(-1.0));

    // ties: brute-force rank-then-Pearson oracle
    std::vector<double> xt{1.0, 2.0, 2.0, 3.0, 5.0, 5.0, 5.0};
    std::vector<double> yt{0.3, 0.1, 0.4, 0.4, 0.9, 0.2, 0.9};
    // oracle ranks (mean rank for ties)
    auto rank = [](const std::vector<double>& v) {
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            double less = 0.0, equal = 0.0;
            for (std::size_t j = 0; j < v.size(); ++j) {
                if (v[j] < v[i]) ++less;
                if (v[j] == v[i]) ++equal;
            }
            r[i] = less + 0.5 * (equal + 1.0);
        }
        return r;
    };
    const auto rx = rank(xt), ry = rank(yt);
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= rx.size();
    my /= ry.size();
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    const double oracle = sxy / std::sqrt(sxx * syy);
    CHECK(spearman_rho(xt, yt) == doctest::Approx(oracle).epsilon(1e-12));

    CHECK_THROWS(spearman_rho(std::vector<double>{1, 2}, std::vector<double>{1, 2}));
}

TEST_CASE("calibration file round-trip") {
    CalibrationConstants c;
    c.u_med = 1.25;
    c.u_iqr = 0.375;
    c.conformal_scores = {0.5, 1.75, 2.25, 9.0};
    const std::string path = "test_calib.txt";
    write_calibration(c, path);
    const CalibrationConstants d = read_calibration(path);
    CHECK(d.u_med == c.u_med);
    CHECK(d.u_iqr == c.u_iqr);
    CHECK(d.conformal_scores == c.conformal_scores);
    std::filesystem::remove(path);
}
