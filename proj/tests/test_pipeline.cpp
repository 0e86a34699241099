#include <doctest.h>

#include <cmath>

#include "uqq/calibration.hpp"
#include "uqq/pipeline.hpp"

using namespace uqq;

namespace {

// model with controllable heads: zero weights, chosen head biases
GinModel biased_model(double mu_bias, double logvar_bias) {
    GinModel model = init_model(4, 2, 16, 2, 1);
    for (auto& tensor : model.params.values)
        for (double& v : tensor.a) v = 0.0;
    Mat& bmu = model.params.values[model.params.index_of("b_mu")];
    for (double& v : bmu.a) v = mu_bias;
    Mat& blv = model.params.values[model.params.index_of("b_lv")];
    for (double& v : blv.a) v = logvar_bias;
    model.u_med = std::exp(std::min(2.0, std::max(-5.0, logvar_bias)));
    model.u_iqr = 0.1;
    return model;
}

}  // namespace

TEST_CASE("collapsed region still polishes from the mean") {
    // logvar bias far below the clamp floor: sigma = e^{-5/2} everywhere
    const GinModel model = biased_model(0.2, -40.0);
    const Graph g = generate(GraphFamily::ER, 8, 71);
    InferOptions opts;
    opts.t_base = 10;
    const RunResult res = uq_qaoa_infer(g, model, opts, 123);

    const double f_mu = expectation(g, AngleVector({0.2, 0.2}, {0.2, 0.2}));
    CHECK(res.best_f >= f_mu - 1e-9);
    CHECK(res.evals >= res.budget_k);
    CHECK(res.method == "uq_qaoa");
    CHECK(res.evals == static_cast<long>(res.trace.size()));
}

TEST_CASE("every evaluated point stays inside the region") {
    const GinModel model = biased_model(0.3, -1.0);
    const Graph g = generate(GraphFamily::BA, 9, 73);
    InferOptions opts;
    opts.t_base = 20;
    const RunResult res = uq_qaoa_infer(g, model, opts, 321);

    const GaussianPrediction pred = predict(model, g);
    TrustRegion region;
    region.center = pred.mu;
    for (double v : pred.var) region.sigma.push_back(std::sqrt(v));
    region.q = chi2_quantile(4, opts.alpha);
    for (const auto& [theta, f] : res.trace) REQUIRE(region.contains(theta, 1e-9));
}

TEST_CASE("output dominates the seed samples") {
    const GinModel model = biased_model(0.4, -0.5);
    const Graph g = generate(GraphFamily::WS, 8, 79);
    InferOptions opts;
    const RunResult res = uq_qaoa_infer(g, model, opts, 555);
    // the first K trace entries are the seed evaluations
    double best_seed = -1e300;
    for (int i = 0; i < res.budget_k; ++i)
        best_seed = std::max(best_seed, res.trace[i].second);
    CHECK(res.best_f >= best_seed - 1e-12);
}

TEST_CASE("evals accounting: seeds plus polish within the simplex budget") {
    const GinModel model = biased_model(0.1, -1.5);
    const Graph g = generate(GraphFamily::ER, 8, 83);
    InferOptions opts;
    opts.t_base = 12;
    const RunResult res = uq_qaoa_infer(g, model, opts, 999);
    CHECK(res.evals >= res.budget_k);
    // simplex setup (dim + 1) plus at most ~2 evals per iteration plus shrinks
    const long cap = res.budget_k + 5 + 4L * res.budget_t + 8;
    CHECK(res.evals <= cap);
}

TEST_CASE("conformal radius widens or shrinks the region") {
    const GinModel model = biased_model(0.0, 0.0);
    const Graph g = generate(GraphFamily::ER, 8, 89);
    InferOptions opts;
    opts.conformal_q = 30.0;  // far wider than chi2_4(0.95) = 9.49
    const RunResult wide = uq_qaoa_infer(g, model, opts, 1);

    const GaussianPrediction pred = predict(model, g);
    TrustRegion region;
    region.center = pred.mu;
    for (double v : pred.var) region.sigma.push_back(std::sqrt(v));
    region.q = 30.0;
    for (const auto& [theta, f] : wide.trace) REQUIRE(region.contains(theta, 1e-9));
}

TEST_CASE("shot-mode runs accumulate measured bitstrings") {
    const GinModel model = biased_model(0.3, -1.0);
    const Graph g = generate(GraphFamily::REG3, 8, 97);
    InferOptions opts;
    opts.noise.shots = 64;
    const RunResult res = uq_qaoa_infer(g, model, opts, 31);
    CHECK(res.ratio > 0.0);
    CHECK(res.ratio <= 1.0);
}

TEST_CASE("modeled wall time scales with evaluations and size") {
    CHECK(modeled_wall_ms(100, 14, false) > modeled_wall_ms(50, 14, false));
    CHECK(modeled_wall_ms(100, 16, false) > modeled_wall_ms(100, 14, false));
    CHECK(modeled_wall_ms(100, 14, true) ==
          doctest::Approx(modeled_wall_ms(100, 14, false) + 1.2));
}
