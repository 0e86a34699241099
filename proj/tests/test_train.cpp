#include <doctest.h>

#include <cmath>
#include <limits>

#include "uqq/train.hpp"
#include <stdexcept>
#include "uqq/rng.hpp"

using namespace uqq;

namespace {

std::vector<TrainExample> tiny_dataset(int count, std::uint64_t seed) {
    std::vector<TrainExample> out;
    Rng rng(seed);
    for (int i = 0; i < count; ++i) {
        TrainExample ex;
        ex.graph = generate(static_cast<GraphFamily>(i % 4) == GraphFamily::REG3
                                ? GraphFamily::ER
                                : static_cast<GraphFamily>(i % 4),
                            8, derive_seed(seed, "tiny", i));
        ex.target = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1),
                     rng.uniform(-1, 1)};
        out.push_back(std::move(ex));
    }
    return out;
}

double mu_mse(const GinModel& model, const std::vector<TrainExample>& set) {
    double total = 0.0;
    for (const auto& ex : set) {
        const GaussianPrediction pred = predict(model, ex.graph);
        for (std::size_t j = 0; j < ex.target.size(); ++j) {
            const double d = pred.mu[j] - ex.target[j];
            total += d * d;
        }
    }
    return total / static_cast<double>(set.size());
}

}  // namespace

TEST_CASE("a single graph is memorized") {
    const auto data = tiny_dataset(1, 31);
    TrainingConfig cfg;
    cfg.epochs = 1000;
    cfg.k = 4;
    cfg.hidden = 32;
    cfg.seed = 7;
    const TrainResult res = train(data, {}, cfg);
    CHECK(mu_mse(res.model, data) < 1e-3);
}

TEST_CASE("phase-2 training reduces the phase-2 loss") {
    const auto data = tiny_dataset(12, 41);
    const auto val = tiny_dataset(4, 43);
    TrainingConfig cfg;
    cfg.epochs = 120;
    cfg.k = 4;
    cfg.hidden = 16;
    cfg.seed = 3;
    const TrainResult res = train(data, val, cfg);

    double first_p2 = 0.0, last_p2 = 0.0;
    bool seen = false;
    for (const auto& row : res.log) {
        if (row.phase == 2) {
            if (!seen) {
                first_p2 = row.train_loss;
                seen = true;
            }
            last_p2 = row.train_loss;
        }
    }
    REQUIRE(seen);
    CHECK(last_p2 < first_p2);
}

TEST_CASE("training log structure and cosine schedule") {
    const auto data = tiny_dataset(6, 51);
    TrainingConfig cfg;
    cfg.epochs = 40;
    cfg.k = 4;
    cfg.hidden = 16;
    const TrainResult res = train(data, {}, cfg);
    REQUIRE(res.log.size() == 40);
    CHECK(res.log[0].phase == 1);
    CHECK(res.log[20].phase == 2);
    CHECK(res.log[0].lr == doctest::Approx(cfg.lr));
    CHECK(res.log[20].lr == doctest::Approx(cfg.lr));  // cosine restart at the boundary
    CHECK(res.log[19].lr < 0.1 * cfg.lr);
}

TEST_CASE("early stopping restores the best validation weights") {
    const auto data = tiny_dataset(10, 61);
    const auto val = tiny_dataset(4, 63);
    TrainingConfig cfg;
    cfg.epochs = 200;
    cfg.patience = 10;
    cfg.k = 4;
    cfg.hidden = 16;
    const TrainResult res = train(data, val, cfg);
    CHECK(res.best_epoch >= 0);
    CHECK(res.best_val_loss < std::numeric_limits<double>::max());
    // the returned model is float-snapped, so a reload is bit-identical
    const GaussianPrediction p = predict(res.model, data[0].graph);
    for (double v : p.var) CHECK(v > 0.0);
}

TEST_CASE("non-finite loss aborts with a diagnostic") {
    auto data = tiny_dataset(2, 71);
    data[0].target[0] = std::numeric_limits<double>::quiet_NaN();
    TrainingConfig cfg;
    cfg.epochs = 10;
    cfg.k = 4;
    cfg.hidden = 16;
    CHECK_THROWS_AS(train(data, {}, cfg), std::runtime_error);
}

TEST_CASE("point model trains with a single head") {
    const auto data = tiny_dataset(6, 81);
    TrainingConfig cfg;
    cfg.epochs = 60;
    cfg.k = 4;
    cfg.hidden = 16;
    cfg.point_model = true;
    const TrainResult res = train(data, {}, cfg);
    CHECK(res.model.heads == 1);
    const GaussianPrediction pred = predict(res.model, data[0].graph);
    CHECK(pred.var.empty());
}

TEST_CASE("spectral ablation trains a k = 0 model") {
    const auto data = tiny_dataset(6, 91);
    TrainingConfig cfg;
    cfg.epochs = 30;
    cfg.k = 6;
    cfg.hidden = 16;
    cfg.spectral_pe = false;
    const TrainResult res = train(data, {}, cfg);
    CHECK(res.model.k == 0);
    predict(res.model, data[0].graph);  // inference path must agree on features
}
