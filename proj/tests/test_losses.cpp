#include <doctest.h>

#include <cmath>

#include "support/fixtures.hpp"
#include "support/grad_check.hpp"
#include "uqq/losses.hpp"

using namespace uqq;
using namespace uqq::testing;

namespace {

Tape::Id leaf_rows(Tape& tape, const std::vector<std::vector<double>>& rows) {
    Mat m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            m(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
    return tape.leaf(m, true);
}

Mat mat_rows(const std::vector<std::vector<double>>& rows) {
    Mat m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            m(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
    return m;
}

}  // namespace

TEST_CASE("nll loss reference values") {
    Tape tape;
    SUBCASE("perfect mean, unit variance gives zero") {
        const auto mu = leaf_rows(tape, {{0.3, -0.2, 0.5, 0.1}});
        const auto lv = leaf_rows(tape, {{0.0, 0.0, 0.0, 0.0}});
        const auto loss = loss_nll(tape, mu, lv, mat_rows({{0.3, -0.2, 0.5, 0.1}}));
        CHECK(tape.value(loss)(0, 0) == doctest::Approx(0.0).epsilon(1e-15));
    }
    SUBCASE("unit offset in one coordinate gives one") {
        const auto mu = leaf_rows(tape, {{1.0, 0.0, 0.0, 0.0}});
        const auto lv = leaf_rows(tape, {{0.0, 0.0, 0.0, 0.0}});
        const auto loss = loss_nll(tape, mu, lv, mat_rows({{0.0, 0.0, 0.0, 0.0}}));
        CHECK(tape.value(loss)(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("random case matches the independent scalar formula") {
        Rng rng(5);
        std::vector<std::vector<double>> mu_rows(3, std::vector<double>(4));
        std::vector<std::vector<double>> lv_rows(3, std::vector<double>(4));
        std::vector<std::vector<double>> t_rows(3, std::vector<double>(4));
        double oracle = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 4; ++j) {
                mu_rows[i][j] = rng.uniform(-1, 1);
                lv_rows[i][j] = rng.uniform(-2, 1);
                t_rows[i][j] = rng.uniform(-1, 1);
            }
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 4; ++j) {
                const double d = mu_rows[i][j] - t_rows[i][j];
                oracle += (d * d / std::exp(lv_rows[i][j]) + lv_rows[i][j]) / 3.0;
            }
        const auto loss = loss_nll(tape, leaf_rows(tape, mu_rows), leaf_rows(tape, lv_rows),
                                   mat_rows(t_rows));
        CHECK(tape.value(loss)(0, 0) == doctest::Approx(oracle).epsilon(1e-12));
    }
}

TEST_CASE("w2 loss reference values") {
    Tape tape;
    SUBCASE("identical predictions vanish") {
        const auto mu = leaf_rows(tape, {{0.1, 0.2, 0.3, 0.4}, {0.1, 0.2, 0.3, 0.4}});
        const auto lv = leaf_rows(tape, {{-1.0, 0.0, 0.5, 1.0}, {-1.0, 0.0, 0.5, 1.0}});
        Mat w(2, 2);
        w(0, 1) = w(1, 0) = 1.0;
        CHECK(tape.value(loss_w2(tape, mu, lv, w))(0, 0) == doctest::Approx(0.0));
    }
    SUBCASE("two items with unit mean offset and equal sigma: 2/4 = 0.5") {
        const auto mu = leaf_rows(tape, {{1.0, 0.0, 0.0, 0.0}, {0.0, 0.0, 0.0, 0.0}});
        const auto lv = leaf_rows(tape, {{0.3, 0.3, 0.3, 0.3}, {0.3, 0.3, 0.3, 0.3}});
        Mat w(2, 2);
        w(0, 1) = w(1, 0) = 1.0;  // identical targets give weight exp(0) = 1
        CHECK(tape.value(loss_w2(tape, mu, lv, w))(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("vanishing temperature removes all pairs") {
        const std::vector<std::vector<double>> targets{{0.0, 0.0, 0.0, 0.0},
                                                       {1.0, 1.0, 1.0, 1.0}};
        const Mat w = pairwise_target_weights(targets, 1e-6);
        CHECK(w(0, 1) == doctest::Approx(0.0));
        const auto mu = leaf_rows(tape, {{1.0, 0.0, 0.0, 0.0}, {0.0, 0.0, 0.0, 0.0}});
        const auto lv = leaf_rows(tape, {{0.0, 0.0, 0.0, 0.0}, {0.0, 0.0, 0.0, 0.0}});
        CHECK(tape.value(loss_w2(tape, mu, lv, w))(0, 0) == doctest::Approx(0.0));
    }
}

TEST_CASE("contrastive loss reference values") {
    Tape tape;
    SUBCASE("identical embeddings with all pairs positive: log(B - 1)") {
        const int b = 5;
        std::vector<std::vector<double>> rows(b, {0.4, 0.3, -0.2, 0.9});
        std::vector<std::vector<int>> positives(b);
        for (int i = 0; i < b; ++i)
            for (int j = 0; j < b; ++j)
                if (i != j) positives[i].push_back(j);
        const auto emb = leaf_rows(tape, rows);
        const auto loss = loss_contrastive(tape, emb, positives, 0.1);
        CHECK(tape.value(loss)(0, 0) == doctest::Approx(std::log(4.0)).epsilon(1e-10));
    }
    SUBCASE("no positives anywhere gives zero") {
        const auto emb = leaf_rows(tape, {{1.0, 0.0}, {0.0, 1.0}, {0.7, 0.7}});
        const auto loss = loss_contrastive(tape, emb, {{}, {}, {}}, 0.1);
        CHECK(tape.value(loss)(0, 0) == 0.0);
    }
    SUBCASE("orthogonal clusters at small temperature approach zero") {
        // two tight clusters, within-cluster positives; logits across are 0
        const auto emb = leaf_rows(
            tape, {{1.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {0.0, 1.0}});
        const std::vector<std::vector<int>> positives{{1}, {0}, {3}, {2}};
        const auto loss = loss_contrastive(tape, emb, positives, 0.01);
        CHECK(tape.value(loss)(0, 0) == doctest::Approx(0.0).epsilon(1e-8));
    }
}

TEST_CASE("median pairwise distance and positive sets") {
    const std::vector<std::vector<double>> targets{{0, 0}, {1, 0}, {0, 2}};
    // distances: 1, 2, sqrt(5) -> median 2
    CHECK(median_pairwise_distance(targets) == doctest::Approx(2.0));
    const auto pos = positive_sets(targets, 1.5);
    CHECK(pos[0] == std::vector<int>{1});
    CHECK(pos[1] == std::vector<int>{0});
    CHECK(pos[2].empty());
}

TEST_CASE("loss gradients match finite differences through the model") {
    const LossBatch batch = make_batch(6, 8, 4, 2, 999);
    GinModel model = init_model(4, 2, 16, 2, 321);

    for (const auto kind : {LossKind::Mse, LossKind::Nll, LossKind::W2,
                            LossKind::Contrastive, LossKind::Composite}) {
        const auto res = grad_check(model, batch, kind, 25, 777);
        CAPTURE(static_cast<int>(kind));
        CHECK(res.checked == 25);
        CHECK(res.max_rel_error < 1e-4);
    }
}
