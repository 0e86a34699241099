// Finite-difference gradient verification for the training losses: builds
// the requested loss on a fresh tape, backpropagates, and compares analytic
// parameter gradients against central differences on sampled weights.
#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "uqq/gin.hpp"
#include "uqq/losses.hpp"
#include "uqq/rng.hpp"

namespace uqq::testing {

struct LossBatch {
    std::vector<Mat> features;
    std::vector<Mat> a_hats;
    Mat targets;
    Mat w2_weights;
    std::vector<std::vector<int>> positives;
};

enum class LossKind { Mse, Nll, W2, Contrastive, Composite };

inline double eval_loss(const GinModel& model, const LossBatch& batch, LossKind kind,
                        std::vector<Mat>* grads_out) {
    Tape tape;
    const auto pids = emit_params(tape, model);
    std::vector<Tape::Id> mu_rows, lv_rows, emb_rows;
    for (std::size_t i = 0; i < batch.features.size(); ++i) {
        const ForwardIds ids =
            gin_forward(tape, model, pids, batch.features[i], batch.a_hats[i]);
        mu_rows.push_back(ids.mu);
        if (ids.logvar >= 0) lv_rows.push_back(ids.logvar);
        emb_rows.push_back(ids.embedding);
    }
    const Tape::Id mu = tape.stack_rows(mu_rows);
    Tape::Id root = -1;
    switch (kind) {
        case LossKind::Mse:
            root = loss_mse(tape, mu, batch.targets);
            break;
        case LossKind::Nll:
            root = loss_nll(tape, mu, tape.stack_rows(lv_rows), batch.targets);
            break;
        case LossKind::W2:
            root = loss_w2(tape, mu, tape.stack_rows(lv_rows), batch.w2_weights);
            break;
        case LossKind::Contrastive:
            root = loss_contrastive(tape, tape.stack_rows(emb_rows), batch.positives, 0.1);
            break;
        case LossKind::Composite: {
            const Tape::Id lv = tape.stack_rows(lv_rows);
            const Tape::Id emb = tape.stack_rows(emb_rows);
            root = tape.weighted_sum({loss_nll(tape, mu, lv, batch.targets),
                                      loss_w2(tape, mu, lv, batch.w2_weights),
                                      loss_contrastive(tape, emb, batch.positives, 0.1)},
                                     {1.0, 0.1, 0.05});
            break;
        }
    }
    const double value = tape.value(root)(0, 0);
    if (grads_out) {
        tape.backward(root);
        grads_out->clear();
        for (const auto id : pids) grads_out->push_back(tape.grad(id));
    }
    return value;
}

struct GradCheckResult {
    double max_rel_error = 0.0;
    int checked = 0;
};

/// Compares analytic gradients against central differences on
/// `num_weights` randomly sampled parameters (h = 1e-5); relative error
/// uses a small absolute floor for near-zero pairs.
inline GradCheckResult grad_check(GinModel model, const LossBatch& batch, LossKind kind,
                                  int num_weights, std::uint64_t seed) {
    std::vector<Mat> analytic;
    eval_loss(model, batch, kind, &analytic);

    Rng rng(seed);
    GradCheckResult result;
    const double h = 1e-5;
    for (int trial = 0; trial < num_weights; ++trial) {
        const int pi = static_cast<int>(rng.uniform_int(model.params.values.size()));
        Mat& tensor = model.params.values[pi];
        const int ei = static_cast<int>(rng.uniform_int(tensor.a.size()));

        const double orig = tensor.a[ei];
        tensor.a[ei] = orig + h;
        const double fp = eval_loss(model, batch, kind, nullptr);
        tensor.a[ei] = orig - h;
        const double fm = eval_loss(model, batch, kind, nullptr);
        tensor.a[ei] = orig;

        const double numeric = (fp - fm) / (2.0 * h);
        const double exact = analytic[pi].a[ei];
        const double denom = std::max({std::abs(numeric), std::abs(exact), 1e-6});
        result.max_rel_error = std::max(result.max_rel_error,
                                        std::abs(numeric - exact) / denom);
        ++result.checked;
    }
    return result;
}

}  // namespace uqq::testing
