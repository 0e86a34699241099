#include "uqq/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "uqq/losses.hpp"
#include "uqq/rng.hpp"

namespace uqq {

namespace {

struct Adam {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.0;
    long t = 0;
    std::vector<Mat> m, v;

    explicit Adam(const ParamStore& params) {
        for (const auto& p : params.values) {
            m.emplace_back(p.rows, p.cols);
            v.emplace_back(p.rows, p.cols);
        }
    }

    void step(ParamStore& params, const std::vector<Mat>& grads, double lr_now) {
        ++t;
        const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
        const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
        for (std::size_t i = 0; i < params.values.size(); ++i) {
            Mat& p = params.values[i];
            for (std::size_t j = 0; j < p.a.size(); ++j) {
                const double g = grads[i].a[j] + weight_decay * p.a[j];
                m[i].a[j] = beta1 * m[i].a[j] + (1.0 - beta1) * g;
                v[i].a[j] = beta2 * v[i].a[j] + (1.0 - beta2) * g * g;
                const double mhat = m[i].a[j] / bc1;
                const double vhat = v[i].a[j] / bc2;
                p.a[j] -= lr_now * mhat / (std::sqrt(vhat) + eps);
            }
        }
    }
};

struct PreparedGraph {
    SpectralEncoding enc;  // fixed-sign encoding, flipped per epoch (k > 0 only)
    Mat a_hat;
    std::vector<double> target;
};

Mat features_with_signs(const Graph& g, const SpectralEncoding& base, int model_k,
                        Rng* flip_rng) {
    if (model_k == 0) return degree_feature_matrix(g);
    SpectralEncoding enc = base;
    if (flip_rng) {
        const int avail = std::min(enc.k, g.n - 1);
        for (int j = 0; j < avail; ++j) {
            if (flip_rng->uniform() < 0.5)
                for (int i = 0; i < g.n; ++i) enc.vectors[i][j] = -enc.vectors[i][j];
        }
    }
    return feature_matrix(g, enc);
}

struct BatchLoss {
    double value = 0.0;
    std::vector<Mat> grads;  // empty when gradients are not requested
};

// Builds the full-batch loss for one phase on a fresh tape; optionally
// backpropagates into the parameter leaves.
BatchLoss batch_loss(const GinModel& model, const std::vector<Graph>& graphs,
                     const std::vector<PreparedGraph>& prepared, const Mat& targets,
                     const std::vector<std::vector<double>>& target_rows, int phase,
                     const TrainingConfig& cfg, const Mat& w2_weights,
                     const std::vector<std::vector<int>>& positives, Rng* flip_rng,
                     bool want_grads) {
    Tape tape;
    const auto pids = emit_params(tape, model);

    std::vector<Tape::Id> mu_rows, lv_rows, emb_rows;
    mu_rows.reserve(graphs.size());
    for (std::size_t i = 0; i < graphs.size(); ++i) {
        const Mat feats = features_with_signs(graphs[i], prepared[i].enc, model.k, flip_rng);
        const ForwardIds ids = gin_forward(tape, model, pids, feats, prepared[i].a_hat);
        mu_rows.push_back(ids.mu);
        if (ids.logvar >= 0) lv_rows.push_back(ids.logvar);
        emb_rows.push_back(ids.embedding);
    }

    const Tape::Id mu = tape.stack_rows(mu_rows);
    const Tape::Id emb = tape.stack_rows(emb_rows);

    std::vector<Tape::Id> terms;
    std::vector<double> coeffs;
    if (phase == 1 || model.heads == 1) {
        terms.push_back(loss_mse(tape, mu, targets));
        coeffs.push_back(1.0);
    } else {
        const Tape::Id lv = tape.stack_rows(lv_rows);
        terms.push_back(loss_nll(tape, mu, lv, targets));
        coeffs.push_back(1.0);
        terms.push_back(loss_w2(tape, mu, lv, w2_weights));
        coeffs.push_back(cfg.lambda_w);
    }
    if (!cfg.point_model) {
        terms.push_back(loss_contrastive(tape, emb, positives, cfg.tau_c));
        coeffs.push_back(cfg.lambda_c);
    }
    const Tape::Id total = tape.weighted_sum(terms, coeffs);

    BatchLoss out;
    out.value = tape.value(total)(0, 0);
    if (!std::isfinite(out.value)) {
        char msg[128];
        std::snprintf(msg, sizeof(msg), "train: non-finite loss %g in phase %d", out.value,
                      phase);
        throw std::runtime_error(msg);
    }
    if (want_grads) {
        tape.backward(total);
        out.grads.reserve(pids.size());
        for (const auto id : pids) out.grads.push_back(tape.grad(id));
    }
    (void)target_rows;
    return out;
}

void clip_global_norm(std::vector<Mat>& grads, double max_norm) {
    double sq = 0.0;
    for (const auto& g : grads)
        for (double v : g.a) sq += v * v;
    const double norm = std::sqrt(sq);
    if (norm <= max_norm || norm == 0.0) return;
    const double scale = max_norm / norm;
    for (auto& g : grads)
        for (double& v : g.a) v *= scale;
}

}  // namespace

TrainResult train(const std::vector<TrainExample>& train_set,
                  const std::vector<TrainExample>& val_set, const TrainingConfig& config) {
    if (train_set.empty()) throw std::invalid_argument("train: empty training set");
    const int p = static_cast<int>(train_set[0].target.size()) / 2;
    const int model_k = config.spectral_pe ? config.k : 0;

    GinModel model =
        init_model(model_k, p, config.hidden, config.point_model ? 1 : 2, config.seed);

    auto prepare = [&](const std::vector<TrainExample>& set, std::vector<Graph>& graphs,
                       std::vector<PreparedGraph>& prepared, Mat& targets,
                       std::vector<std::vector<double>>& rows) {
        graphs.clear();
        prepared.clear();
        rows.clear();
        targets = Mat(static_cast<int>(set.size()), 2 * p);
        for (std::size_t i = 0; i < set.size(); ++i) {
            graphs.push_back(set[i].graph);
            PreparedGraph pg;
            if (model_k > 0) pg.enc = spectral_encoding(set[i].graph, model_k, 0);
            pg.a_hat = normalized_adjacency(set[i].graph);
            pg.target = set[i].target;
            prepared.push_back(std::move(pg));
            rows.push_back(set[i].target);
            for (int j = 0; j < 2 * p; ++j) targets(static_cast<int>(i), j) = set[i].target[j];
        }
    };

    std::vector<Graph> tr_graphs, va_graphs;
    std::vector<PreparedGraph> tr_prep, va_prep;
    Mat tr_targets, va_targets;
    std::vector<std::vector<double>> tr_rows, va_rows;
    prepare(train_set, tr_graphs, tr_prep, tr_targets, tr_rows);
    prepare(val_set, va_graphs, va_prep, va_targets, va_rows);

    const double delta = config.contrastive_delta > 0.0 ? config.contrastive_delta
                                                        : median_pairwise_distance(tr_rows);
    const Mat tr_w2 = pairwise_target_weights(tr_rows, config.tau_w);
    const Mat va_w2 = pairwise_target_weights(va_rows, config.tau_w);
    const auto tr_pos = positive_sets(tr_rows, delta);
    const auto va_pos = positive_sets(va_rows, delta);

    Adam adam(model.params);
    adam.lr = config.lr;
    adam.weight_decay = config.weight_decay;

    const int phase_epochs = config.epochs / 2;
    TrainResult result;
    result.best_val_loss = 1e300;

    GinModel best_model = model;
    int epochs_since_best = 0;

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        const int phase = (epoch < phase_epochs || config.point_model) ? 1 : 2;
        const int phase_epoch = phase == 1 ? epoch : epoch - phase_epochs;
        const double lr_now =
            0.5 * config.lr *
            (1.0 + std::cos(M_PI * static_cast<double>(phase_epoch) / phase_epochs));

        Rng flip_rng(derive_seed(config.seed, "sign-flip-epoch",
                                 static_cast<std::uint64_t>(epoch)));
        BatchLoss tr = batch_loss(model, tr_graphs, tr_prep, tr_targets, tr_rows, phase,
                                  config, tr_w2, tr_pos, &flip_rng, true);
        clip_global_norm(tr.grads, config.grad_clip);
        adam.step(model.params, tr.grads, lr_now);

        double val_loss = 0.0;
        if (!va_graphs.empty()) {
            // validation uses the fixed-sign inference convention
            const int val_phase = config.point_model ? 1 : 2;
            BatchLoss va = batch_loss(model, va_graphs, va_prep, va_targets, va_rows,
                                      val_phase, config, va_w2, va_pos, nullptr, false);
            val_loss = va.value;
        }

        result.log.push_back({epoch, phase, tr.value, val_loss, lr_now});

        // early stopping monitors the phase-2 criterion (the full objective
        // for the point model)
        const bool monitored = !va_graphs.empty() && (phase == 2 || config.point_model);
        if (monitored) {
            if (val_loss < result.best_val_loss) {
                result.best_val_loss = val_loss;
                result.best_epoch = epoch;
                best_model = model;
                epochs_since_best = 0;
            } else if (++epochs_since_best >= config.patience) {
                break;
            }
        }
    }

    result.model = (result.best_epoch >= 0) ? best_model : model;
    snap_to_float32(result.model);
    return result;
}

void write_training_log(const std::vector<TrainLogRow>& log, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_training_log: cannot open " + path);
    out << "epoch,phase,train_loss,val_loss,lr\n";
    char buf[160];
    for (const auto& row : log) {
        std::snprintf(buf, sizeof(buf), "%d,%d,%.9g,%.9g,%.9g\n", row.epoch, row.phase,
                      row.train_loss, row.val_loss, row.lr);
        out << buf;
    }
}

}  // namespace uqq
