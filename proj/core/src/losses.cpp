#include "uqq/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uqq {

using Access = TapeOpAccess;

Tape::Id loss_mse(Tape& tape, Tape::Id mu, const Mat& targets) {
    const Mat& mv = Access::value(tape, mu);
    if (mv.rows != targets.rows || mv.cols != targets.cols)
        throw std::invalid_argument("loss_mse: shape mismatch");
    const int n = mv.rows;
    Mat out(1, 1);
    for (std::size_t i = 0; i < mv.a.size(); ++i) {
        const double d = mv.a[i] - targets.a[i];
        out(0, 0) += d * d / n;
    }
    Tape::Id id = Access::push(tape, std::move(out));
    Access::set_back(tape, id, [&tape, mu, id, targets, n]() {
        const double g = Access::grad(tape, id)(0, 0);
        const Mat& mv2 = Access::value(tape, mu);
        Mat& mg = Access::grad(tape, mu);
        for (std::size_t i = 0; i < mv2.a.size(); ++i)
            mg.a[i] += g * 2.0 * (mv2.a[i] - targets.a[i]) / n;
    });
    return id;
}

Tape::Id loss_nll(Tape& tape, Tape::Id mu, Tape::Id logvar, const Mat& targets) {
    const Mat& mv = Access::value(tape, mu);
    const Mat& lv = Access::value(tape, logvar);
    if (mv.rows != targets.rows || mv.cols != targets.cols || lv.rows != mv.rows ||
        lv.cols != mv.cols)
        throw std::invalid_argument("loss_nll: shape mismatch");
    const int n = mv.rows;
    Mat out(1, 1);
    for (std::size_t i = 0; i < mv.a.size(); ++i) {
        const double d = mv.a[i] - targets.a[i];
        out(0, 0) += (d * d * std::exp(-lv.a[i]) + lv.a[i]) / n;
    }
    Tape::Id id = Access::push(tape, std::move(out));
    Access::set_back(tape, id, [&tape, mu, logvar, id, targets, n]() {
        const double g = Access::grad(tape, id)(0, 0);
        const Mat& mv2 = Access::value(tape, mu);
        const Mat& lv2 = Access::value(tape, logvar);
        Mat& mg = Access::grad(tape, mu);
        Mat& lg = Access::grad(tape, logvar);
        for (std::size_t i = 0; i < mv2.a.size(); ++i) {
            const double d = mv2.a[i] - targets.a[i];
            const double inv_var = std::exp(-lv2.a[i]);
            mg.a[i] += g * 2.0 * d * inv_var / n;
            lg.a[i] += g * (1.0 - d * d * inv_var) / n;
        }
    });
    return id;
}

Tape::Id loss_w2(Tape& tape, Tape::Id mu, Tape::Id logvar, const Mat& weights) {
    const Mat& mv = Access::value(tape, mu);
    const Mat& lv = Access::value(tape, logvar);
    const int n = mv.rows, c = mv.cols;
    if (weights.rows != n || weights.cols != n)
        throw std::invalid_argument("loss_w2: weight shape mismatch");
    if (n < 2) {
        Mat zero(1, 1);
        return Access::push(tape, std::move(zero));
    }

    Mat sigma(n, c);
    for (std::size_t i = 0; i < lv.a.size(); ++i) sigma.a[i] = std::exp(0.5 * lv.a[i]);

    Mat out(1, 1);
    const double inv_n2 = 1.0 / (static_cast<double>(n) * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const double w = weights(i, j);
            if (w == 0.0) continue;
            double dist = 0.0;
            for (int t = 0; t < c; ++t) {
                const double dm = mv(i, t) - mv(j, t);
                const double ds = sigma(i, t) - sigma(j, t);
                dist += dm * dm + ds * ds;
            }
            out(0, 0) += inv_n2 * w * dist;
        }
    }
    Tape::Id id = Access::push(tape, std::move(out));
    Access::set_back(tape, id, [&tape, mu, logvar, id, weights, sigma, n, c, inv_n2]() {
        const double g = Access::grad(tape, id)(0, 0);
        const Mat& mv2 = Access::value(tape, mu);
        Mat& mg = Access::grad(tape, mu);
        Mat& lg = Access::grad(tape, logvar);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                const double w = weights(i, j) + weights(j, i);
                if (w == 0.0) continue;
                for (int t = 0; t < c; ++t) {
                    const double dm = mv2(i, t) - mv2(j, t);
                    const double ds = sigma(i, t) - sigma(j, t);
                    mg(i, t) += g * inv_n2 * w * 2.0 * dm;
                    // d sigma / d logvar = sigma / 2 folds the pair factor 2
                    lg(i, t) += g * inv_n2 * w * ds * sigma(i, t);
                }
            }
        }
    });
    return id;
}

Tape::Id loss_contrastive(Tape& tape, Tape::Id embeddings,
                          const std::vector<std::vector<int>>& positives, double tau) {
    const Mat& ev = Access::value(tape, embeddings);
    const int n = ev.rows, d = ev.cols;
    if (static_cast<int>(positives.size()) != n)
        throw std::invalid_argument("loss_contrastive: positives size mismatch");
    if (tau <= 0.0) throw std::invalid_argument("loss_contrastive: tau must be positive");

    // normalized embeddings
    Mat unit(n, d);
    std::vector<double> norms(n);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int t = 0; t < d; ++t) s += ev(i, t) * ev(i, t);
        norms[i] = std::sqrt(std::max(s, 1e-24));
        for (int t = 0; t < d; ++t) unit(i, t) = ev(i, t) / norms[i];
    }

    // logits l_ij = <u_i, u_j> / tau, softmax over j != i
    Mat logits(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int t = 0; t < d; ++t) s += unit(i, t) * unit(j, t);
            logits(i, j) = s / tau;
        }

    Mat softmax(n, n);
    double total = 0.0;
    int anchors = 0;
    for (int i = 0; i < n; ++i) {
        double mx = -1e300;
        for (int j = 0; j < n; ++j)
            if (j != i) mx = std::max(mx, logits(i, j));
        double z = 0.0;
        for (int j = 0; j < n; ++j)
            if (j != i) z += std::exp(logits(i, j) - mx);
        for (int j = 0; j < n; ++j)
            softmax(i, j) = (j == i) ? 0.0 : std::exp(logits(i, j) - mx) / z;
        if (positives[i].empty()) continue;
        ++anchors;
        const double log_z = std::log(z) + mx;
        double li = 0.0;
        for (int j : positives[i]) li += logits(i, j) - log_z;
        total -= li / static_cast<double>(positives[i].size());
    }
    (void)anchors;

    Mat out(1, 1);
    out(0, 0) = total / n;
    Tape::Id id = Access::push(tape, std::move(out));

    Access::set_back(tape, id,
                     [&tape, embeddings, id, positives, tau, unit, softmax, norms, n, d]() {
        const double g = Access::grad(tape, id)(0, 0);
        // dL/dlogits
        Mat dlogits(n, n);
        for (int i = 0; i < n; ++i) {
            if (positives[i].empty()) continue;
            const double inv_p = 1.0 / static_cast<double>(positives[i].size());
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                dlogits(i, j) = softmax(i, j) / n;
            }
            for (int j : positives[i]) dlogits(i, j) -= inv_p / n;
        }
        // through the symmetric cosine similarities to unit embeddings
        Mat dunit(n, d);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                const double coeff = dlogits(i, j) / tau;
                if (coeff == 0.0) continue;
                for (int t = 0; t < d; ++t) {
                    dunit(i, t) += coeff * unit(j, t);
                    dunit(j, t) += coeff * unit(i, t);
                }
            }
        // through the normalization u = e / ||e||
        Mat& eg = Access::grad(tape, embeddings);
        for (int i = 0; i < n; ++i) {
            double dot = 0.0;
            for (int t = 0; t < d; ++t) dot += dunit(i, t) * unit(i, t);
            for (int t = 0; t < d; ++t)
                eg(i, t) += g * (dunit(i, t) - dot * unit(i, t)) / norms[i];
        }
    });
    return id;
}

Mat pairwise_target_weights(const std::vector<std::vector<double>>& targets, double tau_w) {
    const int n = static_cast<int>(targets.size());
    Mat w(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            double dist = 0.0;
            for (std::size_t t = 0; t < targets[i].size(); ++t) {
                const double d = targets[i][t] - targets[j][t];
                dist += d * d;
            }
            w(i, j) = std::exp(-dist / (2.0 * tau_w * tau_w));
        }
    return w;
}

std::vector<std::vector<int>> positive_sets(const std::vector<std::vector<double>>& targets,
                                            double delta) {
    const int n = static_cast<int>(targets.size());
    std::vector<std::vector<int>> pos(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            double dist = 0.0;
            for (std::size_t t = 0; t < targets[i].size(); ++t) {
                const double d = targets[i][t] - targets[j][t];
                dist += d * d;
            }
            if (std::sqrt(dist) < delta) pos[i].push_back(j);
        }
    return pos;
}

double median_pairwise_distance(const std::vector<std::vector<double>>& targets) {
    std::vector<double> dists;
    const int n = static_cast<int>(targets.size());
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double dist = 0.0;
            for (std::size_t t = 0; t < targets[i].size(); ++t) {
                const double d = targets[i][t] - targets[j][t];
                dist += d * d;
            }
            dists.push_back(std::sqrt(dist));
        }
    if (dists.empty()) return 0.0;
    std::sort(dists.begin(), dists.end());
    const std::size_t mid = dists.size() / 2;
    if (dists.size() % 2 == 1) return dists[mid];
    return 0.5 * (dists[mid - 1] + dists[mid]);
}

}  // namespace uqq
