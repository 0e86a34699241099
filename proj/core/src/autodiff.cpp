#include "uqq/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uqq {

Mat Mat::row(std::vector<double> values) {
    Mat m;
    m.rows = 1;
    m.cols = static_cast<int>(values.size());
    m.a = std::move(values);
    return m;
}

Mat matmul(const Mat& x, const Mat& y) {
    if (x.cols != y.rows) throw std::invalid_argument("matmul: shape mismatch");
    Mat out(x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i) {
        const double* xrow = &x.a[static_cast<std::size_t>(i) * x.cols];
        double* orow = &out.a[static_cast<std::size_t>(i) * out.cols];
        for (int k = 0; k < x.cols; ++k) {
            const double xik = xrow[k];
            if (xik == 0.0) continue;
            const double* yrow = &y.a[static_cast<std::size_t>(k) * y.cols];
            for (int j = 0; j < y.cols; ++j) orow[j] += xik * yrow[j];
        }
    }
    return out;
}

Mat transpose(const Mat& x) {
    Mat out(x.cols, x.rows);
    for (int i = 0; i < x.rows; ++i)
        for (int j = 0; j < x.cols; ++j) out(j, i) = x(i, j);
    return out;
}

Tape::Id Tape::leaf(const Mat& value, bool requires_grad) {
    (void)requires_grad;  // every node carries a grad buffer; leaves just have no back fn
    return push(value);
}

Tape::Id Tape::matmul(Id x, Id y) {
    Id out = push(uqq::matmul(nodes_[x].value, nodes_[y].value));
    nodes_[out].back = [this, x, y, out]() {
        const Mat& g = nodes_[out].grad;
        const Mat gx = uqq::matmul(g, transpose(nodes_[y].value));
        const Mat gy = uqq::matmul(transpose(nodes_[x].value), g);
        for (std::size_t i = 0; i < gx.a.size(); ++i) nodes_[x].grad.a[i] += gx.a[i];
        for (std::size_t i = 0; i < gy.a.size(); ++i) nodes_[y].grad.a[i] += gy.a[i];
    };
    return out;
}

Tape::Id Tape::add(Id x, Id y) {
    const Mat& xv = nodes_[x].value;
    const Mat& yv = nodes_[y].value;
    if (xv.rows != yv.rows || xv.cols != yv.cols)
        throw std::invalid_argument("add: shape mismatch");
    Mat out = xv;
    for (std::size_t i = 0; i < out.a.size(); ++i) out.a[i] += yv.a[i];
    Id id = push(std::move(out));
    nodes_[id].back = [this, x, y, id]() {
        const Mat& g = nodes_[id].grad;
        for (std::size_t i = 0; i < g.a.size(); ++i) {
            nodes_[x].grad.a[i] += g.a[i];
            nodes_[y].grad.a[i] += g.a[i];
        }
    };
    return id;
}

Tape::Id Tape::add_rowvec(Id x, Id bias) {
    const Mat& xv = nodes_[x].value;
    const Mat& bv = nodes_[bias].value;
    if (bv.rows != 1 || bv.cols != xv.cols)
        throw std::invalid_argument("add_rowvec: bias shape mismatch");
    Mat out = xv;
    for (int i = 0; i < out.rows; ++i)
        for (int j = 0; j < out.cols; ++j) out(i, j) += bv(0, j);
    Id id = push(std::move(out));
    nodes_[id].back = [this, x, bias, id]() {
        const Mat& g = nodes_[id].grad;
        for (std::size_t i = 0; i < g.a.size(); ++i) nodes_[x].grad.a[i] += g.a[i];
        for (int i = 0; i < g.rows; ++i)
            for (int j = 0; j < g.cols; ++j) nodes_[bias].grad(0, j) += g(i, j);
    };
    return id;
}

Tape::Id Tape::relu(Id x) {
    Mat out = nodes_[x].value;
    for (double& v : out.a) v = std::max(0.0, v);
    Id id = push(std::move(out));
    nodes_[id].back = [this, x, id]() {
        const Mat& g = nodes_[id].grad;
        const Mat& xv = nodes_[x].value;
        for (std::size_t i = 0; i < g.a.size(); ++i)
            if (xv.a[i] > 0.0) nodes_[x].grad.a[i] += g.a[i];
    };
    return id;
}

Tape::Id Tape::scale(Id x, double c) {
    Mat out = nodes_[x].value;
    for (double& v : out.a) v *= c;
    Id id = push(std::move(out));
    nodes_[id].back = [this, x, id, c]() {
        const Mat& g = nodes_[id].grad;
        for (std::size_t i = 0; i < g.a.size(); ++i) nodes_[x].grad.a[i] += c * g.a[i];
    };
    return id;
}

Tape::Id Tape::clamp(Id x, double lo, double hi) {
    Mat out = nodes_[x].value;
    for (double& v : out.a) v = std::min(hi, std::max(lo, v));
    Id id = push(std::move(out));
    nodes_[id].back = [this, x, id, lo, hi]() {
        const Mat& g = nodes_[id].grad;
        const Mat& xv = nodes_[x].value;
        for (std::size_t i = 0; i < g.a.size(); ++i)
            if (xv.a[i] > lo && xv.a[i] < hi) nodes_[x].grad.a[i] += g.a[i];
    };
    return id;
}

Tape::Id Tape::layer_norm(Id x, Id gamma, Id beta, double eps) {
    const Mat& xv = nodes_[x].value;
    const Mat& gv = nodes_[gamma].value;
    const Mat& bv = nodes_[beta].value;
    const int n = xv.rows, c = xv.cols;
    if (gv.cols != c || bv.cols != c)
        throw std::invalid_argument("layer_norm: affine shape mismatch");

    Mat xhat(n, c);
    std::vector<double> inv_std(n);
    for (int i = 0; i < n; ++i) {
        double mean = 0.0;
        for (int j = 0; j < c; ++j) mean += xv(i, j);
        mean /= c;
        double var = 0.0;
        for (int j = 0; j < c; ++j) {
            const double d = xv(i, j) - mean;
            var += d * d;
        }
        var /= c;
        inv_std[i] = 1.0 / std::sqrt(var + eps);
        for (int j = 0; j < c; ++j) xhat(i, j) = (xv(i, j) - mean) * inv_std[i];
    }
    Mat out(n, c);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < c; ++j) out(i, j) = gv(0, j) * xhat(i, j) + bv(0, j);

    Id id = push(std::move(out));
    nodes_[id].back = [this, x, gamma, beta, id, xhat, inv_std, n, c]() {
        const Mat& g = nodes_[id].grad;
        const Mat& gv2 = nodes_[gamma].value;
        for (int i = 0; i < n; ++i) {
            double sum_gy = 0.0, sum_gyx = 0.0;
            for (int j = 0; j < c; ++j) {
                const double gy = g(i, j) * gv2(0, j);
                sum_gy += gy;
                sum_gyx += gy * xhat(i, j);
            }
            for (int j = 0; j < c; ++j) {
                const double gy = g(i, j) * gv2(0, j);
                nodes_[x].grad(i, j) +=
                    inv_std[i] * (gy - sum_gy / c - xhat(i, j) * sum_gyx / c);
                nodes_[gamma].grad(0, j) += g(i, j) * xhat(i, j);
                nodes_[beta].grad(0, j) += g(i, j);
            }
        }
    };
    return id;
}

Tape::Id Tape::gin_combine(Id h, Id eps_scalar, const Mat& a_hat) {
    const Mat& hv = nodes_[h].value;
    const Mat& ev = nodes_[eps_scalar].value;
    if (ev.rows != 1 || ev.cols != 1)
        throw std::invalid_argument("gin_combine: eps must be 1x1");
    if (a_hat.rows != hv.rows || a_hat.cols != hv.rows)
        throw std::invalid_argument("gin_combine: aggregation shape mismatch");
    const double eps = ev(0, 0);
    Mat out = uqq::matmul(a_hat, hv);
    for (std::size_t i = 0; i < out.a.size(); ++i) out.a[i] += (1.0 + eps) * hv.a[i];

    Id id = push(std::move(out));
    Mat a_hat_t = transpose(a_hat);
    nodes_[id].back = [this, h, eps_scalar, id, a_hat_t, eps]() {
        const Mat& g = nodes_[id].grad;
        const Mat& hv2 = nodes_[h].value;
        const Mat prop = uqq::matmul(a_hat_t, g);
        double deps = 0.0;
        for (std::size_t i = 0; i < g.a.size(); ++i) {
            nodes_[h].grad.a[i] += (1.0 + eps) * g.a[i] + prop.a[i];
            deps += g.a[i] * hv2.a[i];
        }
        nodes_[eps_scalar].grad(0, 0) += deps;
    };
    return id;
}

Tape::Id Tape::mean_rows(Id x) {
    const Mat& xv = nodes_[x].value;
    const int n = xv.rows, c = xv.cols;
    Mat out(1, c);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < c; ++j) out(0, j) += xv(i, j) / n;
    Id id = push(std::move(out));
    nodes_[id].back = [this, x, id, n, c]() {
        const Mat& g = nodes_[id].grad;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < c; ++j) nodes_[x].grad(i, j) += g(0, j) / n;
    };
    return id;
}

Tape::Id Tape::max_rows(Id x) {
    const Mat& xv = nodes_[x].value;
    const int n = xv.rows, c = xv.cols;
    Mat out(1, c);
    std::vector<int> argmax(c, 0);
    for (int j = 0; j < c; ++j) {
        double best = xv(0, j);
        for (int i = 1; i < n; ++i) {
            if (xv(i, j) > best) {
                best = xv(i, j);
                argmax[j] = i;
            }
        }
        out(0, j) = best;
    }
    Id id = push(std::move(out));
    nodes_[id].back = [this, x, id, argmax, c]() {
        const Mat& g = nodes_[id].grad;
        for (int j = 0; j < c; ++j) nodes_[x].grad(argmax[j], j) += g(0, j);
    };
    return id;
}

Tape::Id Tape::concat_cols(Id x, Id y) {
    const Mat& xv = nodes_[x].value;
    const Mat& yv = nodes_[y].value;
    if (xv.rows != 1 || yv.rows != 1)
        throw std::invalid_argument("concat_cols: expects row vectors");
    Mat out(1, xv.cols + yv.cols);
    for (int j = 0; j < xv.cols; ++j) out(0, j) = xv(0, j);
    for (int j = 0; j < yv.cols; ++j) out(0, xv.cols + j) = yv(0, j);
    Id id = push(std::move(out));
    const int split = xv.cols;
    nodes_[id].back = [this, x, y, id, split]() {
        const Mat& g = nodes_[id].grad;
        for (int j = 0; j < split; ++j) nodes_[x].grad(0, j) += g(0, j);
        for (int j = split; j < g.cols; ++j) nodes_[y].grad(0, j - split) += g(0, j);
    };
    return id;
}

Tape::Id Tape::stack_rows(const std::vector<Id>& rows) {
    if (rows.empty()) throw std::invalid_argument("stack_rows: empty");
    const int c = nodes_[rows[0]].value.cols;
    Mat out(static_cast<int>(rows.size()), c);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Mat& rv = nodes_[rows[i]].value;
        if (rv.rows != 1 || rv.cols != c)
            throw std::invalid_argument("stack_rows: inconsistent row shapes");
        for (int j = 0; j < c; ++j) out(static_cast<int>(i), j) = rv(0, j);
    }
    Id id = push(std::move(out));
    std::vector<Id> deps = rows;
    nodes_[id].back = [this, deps, id, c]() {
        const Mat& g = nodes_[id].grad;
        for (std::size_t i = 0; i < deps.size(); ++i)
            for (int j = 0; j < c; ++j)
                nodes_[deps[i]].grad(0, j) += g(static_cast<int>(i), j);
    };
    return id;
}

Tape::Id Tape::weighted_sum(const std::vector<Id>& terms, const std::vector<double>& coeffs) {
    if (terms.size() != coeffs.size() || terms.empty())
        throw std::invalid_argument("weighted_sum: bad arguments");
    Mat out(1, 1);
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const Mat& tv = nodes_[terms[i]].value;
        if (tv.rows != 1 || tv.cols != 1)
            throw std::invalid_argument("weighted_sum: terms must be scalars");
        out(0, 0) += coeffs[i] * tv(0, 0);
    }
    Id id = push(std::move(out));
    std::vector<Id> deps = terms;
    std::vector<double> cs = coeffs;
    nodes_[id].back = [this, deps, cs, id]() {
        const double g = nodes_[id].grad(0, 0);
        for (std::size_t i = 0; i < deps.size(); ++i) nodes_[deps[i]].grad(0, 0) += cs[i] * g;
    };
    return id;
}

void Tape::backward(Id root) {
    const Mat& rv = nodes_[root].value;
    if (rv.rows != 1 || rv.cols != 1)
        throw std::invalid_argument("backward: root must be scalar");
    nodes_[root].grad(0, 0) = 1.0;
    for (Id id = root; id >= 0; --id)
        if (nodes_[id].back) nodes_[id].back();
}

}  // namespace uqq
