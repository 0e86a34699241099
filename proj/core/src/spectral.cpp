#include "uqq/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "uqq/rng.hpp"

namespace uqq {

EigenSystem jacobi_eigensystem(const std::vector<std::vector<double>>& sym) {
    const int n = static_cast<int>(sym.size());
    std::vector<std::vector<double>> a = sym;
    std::vector<std::vector<double>> v(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) v[i][i] = 1.0;

    auto off_norm = [&]() {
        double s = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) s += a[p][q] * a[p][q];
        return std::sqrt(2.0 * s);
    };

    const int max_sweeps = 100;
    for (int sweep = 0; sweep < max_sweeps && off_norm() >= 1e-10; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a[p][q];
                if (std::abs(apq) < 1e-300) continue;
                const double app = a[p][p], aqq = a[q][q];
                const double theta = 0.5 * (aqq - app) / apq;
                double t = 1.0 / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                if (theta < 0.0) t = -t;
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                a[p][p] = app - t * apq;
                a[q][q] = aqq + t * apq;
                a[p][q] = a[q][p] = 0.0;
                for (int i = 0; i < n; ++i) {
                    if (i != p && i != q) {
                        const double aip = a[i][p], aiq = a[i][q];
                        a[i][p] = a[p][i] = aip - s * (aiq + tau * aip);
                        a[i][q] = a[q][i] = aiq + s * (aip - tau * aiq);
                    }
                    const double vip = v[i][p], viq = v[i][q];
                    v[i][p] = vip - s * (viq + tau * vip);
                    v[i][q] = viq + s * (vip - tau * viq);
                }
            }
        }
    }

    EigenSystem es;
    es.values.resize(n);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> diag(n);
    for (int i = 0; i < n; ++i) diag[i] = a[i][i];
    std::stable_sort(order.begin(), order.end(),
                     [&](int x, int y) { return diag[x] < diag[y]; });
    es.vectors.assign(n, std::vector<double>(n, 0.0));
    for (int j = 0; j < n; ++j) {
        es.values[j] = diag[order[j]];
        for (int i = 0; i < n; ++i) es.vectors[i][j] = v[i][order[j]];
    }
    return es;
}

EigenSystem laplacian_eigs(const Graph& g) {
    const int n = g.n;
    std::vector<std::vector<double>> lap(n, std::vector<double>(n, 0.0));
    for (auto [i, j] : g.edges) {
        lap[i][j] -= 1.0;
        lap[j][i] -= 1.0;
        lap[i][i] += 1.0;
        lap[j][j] += 1.0;
    }
    return jacobi_eigensystem(lap);
}

SpectralEncoding spectral_encoding(const Graph& g, int k, std::uint64_t sign_seed) {
    if (k < 1) throw std::invalid_argument("spectral_encoding: k must be >= 1");
    const int n = g.n;
    EigenSystem es = laplacian_eigs(g);

    SpectralEncoding enc;
    enc.k = k;
    enc.vectors.assign(n, std::vector<double>(k, 0.0));
    enc.eigenvalues.assign(k, 0.0);

    const int avail = std::min(k, n - 1);
    for (int j = 0; j < avail; ++j) {
        const int col = j + 1;  // skip the trivial constant eigenvector
        enc.eigenvalues[j] = es.values[col];
        double norm = 0.0;
        for (int i = 0; i < n; ++i) norm += es.vectors[i][col] * es.vectors[i][col];
        norm = std::sqrt(norm);
        for (int i = 0; i < n; ++i) enc.vectors[i][j] = es.vectors[i][col] / norm;
    }

    if (sign_seed != 0) {
        Rng rng(sign_seed);
        for (int j = 0; j < avail; ++j) {
            const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
            for (int i = 0; i < n; ++i) enc.vectors[i][j] *= sign;
        }
    } else {
        // fixed inference convention: first entry with |value| > 1e-9 positive
        for (int j = 0; j < avail; ++j) {
            for (int i = 0; i < n; ++i) {
                if (std::abs(enc.vectors[i][j]) > 1e-9) {
                    if (enc.vectors[i][j] < 0.0)
                        for (int r = 0; r < n; ++r) enc.vectors[r][j] = -enc.vectors[r][j];
                    break;
                }
            }
        }
    }
    return enc;
}

std::vector<std::vector<double>> node_features(const Graph& g, const SpectralEncoding& enc) {
    const int n = g.n;
    if (static_cast<int>(enc.vectors.size()) != n)
        throw std::invalid_argument("node_features: encoding does not match graph");
    auto deg = g.degrees();
    std::vector<std::vector<double>> feats(n, std::vector<double>(enc.k + 1, 0.0));
    for (int v = 0; v < n; ++v) {
        feats[v][0] = static_cast<double>(deg[v]) / static_cast<double>(n);
        for (int j = 0; j < enc.k; ++j) feats[v][j + 1] = enc.vectors[v][j];
    }
    return feats;
}

HandcraftedFeatures handcrafted(const Graph& g) {
    const int n = g.n;
    const int m = g.m();
    auto deg = g.degrees();

    double mean_deg = 0.0;
    for (int d : deg) mean_deg += d;
    mean_deg /= n;
    double var_deg = 0.0;
    for (int d : deg) var_deg += (d - mean_deg) * (d - mean_deg);
    var_deg /= n;

    // mean local clustering: triangles through v over deg(v) choose 2
    auto adj = g.adjacency_lists();
    std::vector<std::vector<char>> has(n, std::vector<char>(n, 0));
    for (auto [i, j] : g.edges) has[i][j] = has[j][i] = 1;
    double clustering = 0.0;
    for (int v = 0; v < n; ++v) {
        const int dv = static_cast<int>(adj[v].size());
        if (dv < 2) continue;
        int tri = 0;
        for (int a = 0; a < dv; ++a)
            for (int b = a + 1; b < dv; ++b)
                if (has[adj[v][a]][adj[v][b]]) ++tri;
        clustering += 2.0 * tri / (static_cast<double>(dv) * (dv - 1));
    }
    clustering /= n;

    EigenSystem es = laplacian_eigs(g);

    HandcraftedFeatures f;
    f.v[0] = n > 1 ? 2.0 * m / (static_cast<double>(n) * (n - 1)) : 0.0;
    f.v[1] = mean_deg;
    f.v[2] = std::sqrt(var_deg);
    f.v[3] = clustering;
    f.v[4] = n > 1 ? es.values[1] : 0.0;
    f.v[5] = es.values[n - 1];
    f.v[6] = static_cast<double>(n);
    f.v[7] = static_cast<double>(m);
    return f;
}

}  // namespace uqq
