#include <doctest.h>

#include <cmath>

#include "uqq/graph.hpp"
#include "uqq/rng.hpp"
#include "uqq/spectral.hpp"

using namespace uqq;

namespace {

Graph path2() { return make_graph(2, {{0, 1}}); }
Graph cycle4() { return make_graph(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}); }
Graph k4() { return make_graph(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}); }

double reconstruction_residual(const Graph& g, const EigenSystem& es) {
    const int n = g.n;
    std::vector<std::vector<double>> lap(n, std::vector<double>(n, 0.0));
    for (auto [i, j] : g.edges) {
        lap[i][j] -= 1.0;
        lap[j][i] -= 1.0;
        lap[i][i] += 1.0;
        lap[j][j] += 1.0;
    }
    double max_err = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double reconstructed = 0.0;
            for (int t = 0; t < n; ++t)
                reconstructed += es.vectors[i][t] * es.values[t] * es.vectors[j][t];
            max_err = std::max(max_err, std::abs(reconstructed - lap[i][j]));
        }
    return max_err;
}

double orthonormality_residual(const EigenSystem& es) {
    const int n = static_cast<int>(es.values.size());
    double max_err = 0.0;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            double dot = 0.0;
            for (int i = 0; i < n; ++i) dot += es.vectors[i][a] * es.vectors[i][b];
            max_err = std::max(max_err, std::abs(dot - (a == b ? 1.0 : 0.0)));
        }
    return max_err;
}

}  // namespace

TEST_CASE("P2 Laplacian spectrum is (0, 2)") {
    const EigenSystem es = laplacian_eigs(path2());
    CHECK(es.values[0] == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(es.values[1] == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("C4 spectrum matches the closed form 2 - 2 cos(2 pi k / 4)") {
    const EigenSystem es = laplacian_eigs(cycle4());
    const double expected[] = {0.0, 2.0, 2.0, 4.0};
    for (int i = 0; i < 4; ++i)
        CHECK(es.values[i] == doctest::Approx(expected[i]).epsilon(1e-9));
}

TEST_CASE("eigendecomposition residuals over random graphs") {
    // module invariant: 1000 random graphs, n <= 16
    int count = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto family = static_cast<GraphFamily>(i % 4);
        int n = 4 + static_cast<int>(derive_seed(3, "sz", i) % 13);
        if (family == GraphFamily::REG3 && n % 2) ++n;
        const Graph g = generate(family, n, derive_seed(3, "eig", i));
        const EigenSystem es = laplacian_eigs(g);
        REQUIRE(reconstruction_residual(g, es) <= 1e-8);
        REQUIRE(orthonormality_residual(es) <= 1e-8);
        REQUIRE(std::abs(es.values[0]) <= 1e-8);  // lambda_0 ~ 0 when connected
        REQUIRE(es.values[1] > 0.0);              // algebraic connectivity
        for (std::size_t j = 1; j < es.values.size(); ++j)
            REQUIRE(es.values[j] >= es.values[j - 1] - 1e-12);
        ++count;
    }
    CHECK(count == 1000);
}

TEST_CASE("spectral encoding pads columns beyond n - 1 with zeros") {
    const SpectralEncoding enc = spectral_encoding(path2(), 6, 0);
    CHECK(enc.k == 6);
    for (int j = 1; j < 6; ++j)
        for (int i = 0; i < 2; ++i) CHECK(enc.vectors[i][j] == 0.0);
    // the one real column is unit norm
    double norm = 0.0;
    for (int i = 0; i < 2; ++i) norm += enc.vectors[i][0] * enc.vectors[i][0];
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("sign seeds flip whole columns only") {
    const Graph g = generate(GraphFamily::ER, 10, 31);
    const SpectralEncoding a = spectral_encoding(g, 4, 111);
    const SpectralEncoding b = spectral_encoding(g, 4, 222);
    for (int j = 0; j < 4; ++j) {
        // find the sign relating the columns, then require exact match
        double sign = 0.0;
        for (int i = 0; i < g.n; ++i) {
            if (std::abs(a.vectors[i][j]) > 1e-12) {
                sign = a.vectors[i][j] / b.vectors[i][j];
                break;
            }
        }
        CHECK(std::abs(std::abs(sign) - 1.0) < 1e-9);
        for (int i = 0; i < g.n; ++i)
            CHECK(a.vectors[i][j] == doctest::Approx(sign * b.vectors[i][j]).epsilon(1e-12));
    }
}

TEST_CASE("inference sign convention makes the first significant entry positive") {
    const Graph g = generate(GraphFamily::BA, 9, 5);
    const SpectralEncoding enc = spectral_encoding(g, 3, 0);
    for (int j = 0; j < 3; ++j) {
        for (int i = 0; i < g.n; ++i) {
            if (std::abs(enc.vectors[i][j]) > 1e-9) {
                CHECK(enc.vectors[i][j] > 0.0);
                break;
            }
        }
    }
}

TEST_CASE("C4 Fiedler column equals the k = 1 encoding") {
    const SpectralEncoding enc = spectral_encoding(cycle4(), 1, 0);
    const EigenSystem es = laplacian_eigs(cycle4());
    CHECK(enc.eigenvalues[0] == doctest::Approx(es.values[1]).epsilon(1e-10));
    double norm = 0.0;
    for (int i = 0; i < 4; ++i) norm += enc.vectors[i][0] * enc.vectors[i][0];
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("node features prepend the normalized degree") {
    SpectralEncoding empty;
    empty.k = 0;
    empty.vectors.assign(4, {});
    const auto feats = node_features(k4(), empty);
    REQUIRE(feats.size() == 4);
    for (const auto& row : feats) {
        REQUIRE(row.size() == 1);
        CHECK(row[0] == doctest::Approx(0.75));
    }

    SpectralEncoding p2;
    p2.k = 0;
    p2.vectors.assign(2, {});
    const auto pf = node_features(path2(), p2);
    CHECK(pf[0][0] == doctest::Approx(0.5));
    CHECK(pf[1][0] == doctest::Approx(0.5));
}

TEST_CASE("handcrafted features on the reference graphs") {
    const HandcraftedFeatures fk4 = handcrafted(k4());
    CHECK(fk4.v[0] == doctest::Approx(1.0));   // density
    CHECK(fk4.v[1] == doctest::Approx(3.0));   // mean degree
    CHECK(fk4.v[2] == doctest::Approx(0.0));   // degree std
    CHECK(fk4.v[3] == doctest::Approx(1.0));   // clustering

    const HandcraftedFeatures fp2 = handcrafted(path2());
    CHECK(fp2.v[0] == doctest::Approx(1.0));
    CHECK(fp2.v[3] == doctest::Approx(0.0));
    CHECK(fp2.v[7] == doctest::Approx(1.0));  // m

    const HandcraftedFeatures fc4 = handcrafted(cycle4());
    CHECK(fc4.lambda_max() == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(fc4.lambda2() <= fc4.lambda_max());
}
