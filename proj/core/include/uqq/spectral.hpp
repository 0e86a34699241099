#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "uqq/graph.hpp"

namespace uqq {

/// Dense symmetric eigendecomposition result; eigenvalues ascending,
/// eigenvectors stored column-wise (vectors[i][j] = entry i of eigenvector j).
struct EigenSystem {
    std::vector<double> values;
    std::vector<std::vector<double>> vectors;  // [row][col]
};

/// Cyclic Jacobi rotations on a dense symmetric matrix. Converges when the
/// off-diagonal Frobenius norm drops below 1e-10; intended for the small
/// Laplacians used here (n <= 24).
EigenSystem jacobi_eigensystem(const std::vector<std::vector<double>>& sym);

/// Laplacian L = D - A eigendecomposition with ascending eigenvalues and
/// orthonormal eigenvectors.
EigenSystem laplacian_eigs(const Graph& g);

struct SpectralEncoding {
    int k = 0;
    std::vector<std::vector<double>> vectors;  // n x k, zero-padded if k > n-1
    std::vector<double> eigenvalues;           // k entries (0 for padding)
};

/// Laplacian positional encoding from the k smallest nontrivial
/// eigenvectors. With sign_seed != 0, each column is multiplied by an
/// independent random sign (training-time augmentation); with sign_seed == 0
/// the deterministic convention "first entry with |value| > 1e-9 positive"
/// is applied.
SpectralEncoding spectral_encoding(const Graph& g, int k, std::uint64_t sign_seed = 0);

/// Node feature matrix: column 0 is d_v / n, columns 1..k the encoding.
std::vector<std::vector<double>> node_features(const Graph& g, const SpectralEncoding& enc);

/// (density, mean degree, degree std, mean local clustering, lambda_2,
/// lambda_n, n, m) - the feature vector used by the k-NN baseline.
struct HandcraftedFeatures {
    std::array<double, 8> v{};
    double density() const { return v[0]; }
    double lambda2() const { return v[4]; }
    double lambda_max() const { return v[5]; }
};

HandcraftedFeatures handcrafted(const Graph& g);

}  // namespace uqq
