#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "uqq/graph.hpp"
#include "uqq/rng.hpp"

namespace uqq {

/// Depth-p variational angles, flattened everywhere as
/// (gamma_1..gamma_p, beta_1..beta_p).
struct AngleVector {
    std::vector<double> gammas;
    std::vector<double> betas;

    AngleVector() = default;
    AngleVector(std::vector<double> g, std::vector<double> b)
        : gammas(std::move(g)), betas(std::move(b)) {}

    int depth() const { return static_cast<int>(gammas.size()); }
    std::vector<double> flat() const;
    static AngleVector from_flat(std::span<const double> values);
};

/// Exhaustive cut-value table: costs[z] = number of edges cut by the
/// bitstring z (bit i of z = side of vertex i).
struct CutTable {
    int n = 0;
    int m = 0;
    int max_cost = 0;
    std::vector<std::uint16_t> costs;
};

CutTable cut_table(const Graph& g);  // requires n <= 24

struct Statevector {
    int n = 0;
    std::vector<std::complex<double>> amp;

    double norm_sq() const;
};

/// Applies the alternating cost-phase / mixer-rotation circuit to the
/// uniform superposition. The cost unitary acts as a diagonal phase looked
/// up from the cut table; the mixer as a tensor product of single-qubit
/// rotations. Bit-exact equivalent of the gate-level circuit for this
/// ansatz.
Statevector evolve(const CutTable& ct, const AngleVector& theta);

/// <C> = sum_z costs[z] |a_z|^2, accumulated with compensated summation.
double expectation(const CutTable& ct, const Statevector& psi);

/// Convenience wrapper building the cut table; prefer the table overloads
/// in loops.
double expectation(const Graph& g, const AngleVector& theta);

/// Per-layer depolarizing strength and optional finite shot count.
/// shots absent = exact expectation values.
struct NoiseModel {
    double epsilon = 0.0;
    std::optional<int> shots;
};

/// nu = 1 - (1 - epsilon)^(2p)
double noise_strength(double epsilon, int p);

/// Exact affine map (1 - nu) F + nu m/2 of the global depolarizing channel.
double noisy_expectation(double exact_f, int m, int p, const NoiseModel& noise);
double noisy_expectation(const Graph& g, const AngleVector& theta, const NoiseModel& noise);

/// i.i.d. bitstring draws from |a_z|^2; deterministic per rng stream.
std::vector<std::uint32_t> sample_bitstrings(const Statevector& psi, int shots, Rng& rng);

/// Draws from the depolarized output distribution
/// (1 - nu) |a_z|^2 + nu / 2^n.
std::vector<std::uint32_t> sample_noisy_bitstrings(const Statevector& psi, const CutTable& ct,
                                                   double epsilon, int p, int shots, Rng& rng);

/// Shot estimator: mean cut value over the sampled bitstrings.
double shot_estimate(const CutTable& ct, std::span<const std::uint32_t> samples);

/// Central finite differences of the exact expectation, step h per
/// coordinate. Test and diagnostics support.
std::vector<double> finite_diff_gradient(const Graph& g, const AngleVector& theta, double h = 1e-5);

}  // namespace uqq
