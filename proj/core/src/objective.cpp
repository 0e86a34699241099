#include "uqq/objective.hpp"

#include <stdexcept>

namespace uqq {

MeteredObjective::MeteredObjective(const Graph& g, const NoiseModel& noise, std::uint64_t seed)
    : graph_(g), table_(cut_table(g)), noise_(noise), rng_(seed) {}

double MeteredObjective::operator()(std::span<const double> flat_theta) {
    const AngleVector theta = AngleVector::from_flat(flat_theta);
    const Statevector psi = evolve(table_, theta);

    double value = 0.0;
    if (noise_.shots) {
        const auto samples = sample_noisy_bitstrings(psi, table_, noise_.epsilon,
                                                     theta.depth(), *noise_.shots, rng_);
        for (auto z : samples) best_cut_ = std::max<int>(best_cut_, table_.costs[z]);
        value = shot_estimate(table_, samples);
    } else {
        value = noisy_expectation(expectation(table_, psi), table_.m, theta.depth(), noise_);
    }

    trace_.emplace_back(std::vector<double>(flat_theta.begin(), flat_theta.end()), value);
    if (value > best_f_) {
        best_f_ = value;
        best_theta_.assign(flat_theta.begin(), flat_theta.end());
    }
    return value;
}

double MeteredObjective::final_ratio(std::span<const double> flat_theta, int fallback_shots) {
    if (table_.max_cost == 0) return 1.0;  // edgeless graph: any bitstring is optimal
    const AngleVector theta = AngleVector::from_flat(flat_theta);
    const Statevector psi = evolve(table_, theta);
    const int shots = noise_.shots ? *noise_.shots : fallback_shots;
    const auto samples =
        sample_noisy_bitstrings(psi, table_, noise_.epsilon, theta.depth(), shots, rng_);
    for (auto z : samples) best_cut_ = std::max<int>(best_cut_, table_.costs[z]);
    return static_cast<double>(best_cut_) / static_cast<double>(table_.max_cost);
}

}  // namespace uqq
