#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "uqq/qaoa.hpp"

namespace uqq {

/// The single evaluation-metering implementation shared by every method.
/// Each call evaluates the (possibly noisy / shot-sampled) objective,
/// increments the counter, appends to the trace and tracks the best value
/// seen. In shot mode every evaluation also accumulates the best measured
/// bitstring; in exact mode bitstrings are only drawn by the final
/// measurement.
class MeteredObjective {
  public:
    MeteredObjective(const Graph& g, const NoiseModel& noise, std::uint64_t seed);

    double operator()(std::span<const double> flat_theta);
    double operator()(const AngleVector& theta) { return (*this)(theta.flat()); }

    long evals() const { return static_cast<long>(trace_.size()); }
    const std::vector<std::pair<std::vector<double>, double>>& trace() const { return trace_; }
    double best_f() const { return best_f_; }
    const std::vector<double>& best_theta() const { return best_theta_; }
    int best_cut() const { return best_cut_; }
    int max_cut() const { return table_.max_cost; }
    const CutTable& table() const { return table_; }
    const Graph& graph() const { return graph_; }

    /// Final measurement at theta: draws noise.shots (or fallback_shots in
    /// exact mode) bitstrings and returns the best-sampled ratio over the
    /// whole run, max C(z)/C_max. Not counted as an evaluation.
    double final_ratio(std::span<const double> flat_theta, int fallback_shots = 256);

  private:
    Graph graph_;
    CutTable table_;
    NoiseModel noise_;
    Rng rng_;
    std::vector<std::pair<std::vector<double>, double>> trace_;
    double best_f_ = -1e300;
    std::vector<double> best_theta_;
    int best_cut_ = 0;
};

}  // namespace uqq
