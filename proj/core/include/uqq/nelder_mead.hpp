#pragma once

#include <functional>
#include <span>
#include <vector>

namespace uqq {

struct NelderMeadOptions {
    int max_iters = 60;
    double x_atol = 1e-4;
    double f_atol = 1e-6;
    double reflection = 1.0;
    double expansion = 2.0;
    double contraction = 0.5;
    double shrink = 0.5;
    /// Per-axis step for the initial simplex; a single entry is broadcast.
    std::vector<double> initial_steps{0.1};
};

struct NelderMeadResult {
    std::vector<double> best_x;
    double best_f = 0.0;
    int iterations = 0;
    bool converged = false;  // tolerance reached before the iteration cap
};

using Objective = std::function<double(std::span<const double>)>;
using Projector = std::function<std::vector<double>(std::span<const double>)>;

/// Simplex search maximizing `fn`. When a projector is supplied, every
/// proposed vertex (initial simplex, reflection, expansion, contraction,
/// shrink) is projected before evaluation, so all evaluated points stay
/// feasible. Terminates at the iteration cap or when the simplex diameter
/// drops below x_atol and the value spread below f_atol simultaneously.
/// Throws on non-finite objective values.
NelderMeadResult nelder_mead(const Objective& fn, std::span<const double> x0,
                             const NelderMeadOptions& opts, const Projector& projector = {});

}  // namespace uqq
