#include "uqq/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace uqq {

namespace {

struct Vertex {
    std::vector<double> x;
    double f;
};

}  // namespace

NelderMeadResult nelder_mead(const Objective& fn, std::span<const double> x0,
                             const NelderMeadOptions& opts, const Projector& projector) {
    const int d = static_cast<int>(x0.size());
    if (d < 1) throw std::invalid_argument("nelder_mead: empty start point");

    auto prepare = [&](std::vector<double> x) {
        if (projector) x = projector(x);
        return x;
    };
    auto evaluate = [&](const std::vector<double>& x) {
        const double f = fn(x);
        if (!std::isfinite(f)) throw std::runtime_error("nelder_mead: non-finite objective");
        return f;
    };

    std::vector<Vertex> simplex;
    simplex.reserve(d + 1);
    {
        std::vector<double> x(x0.begin(), x0.end());
        x = prepare(std::move(x));
        simplex.push_back({x, evaluate(x)});
        for (int j = 0; j < d; ++j) {
            std::vector<double> xj(x0.begin(), x0.end());
            const double step =
                opts.initial_steps.size() == 1
                    ? opts.initial_steps[0]
                    : opts.initial_steps.at(static_cast<std::size_t>(j));
            xj[j] += step;
            xj = prepare(std::move(xj));
            simplex.push_back({xj, evaluate(xj)});
        }
    }

    auto sort_desc = [&]() {
        std::stable_sort(simplex.begin(), simplex.end(),
                         [](const Vertex& a, const Vertex& b) { return a.f > b.f; });
    };
    sort_desc();

    NelderMeadResult result;
    int iter = 0;
    for (; iter < opts.max_iters; ++iter) {
        // convergence: simplex diameter and value spread
        double diam = 0.0;
        for (int v = 1; v <= d; ++v) {
            double dist = 0.0;
            for (int j = 0; j < d; ++j) {
                const double diff = simplex[v].x[j] - simplex[0].x[j];
                dist += diff * diff;
            }
            diam = std::max(diam, std::sqrt(dist));
        }
        const double spread = std::abs(simplex[0].f - simplex[d].f);
        if (diam < opts.x_atol && spread < opts.f_atol) {
            result.converged = true;
            break;
        }

        std::vector<double> centroid(d, 0.0);
        for (int v = 0; v < d; ++v)
            for (int j = 0; j < d; ++j) centroid[j] += simplex[v].x[j] / d;

        auto along = [&](double coeff) {
            std::vector<double> x(d);
            for (int j = 0; j < d; ++j)
                x[j] = centroid[j] + coeff * (centroid[j] - simplex[d].x[j]);
            return prepare(std::move(x));
        };

        const auto xr = along(opts.reflection);
        const double fr = evaluate(xr);

        if (fr > simplex[0].f) {
            const auto xe = along(opts.expansion);
            const double fe = evaluate(xe);
            if (fe > fr)
                simplex[d] = {xe, fe};
            else
                simplex[d] = {xr, fr};
        } else if (fr > simplex[d - 1].f) {
            simplex[d] = {xr, fr};
        } else {
            const bool outside = fr > simplex[d].f;
            const auto xc = along(outside ? opts.contraction : -opts.contraction);
            const double fc = evaluate(xc);
            if (fc > (outside ? fr : simplex[d].f)) {
                simplex[d] = {xc, fc};
            } else {
                for (int v = 1; v <= d; ++v) {
                    std::vector<double> x(d);
                    for (int j = 0; j < d; ++j)
                        x[j] = simplex[0].x[j] +
                               opts.shrink * (simplex[v].x[j] - simplex[0].x[j]);
                    x = prepare(std::move(x));
                    simplex[v] = {x, evaluate(x)};
                }
            }
        }
        sort_desc();
    }

    result.best_x = simplex[0].x;
    result.best_f = simplex[0].f;
    result.iterations = iter;
    return result;
}

}  // namespace uqq
