#include "uqq/qaoa.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uqq {

std::vector<double> AngleVector::flat() const {
    std::vector<double> out;
    out.reserve(gammas.size() + betas.size());
    out.insert(out.end(), gammas.begin(), gammas.end());
    out.insert(out.end(), betas.begin(), betas.end());
    return out;
}

AngleVector AngleVector::from_flat(std::span<const double> values) {
    if (values.size() % 2 != 0)
        throw std::invalid_argument("AngleVector::from_flat: odd length");
    const std::size_t p = values.size() / 2;
    AngleVector theta;
    theta.gammas.assign(values.begin(), values.begin() + p);
    theta.betas.assign(values.begin() + p, values.end());
    return theta;
}

CutTable cut_table(const Graph& g) {
    if (g.n > 24) throw std::invalid_argument("cut_table: n > 24 not supported");
    if (g.n < 1) throw std::invalid_argument("cut_table: empty graph");
    CutTable ct;
    ct.n = g.n;
    ct.m = g.m();
    const std::size_t dim = std::size_t{1} << g.n;
    ct.costs.assign(dim, 0);
    for (auto [i, j] : g.edges) {
        const std::uint32_t bi = std::uint32_t{1} << i;
        const std::uint32_t bj = std::uint32_t{1} << j;
        for (std::size_t z = 0; z < dim; ++z)
            ct.costs[z] += ((z & bi) != 0) != ((z & bj) != 0);
    }
    ct.max_cost = 0;
    for (auto c : ct.costs) ct.max_cost = std::max<int>(ct.max_cost, c);
    return ct;
}

double Statevector::norm_sq() const {
    double s = 0.0, comp = 0.0;
    for (const auto& a : amp) {
        const double term = std::norm(a) - comp;
        const double next = s + term;
        comp = (next - s) - term;
        s = next;
    }
    return s;
}

Statevector evolve(const CutTable& ct, const AngleVector& theta) {
    const int n = ct.n;
    const std::size_t dim = std::size_t{1} << n;
    Statevector psi;
    psi.n = n;
    psi.amp.assign(dim, std::complex<double>(std::pow(2.0, -0.5 * n), 0.0));

    std::vector<std::complex<double>> phase_lut(ct.max_cost + 1);
    for (int layer = 0; layer < theta.depth(); ++layer) {
        const double gamma = theta.gammas[layer];
        const double beta = theta.betas[layer];

        for (int c = 0; c <= ct.max_cost; ++c)
            phase_lut[c] = std::exp(std::complex<double>(0.0, -gamma * c));
        for (std::size_t z = 0; z < dim; ++z) psi.amp[z] *= phase_lut[ct.costs[z]];

        const double c = std::cos(beta);
        const std::complex<double> ms(0.0, -std::sin(beta));
        for (int q = 0; q < n; ++q) {
            const std::size_t bit = std::size_t{1} << q;
            for (std::size_t base = 0; base < dim; base += 2 * bit) {
                for (std::size_t off = 0; off < bit; ++off) {
                    const std::size_t i0 = base + off;
                    const std::size_t i1 = i0 + bit;
                    const std::complex<double> a0 = psi.amp[i0];
                    const std::complex<double> a1 = psi.amp[i1];
                    psi.amp[i0] = c * a0 + ms * a1;
                    psi.amp[i1] = ms * a0 + c * a1;
                }
            }
        }
    }
    return psi;
}

double expectation(const CutTable& ct, const Statevector& psi) {
    if (psi.amp.size() != ct.costs.size())
        throw std::invalid_argument("expectation: table/state size mismatch");
    double s = 0.0, comp = 0.0;
    for (std::size_t z = 0; z < ct.costs.size(); ++z) {
        const double term = ct.costs[z] * std::norm(psi.amp[z]) - comp;
        const double next = s + term;
        comp = (next - s) - term;
        s = next;
    }
    return s;
}

double expectation(const Graph& g, const AngleVector& theta) {
    const CutTable ct = cut_table(g);
    return expectation(ct, evolve(ct, theta));
}

double noise_strength(double epsilon, int p) {
    if (epsilon < 0.0 || epsilon > 1.0)
        throw std::invalid_argument("noise_strength: epsilon outside [0, 1]");
    return 1.0 - std::pow(1.0 - epsilon, 2.0 * p);
}

double noisy_expectation(double exact_f, int m, int p, const NoiseModel& noise) {
    const double nu = noise_strength(noise.epsilon, p);
    return (1.0 - nu) * exact_f + nu * (0.5 * m);
}

double noisy_expectation(const Graph& g, const AngleVector& theta, const NoiseModel& noise) {
    return noisy_expectation(expectation(g, theta), g.m(), theta.depth(), noise);
}

namespace {

std::vector<double> cumulative_probs(const Statevector& psi) {
    std::vector<double> cum(psi.amp.size());
    double acc = 0.0;
    for (std::size_t z = 0; z < psi.amp.size(); ++z) {
        acc += std::norm(psi.amp[z]);
        cum[z] = acc;
    }
    return cum;
}

std::uint32_t draw_from_cum(const std::vector<double>& cum, double u) {
    const double target = u * cum.back();
    auto it = std::lower_bound(cum.begin(), cum.end(), target);
    if (it == cum.end()) --it;
    return static_cast<std::uint32_t>(it - cum.begin());
}

}  // namespace

std::vector<std::uint32_t> sample_bitstrings(const Statevector& psi, int shots, Rng& rng) {
    if (shots < 1) throw std::invalid_argument("sample_bitstrings: shots must be >= 1");
    const auto cum = cumulative_probs(psi);
    std::vector<std::uint32_t> out(shots);
    for (int s = 0; s < shots; ++s) out[s] = draw_from_cum(cum, rng.uniform());
    return out;
}

std::vector<std::uint32_t> sample_noisy_bitstrings(const Statevector& psi, const CutTable& ct,
                                                   double epsilon, int p, int shots, Rng& rng) {
    if (shots < 1) throw std::invalid_argument("sample_noisy_bitstrings: shots must be >= 1");
    const double nu = noise_strength(epsilon, p);
    const auto cum = cumulative_probs(psi);
    const std::size_t dim = ct.costs.size();
    std::vector<std::uint32_t> out(shots);
    for (int s = 0; s < shots; ++s) {
        if (nu > 0.0 && rng.uniform() < nu)
            out[s] = static_cast<std::uint32_t>(rng.uniform_int(dim));
        else
            out[s] = draw_from_cum(cum, rng.uniform());
    }
    return out;
}

double shot_estimate(const CutTable& ct, std::span<const std::uint32_t> samples) {
    if (samples.empty()) throw std::invalid_argument("shot_estimate: no samples");
    double s = 0.0;
    for (auto z : samples) s += ct.costs[z];
    return s / static_cast<double>(samples.size());
}

std::vector<double> finite_diff_gradient(const Graph& g, const AngleVector& theta, double h) {
    if (h <= 0.0) throw std::invalid_argument("finite_diff_gradient: h must be positive");
    const CutTable ct = cut_table(g);
    std::vector<double> flat = theta.flat();
    std::vector<double> grad(flat.size());
    for (std::size_t j = 0; j < flat.size(); ++j) {
        const double orig = flat[j];
        flat[j] = orig + h;
        const double fp = expectation(ct, evolve(ct, AngleVector::from_flat(flat)));
        flat[j] = orig - h;
        const double fm = expectation(ct, evolve(ct, AngleVector::from_flat(flat)));
        flat[j] = orig;
        grad[j] = (fp - fm) / (2.0 * h);
    }
    return grad;
}

}  // namespace uqq
