#pragma once

#include <cmath>
#include <cstddef>
#include <deque>
#include <utility>
#include <vector>

namespace pasldpc {

// Gauss-Hermite rule for the weight exp(-t^2) on (-inf, inf).
struct GaussHermite {
    std::vector<double> nodes;
    std::vector<double> weights;

    // To integrate f against a Gaussian N(mu, sigma^2):
    //   E[f] = 1/sqrt(pi) * sum_j w_j f(mu + sqrt(2)*sigma*t_j)
    static const GaussHermite& rule(std::size_t n);
};

inline GaussHermite make_gauss_hermite(std::size_t n) {
    // Newton iteration on the orthonormal Hermite recurrence; the scaled
    // recurrence keeps values bounded for large n.
    constexpr double kEps = 1e-14;
    const double pi_m4 = 0.7511255444649425;  // pi^{-1/4}
    GaussHermite gh;
    gh.nodes.assign(n, 0.0);
    gh.weights.assign(n, 0.0);
    const std::size_t half = (n + 1) / 2;
    double z = 0.0, pp = 0.0;
    for (std::size_t i = 0; i < half; ++i) {
        if (i == 0) {
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
        } else if (i == 1) {
            z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        } else if (i == 2) {
            z = 1.86 * z - 0.86 * gh.nodes[0];
        } else if (i == 3) {
            z = 1.91 * z - 0.91 * gh.nodes[1];
        } else {
            z = 2.0 * z - gh.nodes[i - 2];
        }
        for (int it = 0; it < 100; ++it) {
            double p1 = pi_m4;
            double p2 = 0.0;
            for (std::size_t j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double dz = p1 / pp;
            z -= dz;
            if (std::abs(dz) <= kEps) break;
        }
        gh.nodes[i] = z;
        gh.nodes[n - 1 - i] = -z;
        gh.weights[i] = 2.0 / (pp * pp);
        gh.weights[n - 1 - i] = gh.weights[i];
    }
    return gh;
}

inline const GaussHermite& GaussHermite::rule(std::size_t n) {
    static thread_local std::deque<std::pair<std::size_t, GaussHermite>> cache;
    for (auto& entry : cache)
        if (entry.first == n) return entry.second;
    cache.emplace_back(n, make_gauss_hermite(n));
    return cache.back().second;
}

// log2(1 + exp(x)) without overflow.
inline double log2_1p_exp(double x) {
    constexpr double kInvLn2 = 1.4426950408889634;
    if (x > 36.0) return x * kInvLn2;
    return std::log1p(std::exp(x)) * kInvLn2;
}

}  // namespace pasldpc
