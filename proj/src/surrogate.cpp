#include "pasldpc/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pasldpc/errors.hpp"
#include "pasldpc/quadrature.hpp"

namespace pasldpc {

namespace {

constexpr double kSqrtPi = 1.7724538509055160;

double biawgn_cond_entropy_n(double sigma, std::size_t nodes) {
    // Equivalent BPSK view: y = 1 + n, n ~ N(0, sigma^2); LLR = 2y/sigma^2.
    // H(B|L) = E[log2(1 + exp(-2(1+n)/sigma^2))].
    const auto& gh = GaussHermite::rule(nodes);
    const double sqrt2 = std::sqrt(2.0);
    double h = 0.0;
    for (std::size_t j = 0; j < gh.nodes.size(); ++j) {
        const double n = sqrt2 * sigma * gh.nodes[j];
        h += gh.weights[j] * log2_1p_exp(-2.0 * (1.0 + n) / (sigma * sigma));
    }
    return std::clamp(h / kSqrtPi, 0.0, 1.0);
}

}  // namespace

double biawgn_cond_entropy(double sigma) {
    if (!(sigma > 0.0)) {
        throw Error(ErrorKind::invalid_parameter, "sigma must be positive");
    }
    return biawgn_cond_entropy_n(sigma, 128);
}

SurrogateSet fit_surrogates(const BitChannelStats& stats, double snr_db, double se) {
    SurrogateSet set;
    set.snr_db = snr_db;
    set.se = se;
    set.sigmas.reserve(stats.cond_entropy.size());
    set.clamped.reserve(stats.cond_entropy.size());
    for (double target : stats.cond_entropy) {
        if (target >= 1.0 - 1e-12) {
            throw Error(ErrorKind::degenerate_channel,
                        "bit-channel entropy too close to 1, sigma unbounded");
        }
        if (target <= 1e-12) {
            set.sigmas.push_back(1e-6);
            set.clamped.push_back(true);
            continue;
        }
        // H(B|L) is strictly increasing in sigma on [1e-6, 1e3].
        double lo = 1e-6, hi = 1e3;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double h = biawgn_cond_entropy(mid);
            if (std::abs(h - target) <= 1e-9 && it > 40) break;
            if (h < target) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        set.sigmas.push_back(0.5 * (lo + hi));
        set.clamped.push_back(false);
    }
    return set;
}

SurrogateSet fit_surrogates(const ShapedSource& source) {
    const BitChannelStats stats = bit_channel_stats(source);
    return fit_surrogates(stats, linear_to_db(source.snr_linear()),
                          source.pmf.entropy_bits());
}

std::vector<int> ordering_signature(const SurrogateSet& set) {
    std::vector<int> order(set.sigmas.size());
    std::iota(order.begin(), order.end(), 1);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return set.sigmas[a - 1] < set.sigmas[b - 1];
    });
    return order;
}

}  // namespace pasldpc
