#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "pasldpc/constellation.hpp"
#include "pasldpc/errors.hpp"
#include "pasldpc/rates.hpp"
#include "pasldpc/surrogate.hpp"

using namespace pasldpc;

namespace {

// Fine composite-trapezoid oracle for H(B|L) of the binary-input AWGN channel
// with noise std sigma (inputs +-1, uniform).
double biawgn_entropy_oracle(double sigma, int samples) {
    const double lo = -1.0 - 12.0 * sigma;
    const double hi = 1.0 + 12.0 * sigma;
    const double step = (hi - lo) / (samples - 1);
    const double norm = 1.0 / (sigma * std::sqrt(2.0 * M_PI));
    double h = 0.0;
    for (int t = 0; t < samples; ++t) {
        const double y = lo + t * step;
        const double w = (t == 0 || t == samples - 1) ? 0.5 * step : step;
        const double p_plus = norm * std::exp(-0.5 * (y - 1.0) * (y - 1.0) / (sigma * sigma));
        const double p_minus = norm * std::exp(-0.5 * (y + 1.0) * (y + 1.0) / (sigma * sigma));
        const double py = 0.5 * (p_plus + p_minus);
        if (py <= 0.0) continue;
        const double q = 0.5 * p_plus / py;
        double hb = 0.0;
        if (q > 0.0 && q < 1.0) hb = -q * std::log2(q) - (1.0 - q) * std::log2(1.0 - q);
        h += w * py * hb;
    }
    return h;
}

}  // namespace

TEST_CASE("biawgn conditional entropy limits and oracle") {
    CHECK(biawgn_cond_entropy(1e-3) < 1e-6);
    CHECK(biawgn_cond_entropy(1e3) > 0.999);
    CHECK(std::abs(biawgn_cond_entropy(1.0) - biawgn_entropy_oracle(1.0, 1 << 20)) < 1e-8);
    CHECK(std::abs(biawgn_cond_entropy(0.5) - biawgn_entropy_oracle(0.5, 1 << 20)) < 1e-8);
}

TEST_CASE("biawgn conditional entropy strictly increasing in sigma") {
    double prev = biawgn_cond_entropy(0.05);
    for (int i = 1; i <= 60; ++i) {
        const double cur = biawgn_cond_entropy(0.05 + 0.1 * i);
        CHECK(cur > prev + 1e-12);
        prev = cur;
    }
}

TEST_CASE("surrogate fit roundtrips the conditional entropy targets") {
    const AskConstellation c = make_ask(4);
    const SymbolPmf pmf = operating_pmf(2.1, 13.0 / 16.0, 4);
    const double snr = bmd_rate_inverse(c, pmf, 2.1);
    const ShapedSource source = scale_to_snr(c, pmf, snr);
    const BitChannelStats stats = bit_channel_stats(source);
    const SurrogateSet set = fit_surrogates(source);
    REQUIRE(set.sigmas.size() == 4);
    for (int i = 0; i < 4; ++i) {
        CHECK(set.sigmas[i] > 0.0);
        CHECK(std::isfinite(set.sigmas[i]));
        CHECK(std::abs(biawgn_cond_entropy(set.sigmas[i]) - stats.cond_entropy[i]) < 1e-8);
    }
}

TEST_CASE("fit hits arbitrary targets including 0.5") {
    for (double target : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        BitChannelStats stats;
        stats.cond_entropy = {target};
        stats.marginal_entropy = {1.0};
        stats.label_entropy = 1.0;
        const SurrogateSet set = fit_surrogates(stats, 0.0, 0.0);
        CHECK(std::abs(biawgn_cond_entropy(set.sigmas[0]) - target) < 1e-8);
    }
}

TEST_CASE("degenerate and clamped targets") {
    BitChannelStats stats;
    stats.cond_entropy = {1.0 - 1e-13};
    stats.marginal_entropy = {1.0};
    CHECK_THROWS_AS(fit_surrogates(stats, 0.0, 0.0), Error);

    stats.cond_entropy = {1e-13};
    const SurrogateSet set = fit_surrogates(stats, 0.0, 0.0);
    CHECK(set.sigmas[0] == doctest::Approx(1e-6));
    CHECK(set.clamped[0]);
}

TEST_CASE("high-SNR surrogates are all strong") {
    const AskConstellation c = make_ask(4);
    const SymbolPmf uniform = mb_pmf(c, 0.0);
    const SurrogateSet set =
        fit_surrogates(scale_to_snr(c, uniform, db_to_linear(30.0)));
    for (double s : set.sigmas) CHECK(s < 0.6);
}

TEST_CASE("ordering signature basics") {
    SurrogateSet set;
    set.sigmas = {0.4, 0.4, 0.4, 0.4};
    set.clamped = {false, false, false, false};
    CHECK(ordering_signature(set) == std::vector<int>{1, 2, 3, 4});
    set.sigmas = {0.5, 0.2, 0.3, 0.4};
    CHECK(ordering_signature(set) == std::vector<int>{2, 3, 4, 1});
}

TEST_CASE("sign-level ordering crossovers along the operating curve") {
    const AskConstellation c = make_ask(4);
    auto rank_diff = [&](double r, int other_level) {
        const SymbolPmf pmf = operating_pmf(r, 13.0 / 16.0, 4);
        const SurrogateSet set = fit_surrogates(scale_to_snr(c, pmf, bmd_rate_inverse(c, pmf, r)));
        return set.sigmas[0] - set.sigmas[other_level - 1];  // sigma1 - sigma_other
    };
    // sigma1 vs sigma4 flips near R = 1.1, sigma1 vs sigma3 near R = 2.1.
    CHECK(rank_diff(0.8, 4) * rank_diff(1.4, 4) < 0.0);
    CHECK(rank_diff(1.8, 3) * rank_diff(2.4, 3) < 0.0);
}
