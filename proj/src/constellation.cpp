#include "pasldpc/constellation.hpp"

#include <cmath>

#include "pasldpc/errors.hpp"

namespace pasldpc {

double SymbolPmf::entropy_bits() const {
    double h = 0.0;
    for (double p : probs) {
        if (p > 0.0) h -= p * std::log2(p);
    }
    return h;
}

double ShapedSource::snr_linear() const {
    return delta * delta * second_moment(constellation, pmf);
}

AskConstellation make_ask(int m) {
    if (m < 2 || m > 8) {
        throw Error(ErrorKind::invalid_parameter, "make_ask requires 2 <= m <= 8");
    }
    AskConstellation c;
    c.m = m;
    const int n = 1 << m;
    c.points.resize(n);
    c.labels.resize(n);
    for (int i = 0; i < n; ++i) {
        const int x = 2 * i - (n - 1);  // odd integers ascending
        c.points[i] = static_cast<double>(x);
        const uint32_t sign_bit = x > 0 ? 1u : 0u;
        const uint32_t amp_index = static_cast<uint32_t>((std::abs(x) - 1) / 2);
        const uint32_t gray = amp_index ^ (amp_index >> 1);  // BRGC, index 0 -> |x|=1
        c.labels[i] = (sign_bit << (m - 1)) | gray;
    }
    return c;
}

SymbolPmf mb_pmf(const AskConstellation& c, double nu) {
    if (!std::isfinite(nu) || nu < 0.0) {
        throw Error(ErrorKind::invalid_parameter, "mb_pmf requires finite nu >= 0");
    }
    SymbolPmf pmf;
    pmf.probs.resize(c.points.size());
    // Subtract the minimum exponent so the weights never underflow together.
    double sum = 0.0;
    for (std::size_t i = 0; i < c.points.size(); ++i) {
        const double x = c.points[i];
        pmf.probs[i] = std::exp(-nu * (x * x - 1.0));
        sum += pmf.probs[i];
    }
    for (double& p : pmf.probs) p /= sum;
    return pmf;
}

SymbolPmf mb_from_entropy(const AskConstellation& c, double target_entropy) {
    if (!(target_entropy > 1.0) || target_entropy > static_cast<double>(c.m)) {
        throw Error(ErrorKind::infeasible_entropy,
                    "target entropy must lie in (1, m]");
    }
    // H(nu) is continuous and strictly decreasing; bracket [0, 10] covers
    // entropies down to just above 1 bit for all supported m.
    double lo = 0.0, hi = 10.0;
    if (mb_pmf(c, hi).entropy_bits() > target_entropy) {
        throw Error(ErrorKind::infeasible_entropy, "entropy target below bracket");
    }
    SymbolPmf best = mb_pmf(c, 0.0);
    if (std::abs(best.entropy_bits() - target_entropy) <= 1e-9) return best;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        SymbolPmf pmf = mb_pmf(c, mid);
        const double h = pmf.entropy_bits();
        if (std::abs(h - target_entropy) <= 1e-9) return pmf;
        if (h > target_entropy) {
            lo = mid;
        } else {
            hi = mid;
        }
        best = std::move(pmf);
    }
    return best;
}

SymbolPmf operating_pmf(double rate_se, double code_rate, int m) {
    const AskConstellation c = make_ask(m);
    if (!(rate_se > 0.0) || rate_se > code_rate * m) {
        throw Error(ErrorKind::invalid_parameter, "spectral efficiency out of range");
    }
    const double target = rate_se + (1.0 - code_rate) * m;
    return mb_from_entropy(c, target);
}

double second_moment(const AskConstellation& c, const SymbolPmf& pmf) {
    double e2 = 0.0;
    for (std::size_t i = 0; i < c.points.size(); ++i) {
        e2 += pmf.probs[i] * c.points[i] * c.points[i];
    }
    return e2;
}

ShapedSource scale_to_snr(const AskConstellation& c, const SymbolPmf& pmf, double snr_linear) {
    if (!(snr_linear > 0.0)) {
        throw Error(ErrorKind::invalid_parameter, "snr must be positive");
    }
    ShapedSource s;
    s.constellation = c;
    s.pmf = pmf;
    s.delta = std::sqrt(snr_linear / second_moment(c, pmf));
    return s;
}

std::vector<double> amplitude_marginal(const AskConstellation& c, const SymbolPmf& pmf) {
    const int half = c.size() / 2;
    std::vector<double> pa(half, 0.0);
    for (int i = 0; i < c.size(); ++i) {
        const int j = (static_cast<int>(std::abs(c.points[i])) - 1) / 2;
        pa[j] += pmf.probs[i];
    }
    return pa;
}

}  // namespace pasldpc
