#include "pasldpc/rates.hpp"

#include <algorithm>
#include <cmath>

#include "pasldpc/errors.hpp"
#include "pasldpc/quadrature.hpp"

namespace pasldpc {

namespace {

constexpr double kSqrtPi = 1.7724538509055160;

// Posterior P(B_i = b | Y = y) for the mixture channel y = delta*x + n.
// All densities share the 1/sqrt(2pi) factor, so it cancels.
double posterior(const ShapedSource& s, int level, int b, double y) {
    double num = 0.0, den = 0.0;
    const auto& c = s.constellation;
    for (int i = 0; i < c.size(); ++i) {
        const double d = y - s.delta * c.points[i];
        const double w = s.pmf.probs[i] * std::exp(-0.5 * d * d);
        den += w;
        if (c.bit(i, level) == b) num += w;
    }
    if (den <= 0.0 || num <= 0.0) return 0.0;
    return num / den;
}

// H(B_i|Y) by Gauss-Hermite quadrature per mixture component.
double cond_entropy_gh(const ShapedSource& s, int level, std::size_t nodes) {
    const auto& gh = GaussHermite::rule(nodes);
    const auto& c = s.constellation;
    double h = 0.0;
    const double sqrt2 = std::sqrt(2.0);
    for (int i = 0; i < c.size(); ++i) {
        if (s.pmf.probs[i] <= 0.0) continue;
        const int b = c.bit(i, level);
        double acc = 0.0;
        for (std::size_t j = 0; j < gh.nodes.size(); ++j) {
            const double y = s.delta * c.points[i] + sqrt2 * gh.nodes[j];
            const double p = posterior(s, level, b, y);
            acc += gh.weights[j] * (p > 0.0 ? std::log2(p) : -60.0);
        }
        h -= s.pmf.probs[i] * acc / kSqrtPi;
    }
    return std::clamp(h, 0.0, 1.0);
}

// Composite-trapezoid fallback over [delta*min - 8, delta*max + 8].
double cond_entropy_trapezoid(const ShapedSource& s, int level, int samples) {
    const auto& c = s.constellation;
    const double lo = s.delta * c.points.front() - 8.0;
    const double hi = s.delta * c.points.back() + 8.0;
    const double step = (hi - lo) / (samples - 1);
    const double inv_sqrt2pi = 0.3989422804014327;
    double h = 0.0;
    for (int j = 0; j < samples; ++j) {
        const double y = lo + j * step;
        double integrand = 0.0;
        for (int b = 0; b < 2; ++b) {
            // joint density p(y, B_i = b), up to the shared Gaussian factor
            double joint = 0.0, den = 0.0;
            for (int i = 0; i < c.size(); ++i) {
                const double d = y - s.delta * c.points[i];
                const double w = s.pmf.probs[i] * std::exp(-0.5 * d * d);
                den += w;
                if (c.bit(i, level) == b) joint += w;
            }
            if (joint > 0.0 && den > 0.0) {
                integrand -= inv_sqrt2pi * joint * std::log2(joint / den);
            }
        }
        const double w = (j == 0 || j == samples - 1) ? 0.5 : 1.0;
        h += w * integrand;
    }
    return std::clamp(h * step, 0.0, 1.0);
}

double binary_entropy(double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

}  // namespace

double awgn_capacity(double snr_linear) {
    if (snr_linear < 0.0) {
        throw Error(ErrorKind::invalid_parameter, "snr must be nonnegative");
    }
    return 0.5 * std::log2(1.0 + snr_linear);
}

BitChannelStats bit_channel_stats(const ShapedSource& source) {
    const int m = source.constellation.m;
    BitChannelStats stats;
    stats.cond_entropy.resize(m);
    stats.marginal_entropy.resize(m);
    stats.label_entropy = source.pmf.entropy_bits();
    for (int level = 1; level <= m; ++level) {
        double p0 = 0.0;
        for (int i = 0; i < source.constellation.size(); ++i) {
            if (source.constellation.bit(i, level) == 0) p0 += source.pmf.probs[i];
        }
        stats.marginal_entropy[level - 1] = binary_entropy(p0);

        const double coarse = cond_entropy_gh(source, level, 64);
        const double fine = cond_entropy_gh(source, level, 128);
        if (std::abs(fine - coarse) <= 1e-8) {
            stats.cond_entropy[level - 1] = fine;
        } else {
            const double t1 = cond_entropy_trapezoid(source, level, 1 << 14);
            const double t2 = cond_entropy_trapezoid(source, level, 1 << 15);
            if (std::abs(t2 - t1) > 1e-8) {
                throw Error(ErrorKind::numeric_failure,
                            "bit-channel entropy quadrature did not converge");
            }
            stats.cond_entropy[level - 1] = t2;
        }
    }
    return stats;
}

double bmd_rate(const ShapedSource& source) {
    const BitChannelStats stats = bit_channel_stats(source);
    double sum = 0.0;
    for (double h : stats.cond_entropy) sum += h;
    return std::max(0.0, stats.label_entropy - sum);
}

double bmd_rate_inverse(const AskConstellation& c, const SymbolPmf& pmf, double rate) {
    const double hx = pmf.entropy_bits();
    if (!(rate > 0.0) || rate >= hx) {
        throw Error(ErrorKind::infeasible_rate, "rate must lie in (0, H(X))");
    }
    // Bracket: [capacity SNR for R, +6 dB]. BMD cannot beat capacity, so the
    // lower edge is below the root.
    const double snr_lo = std::pow(2.0, 2.0 * rate) - 1.0;
    const double db_lo = linear_to_db(snr_lo);
    const double db_hi = db_lo + 6.0;
    auto eval = [&](double db) {
        return bmd_rate(scale_to_snr(c, pmf, db_to_linear(db)));
    };
    // Monotonicity probe over the bracket before bisecting.
    double prev = eval(db_lo);
    for (int i = 1; i <= 3; ++i) {
        const double v = eval(db_lo + i * 2.0);
        if (v < prev - 1e-9) {
            throw Error(ErrorKind::numeric_failure, "bmd rate non-monotone on bracket");
        }
        prev = v;
    }
    if (prev < rate) {
        throw Error(ErrorKind::infeasible_rate, "rate unreachable within bracket");
    }
    double lo = db_lo, hi = db_hi;
    for (int it = 0; it < 50; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double v = eval(mid);
        if (std::abs(v - rate) <= 1e-5) return db_to_linear(mid);
        if (v < rate) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return db_to_linear(0.5 * (lo + hi));
}

std::vector<OperatingPoint> operating_curve(double code_rate, int m,
                                            const std::vector<double>& r_grid) {
    const AskConstellation c = make_ask(m);
    std::vector<OperatingPoint> points;
    points.reserve(r_grid.size());
    for (double r : r_grid) {
        OperatingPoint op;
        op.se = r;
        op.pmf = operating_pmf(r, code_rate, m);
        op.snr_capacity_db = linear_to_db(std::pow(2.0, 2.0 * r) - 1.0);
        op.snr_shaped_db = linear_to_db(bmd_rate_inverse(c, op.pmf, r));
        points.push_back(std::move(op));
    }
    return points;
}

std::vector<CurveRow> operating_curve_rows(double code_rate, int m,
                                           const std::vector<double>& r_grid) {
    const AskConstellation c = make_ask(m);
    SymbolPmf uniform;
    uniform.probs.assign(c.size(), 1.0 / c.size());
    std::vector<CurveRow> rows;
    rows.reserve(r_grid.size());
    for (const OperatingPoint& op : operating_curve(code_rate, m, r_grid)) {
        CurveRow row;
        row.se = op.se;
        row.snr_capacity_db = op.snr_capacity_db;
        row.snr_shaped_db = op.snr_shaped_db;
        row.snr_uniform_db = linear_to_db(bmd_rate_inverse(c, uniform, op.se));
        row.gap_shaped_db = row.snr_shaped_db - row.snr_capacity_db;
        row.gap_uniform_db = row.snr_uniform_db - row.snr_capacity_db;
        row.rate_gap_shaped =
            awgn_capacity(db_to_linear(row.snr_shaped_db)) - op.se;
        row.rate_gap_uniform =
            awgn_capacity(db_to_linear(row.snr_uniform_db)) - op.se;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace pasldpc
