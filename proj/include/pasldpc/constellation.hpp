#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace pasldpc {

// 2^m-ASK constellation {+-1, +-3, ..., +-(2^m-1)} with the sign/amplitude
// labeling: B_1 encodes the sign (0 for negative, 1 for positive), B_2..B_m
// are the reflected Gray code of the amplitude index.
struct AskConstellation {
    int m = 0;
    std::vector<double> points;       // ascending, size 2^m
    std::vector<uint32_t> labels;     // labels[i] for points[i], B_1 in the MSB

    int size() const { return static_cast<int>(points.size()); }

    // 1-based bit level; returns 0 or 1.
    int bit(int point_index, int level) const {
        return static_cast<int>((labels[point_index] >> (m - level)) & 1u);
    }
};

struct SymbolPmf {
    std::vector<double> probs;

    double entropy_bits() const;
};

// Channel input model X scaled by delta so that E[(delta*X)^2] hits the SNR.
struct ShapedSource {
    AskConstellation constellation;
    SymbolPmf pmf;
    double delta = 1.0;

    double snr_linear() const;
};

AskConstellation make_ask(int m);

// Maxwell-Boltzmann family P(x) proportional to exp(-nu*x^2).
SymbolPmf mb_pmf(const AskConstellation& c, double nu);

// Member of the MB family with the requested entropy, by bisection on nu.
SymbolPmf mb_from_entropy(const AskConstellation& c, double target_entropy);

// PMF realizing spectral efficiency R with an (m, c)-rate PAS system:
// H(X) = R + (1-c)*m.
SymbolPmf operating_pmf(double rate_se, double code_rate, int m);

ShapedSource scale_to_snr(const AskConstellation& c, const SymbolPmf& pmf, double snr_linear);

double second_moment(const AskConstellation& c, const SymbolPmf& pmf);

// Amplitude marginal P_A over {1, 3, ..., 2^m-1} of a symmetric symbol PMF.
std::vector<double> amplitude_marginal(const AskConstellation& c, const SymbolPmf& pmf);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

}  // namespace pasldpc
