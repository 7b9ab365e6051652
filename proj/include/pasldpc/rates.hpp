#pragma once

#include <vector>

#include "pasldpc/constellation.hpp"

namespace pasldpc {

struct BitChannelStats {
    std::vector<double> cond_entropy;      // H(B_i|Y), one per level
    std::vector<double> marginal_entropy;  // H(B_i)
    double label_entropy = 0.0;            // H(B) = H(X)
};

struct OperatingPoint {
    double se = 0.0;  // R, bits per channel use
    SymbolPmf pmf;
    double snr_shaped_db = 0.0;    // required SNR under BMD with the shaped pmf
    double snr_capacity_db = 0.0;  // SNR with C_awgn = R
};

// One CSV row of the operating curve (shaped and uniform references).
struct CurveRow {
    double se = 0.0;
    double snr_capacity_db = 0.0;
    double snr_shaped_db = 0.0;
    double snr_uniform_db = 0.0;
    double gap_shaped_db = 0.0;
    double gap_uniform_db = 0.0;
    double rate_gap_shaped = 0.0;   // C_awgn(snr_shaped) - R
    double rate_gap_uniform = 0.0;  // C_awgn(snr_uniform) - R
};

double awgn_capacity(double snr_linear);

BitChannelStats bit_channel_stats(const ShapedSource& source);

// Eq-style BMD achievable rate: max(0, H(B) - sum_i H(B_i|Y)).
double bmd_rate(const ShapedSource& source);

// Required linear SNR so that the BMD rate equals R, by bisection in dB.
double bmd_rate_inverse(const AskConstellation& c, const SymbolPmf& pmf, double rate);

std::vector<OperatingPoint> operating_curve(double code_rate, int m,
                                            const std::vector<double>& r_grid);

std::vector<CurveRow> operating_curve_rows(double code_rate, int m,
                                           const std::vector<double>& r_grid);

}  // namespace pasldpc
