#pragma once

#include <vector>

#include "pasldpc/constellation.hpp"
#include "pasldpc/rates.hpp"

namespace pasldpc {

// Per-level binary-input AWGN surrogate parameters for one (SNR, P_X) pair.
// Level i is modeled as L_i = B_i + N_i with B_i uniform on {+-2/sigma_i^2}
// and N_i ~ N(0, 4/sigma_i^2); sigma_i matches the bit-channel conditional
// entropy. A sigma flagged in `clamped` hit the lower clamp (near-perfect
// channel).
struct SurrogateSet {
    std::vector<double> sigmas;
    std::vector<bool> clamped;
    double snr_db = 0.0;
    double se = 0.0;
};

// H(B|L) of the binary-input AWGN channel with noise std sigma.
double biawgn_cond_entropy(double sigma);

SurrogateSet fit_surrogates(const ShapedSource& source);
SurrogateSet fit_surrogates(const BitChannelStats& stats, double snr_db, double se);

// Levels (1-based) sorted ascending by sigma, ties broken by level index.
std::vector<int> ordering_signature(const SurrogateSet& set);

}  // namespace pasldpc
