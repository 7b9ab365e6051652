#pragma once

#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "pasldpc/constellation.hpp"
#include "pasldpc/surrogate.hpp"

namespace pasldpc {

// Structural limits on base matrices (defaults per the rate-13/16 design).
struct BaseMatrixConstraints {
    int entry_max = 3;          // parallel edge limit
    int vn_degree_max = 9;      // column sum limit
    int degree2_columns_max = 1;
};

// M x N protograph with per-column bit-level assignment (1-based levels).
struct BaseMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<int> entries;  // row-major
    std::vector<int> level_of_column;

    int at(int l, int k) const { return entries[l * cols + k]; }
    int& at(int l, int k) { return entries[l * cols + k]; }

    int column_sum(int k) const;
    int row_sum(int l) const;
    double design_rate() const { return static_cast<double>(cols - rows) / cols; }

    // Empty when all invariants hold.
    std::vector<std::string> violations(const BaseMatrixConstraints& c = {}) const;

    bool operator==(const BaseMatrix&) const = default;
};

// Published robust 3x16 protograph for rate 13/16 on 16-ASK.
BaseMatrix robust_base_matrix();

// Default column-to-bit-level map: level of column k is ceil(k/D), 1-based k.
int level_map(int k, int d);

// Plain-text serialization: "M N", M integer rows, then N level indices.
BaseMatrix load_base_matrix(const std::string& path);
void save_base_matrix(const BaseMatrix& a, const std::string& path);
BaseMatrix parse_base_matrix(std::istream& in);
void write_base_matrix(const BaseMatrix& a, std::ostream& out);

// Mutual information of a consistent Gaussian LLR with std sigma_llr
// (mean sigma_llr^2/2). Table-backed, strictly increasing, J(0) = 0.
double j_function(double sigma_llr);
double j_function_inverse(double mi);

struct PexitTrace {
    bool converged = false;
    int iterations_used = 0;
    std::vector<double> app_mi;
};

// Multi-channel PEXIT recursion; sigma_by_level holds the surrogate noise
// std per bit level (1-based level = index + 1).
PexitTrace pexit_converges(const BaseMatrix& a, const std::vector<double>& sigma_by_level,
                           int max_iter = 500, double eps_conv = 1e-4);

struct ThresholdConfig {
    double code_rate = 13.0 / 16.0;
    int m = 4;
    int pexit_max_iter = 500;
    double eps_conv = 1e-4;
    double resolution_db = 0.01;
    double bracket_lo_db = -1.0;  // relative to capacity SNR
    double bracket_hi_db = 8.0;
};

// Threshold search with shared caches; safe to call from multiple threads.
class ThresholdAnalyzer {
public:
    explicit ThresholdAnalyzer(ThresholdConfig cfg = {}) : cfg_(cfg) {}

    const ThresholdConfig& config() const { return cfg_; }

    // Asymptotic decoding threshold in dB; throws diverged-ensemble if the
    // ensemble does not converge at the bracket top.
    double threshold_db(const BaseMatrix& a, double rate_se);

    // threshold_db - capacity SNR in dB.
    double gap_db(const BaseMatrix& a, double rate_se);

    std::vector<std::pair<double, double>> gap_curve(const BaseMatrix& a,
                                                     const std::vector<double>& r_grid);

    // Required BMD SNR in dB at rate R for the operating pmf (cached).
    double required_snr_db(double rate_se);

    const SymbolPmf& pmf_for_rate(double rate_se);

    SurrogateSet surrogates(double rate_se, double snr_db);

private:
    ThresholdConfig cfg_;
    std::mutex mu_;
    std::map<long long, SymbolPmf> pmf_cache_;
    std::map<long long, double> required_snr_cache_;
    std::map<std::pair<long long, long long>, SurrogateSet> surrogate_cache_;
};

}  // namespace pasldpc
