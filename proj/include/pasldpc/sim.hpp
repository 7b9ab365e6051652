#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pasldpc/paschain.hpp"

namespace pasldpc {

// Counter-based per-frame random stream: SplitMix64 finalizer applied to a
// keyed counter, so frame i's noise is independent of worker scheduling.
class FrameRng {
public:
    FrameRng(uint64_t master_seed, uint64_t frame_index);

    uint64_t next_u64();
    double next_uniform();          // in (0, 1]
    double next_gaussian();         // Box-Muller, unit variance

private:
    uint64_t key_;
    uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

struct SimConfig {
    std::string code_path;
    double code_rate = 13.0 / 16.0;
    int m = 4;
    std::vector<double> rates;
    double snr_start_db = 0.0;
    double snr_stop_db = 0.0;
    double snr_step_db = 0.25;
    double target_fer = 1e-3;
    long max_frames = 100000;
    long min_errors = 100;
    uint64_t master_seed = 1;
    int workers = 1;
    int bp_iterations = 100;
};

struct SimResult {
    double rate_se = 0.0;
    double snr_db = 0.0;
    long frames = 0;
    long frame_errors = 0;
    long bit_errors = 0;
    double fer = 0.0;
    double ci95_lo = 0.0;
    double ci95_hi = 0.0;
    double wallclock_s = 0.0;
    uint64_t seed = 0;
};

// Exact (Clopper-Pearson) 95% binomial interval.
std::pair<double, double> clopper_pearson(long errors, long trials, double confidence = 0.95);

// FER of one chain at one SNR; frames are seeded by index, and the stopping
// point is the shortest frame prefix reaching min_errors, so results do not
// depend on the worker count.
SimResult run_fer_point(const SparseParityMatrix& h, double rate_se, double snr_db,
                        const SimConfig& cfg);

std::vector<SimResult> run_fer(const SparseParityMatrix& h, const SimConfig& cfg);

// SNR at the target FER per rate by log-linear interpolation, as a gap to
// the capacity SNR in dB.
std::vector<std::pair<double, double>> gap_at_target(const std::vector<SimResult>& results,
                                                     double target_fer);

std::string sim_results_csv(const std::vector<SimResult>& results);
std::vector<SimResult> parse_sim_results_csv(const std::string& csv);

}  // namespace pasldpc
