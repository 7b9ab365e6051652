// End-to-end acceptance gate. Each criterion prints one PASS/FAIL line; the
// process exits nonzero if any criterion fails.

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "pasldpc/constellation.hpp"
#include "pasldpc/errors.hpp"
#include "pasldpc/lifting.hpp"
#include "pasldpc/optimizer.hpp"
#include "pasldpc/paschain.hpp"
#include "pasldpc/protograph.hpp"
#include "pasldpc/rates.hpp"
#include "pasldpc/sim.hpp"
#include "pasldpc/surrogate.hpp"

using namespace pasldpc;

namespace {

constexpr double kCodeRate = 13.0 / 16.0;
constexpr int kM = 4;

int hardware_workers() {
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 4 : static_cast<int>(hc);
}

double capacity_snr_db(double r) { return linear_to_db(std::pow(2.0, 2.0 * r) - 1.0); }

// ---------------------------------------------------------------------------

bool criterion1_rate_bookkeeping() {
    for (double r = 0.7; r <= 2.7 + 1e-9; r += 0.2) {
        const SymbolPmf pmf = operating_pmf(r, kCodeRate, kM);
        if (std::abs(pmf.entropy_bits() - (r + 0.75)) > 1e-9) return false;
    }
    const SymbolPmf uniform = operating_pmf(kCodeRate * kM, kCodeRate, kM);
    if (std::abs(uniform.entropy_bits() - 4.0) > 1e-12) return false;
    for (double p : uniform.probs) {
        if (std::abs(p - 1.0 / 16) > 1e-12) return false;
    }
    return kCodeRate * kM == 3.25;
}

bool criterion2_bmd_sanity() {
    const AskConstellation c = make_ask(kM);
    const SymbolPmf pmfs[3] = {mb_pmf(c, 0.0), operating_pmf(2.7, kCodeRate, kM),
                               operating_pmf(0.7, kCodeRate, kM)};
    for (const SymbolPmf& pmf : pmfs) {
        for (int i = 0; i < 10; ++i) {
            const ShapedSource s = scale_to_snr(c, pmf, db_to_linear(-4.0 + 2.5 * i));
            if (bmd_rate(s) > awgn_capacity(s.snr_linear()) + 1e-6) return false;
        }
    }
    for (double r = 0.7; r <= 2.7 + 1e-9; r += 0.25) {
        const auto rows = operating_curve_rows(kCodeRate, kM, {r});
        if (rows[0].gap_shaped_db > rows[0].gap_uniform_db + 1e-9) return false;
    }
    return true;
}

bool criterion3_surrogates() {
    const AskConstellation c = make_ask(kM);
    // Residuals at the operating set.
    for (double r : {0.7, 1.1, 2.1, 2.7}) {
        const SymbolPmf pmf = operating_pmf(r, kCodeRate, kM);
        const ShapedSource s = scale_to_snr(c, pmf, bmd_rate_inverse(c, pmf, r));
        const BitChannelStats stats = bit_channel_stats(s);
        const SurrogateSet set = fit_surrogates(s);
        for (int i = 0; i < kM; ++i) {
            if (set.clamped[i]) continue;
            if (std::abs(biawgn_cond_entropy(set.sigmas[i]) - stats.cond_entropy[i]) >=
                1e-8) {
                return false;
            }
        }
    }
    // Ordering crossovers along the operating curve.
    std::vector<double> grid, d14, d13;
    for (double r = 0.75; r <= 2.66; r += 0.05) {
        const SymbolPmf pmf = operating_pmf(r, kCodeRate, kM);
        const SurrogateSet set =
            fit_surrogates(scale_to_snr(c, pmf, bmd_rate_inverse(c, pmf, r)));
        grid.push_back(r);
        d14.push_back(set.sigmas[0] - set.sigmas[3]);
        d13.push_back(set.sigmas[0] - set.sigmas[2]);
    }
    auto crossing_near = [&](const std::vector<double>& d, double expected) {
        for (std::size_t i = 0; i + 1 < d.size(); ++i) {
            if (d[i] * d[i + 1] < 0.0) {
                const double mid = 0.5 * (grid[i] + grid[i + 1]);
                if (std::abs(mid - expected) <= 0.15) return true;
            }
        }
        return false;
    };
    return crossing_near(d14, 1.1) && crossing_near(d13, 2.1);
}

bool criterion4_threshold_band(ThresholdAnalyzer& analyzer) {
    const BaseMatrix a = robust_base_matrix();
    for (double r : {0.7, 1.1, 2.1, 2.7}) {
        const double gap = analyzer.gap_db(a, r);
        std::printf("  [4] R=%.1f gap to capacity %.3f dB\n", r, gap);
        if (!(gap > 0.0)) return false;
        if (r <= 1.3 && gap > 1.32) return false;
        if (r > 1.3 && gap > 1.05) return false;
    }
    return true;
}

bool criterion5_robustness_contrast(ThresholdAnalyzer& analyzer) {
    DeConfig cfg;
    cfg.population = 16;
    cfg.generations = 40;
    cfg.robust = false;
    cfg.single_rate = 2.7;
    cfg.seed = 7;
    cfg.workers = hardware_workers();
    DeOptimizer opt(cfg, analyzer);
    const Candidate best = opt.run();
    std::printf("  [5] single-rate best threshold at R=2.7: %.3f dB\n", best.fitness);

    double gap_low, gap_high;
    try {
        gap_low = analyzer.gap_db(best.matrix, 0.7);
    } catch (const Error&) {
        gap_low = std::numeric_limits<double>::infinity();  // diverged off-design
    }
    gap_high = analyzer.gap_db(best.matrix, 2.7);
    std::printf("  [5] off-design gap R=0.7: %s dB, on-design gap R=2.7: %.3f dB\n",
                std::isfinite(gap_low) ? std::to_string(gap_low).c_str() : "inf",
                gap_high);
    if (!(gap_low - gap_high >= 0.3)) return false;

    const std::vector<double> p_set{0.7, 1.1, 2.1, 2.7};
    DeConfig rob_cfg;
    rob_cfg.operating_set = p_set;
    DeOptimizer helper(rob_cfg, analyzer);
    const double fit_arob = helper.robust_fitness(robust_base_matrix(), p_set);
    const double fit_single = helper.robust_fitness(best.matrix, p_set);
    std::printf("  [5] min-max backoff: robust matrix %.3f dB vs single-rate %.3f dB\n",
                fit_arob, fit_single);
    return fit_arob < fit_single;
}

SparseParityMatrix full_code() {
    return lift_circulant(expand_parallel(robust_base_matrix(), 3), 338, 1);
}

bool criterion6_lifting(const SparseParityMatrix& h) {
    if (h.rows != 3042 || h.cols != 16224) return false;

    const BaseMatrix binary = expand_parallel(robust_base_matrix(), 3);
    const auto cols = h.rows_of_column();
    for (int j = 0; j < h.cols; ++j) {
        if (static_cast<int>(cols[j].size()) != binary.column_sum(j / 338)) return false;
    }
    const auto rows = h.cols_of_row();
    for (int i = 0; i < h.rows; ++i) {
        if (static_cast<int>(rows[i].size()) != binary.row_sum(i / 338)) return false;
    }

    const int g = girth(h, 8);
    std::printf("  [6] 3042x16224, girth %s6\n", g >= 6 ? ">=" : "<");
    if (g < 6) return false;
    // Independent 4-cycle check: no two columns share two rows.
    std::set<std::pair<int, int>> seen;
    for (int j = 0; j < h.cols; ++j) {
        for (std::size_t a = 0; a + 1 < cols[j].size(); ++a) {
            for (std::size_t b = a + 1; b < cols[j].size(); ++b) {
                if (!seen.insert({cols[j][a], cols[j][b]}).second) return false;
            }
        }
    }
    return true;
}

bool criterion7_chain(const SparseParityMatrix& h) {
    // Exhaustive CCDM roundtrip on (3,2,1,2).
    Composition comp;
    comp.counts = {3, 2, 1, 2};
    if (ccdm_input_bits(comp) != 10) return false;
    std::set<std::vector<int>> outputs;
    for (int v = 0; v < 1024; ++v) {
        std::vector<uint8_t> bits(10);
        for (int b = 0; b < 10; ++b) bits[b] = (v >> (9 - b)) & 1;
        const std::vector<int> amps = ccdm_encode(bits, comp);
        std::vector<long> counts(4, 0);
        for (int a : amps) ++counts[a];
        if (counts != comp.counts) return false;
        if (ccdm_decode(amps, comp) != bits) return false;
        outputs.insert(amps);
    }
    if (outputs.size() != 1024) return false;

    // Full-size noiseless roundtrip and bit accounting.
    const AskConstellation c = make_ask(kM);
    const SymbolPmf pmf = operating_pmf(2.1, kCodeRate, kM);
    const PasChain chain(h, scale_to_snr(c, pmf, db_to_linear(60.0)));
    std::printf("  [7] amplitude bits %ld, extra bits %ld, parity bits %ld (n=%d)\n",
                3 * chain.n_symbols(), chain.extra_bits(), chain.parity_bits(), chain.n());
    if (3 * chain.n_symbols() != 12168) return false;
    if (chain.extra_bits() != 1014) return false;
    if (chain.parity_bits() != 3042) return false;
    if (12168 + chain.extra_bits() + chain.parity_bits() != 16224) return false;

    FrameRng rng(555, 0);
    for (int frame = 0; frame < 100; ++frame) {
        std::vector<uint8_t> frame_bits(chain.frame_bits());
        for (auto& b : frame_bits) b = static_cast<uint8_t>(rng.next_u64() & 1);
        const PasFrame tx = chain.encode(frame_bits);
        if (!chain.decoder().syndrome_ok(tx.codeword)) return false;
        const std::vector<double> y = chain.modulate(tx);
        const BpResult rx = chain.bp_decode(chain.demap_llrs(y));
        if (rx.bits != tx.codeword) return false;
        if (chain.recover_frame_bits(rx.bits) != frame_bits) return false;
    }
    return true;
}

bool criterion8_bp_vs_ml() {
    // Toy code: 12x24 rate-1/2 matrix built from a triangle packing of row
    // pairs (17 weight-3 plus 7 weight-2 columns, every row pair used at most
    // once, so the girth is at least 6 and BP operates below its threshold at
    // the SNR where ML-FER is near 1e-2).
    static const std::vector<std::vector<int>> columns = {
        {0, 1},      {0, 5},      {0, 8},      {1, 4},      {3, 7},
        {7, 8},      {8, 10},     {0, 2, 10},  {0, 3, 11},  {0, 4, 6},
        {0, 7, 9},   {1, 2, 6},   {1, 3, 8},   {1, 5, 10},  {1, 7, 11},
        {2, 3, 5},   {2, 4, 7},   {2, 8, 9},   {3, 6, 9},   {4, 5, 8},
        {4, 9, 10},  {5, 9, 11},  {6, 7, 10},  {6, 8, 11}};
    SparseParityMatrix h;
    h.rows = 12;
    h.cols = static_cast<int>(columns.size());
    for (int j = 0; j < h.cols; ++j) {
        for (int row : columns[j]) h.edges.emplace_back(row, j);
    }
    h.level_of_column.assign(h.cols, 1);
    if (girth(h, 8) < 6) return false;
    const int n = h.cols;

    // GF(2) generator via null-space computation.
    std::vector<std::vector<uint8_t>> mat(h.rows, std::vector<uint8_t>(n, 0));
    for (const auto& [r, col] : h.edges) mat[r][col] = 1;
    std::vector<int> pivot_col;
    int rank = 0;
    for (int col = 0; col < n && rank < h.rows; ++col) {
        int pivot = -1;
        for (int r = rank; r < h.rows; ++r) {
            if (mat[r][col]) {
                pivot = r;
                break;
            }
        }
        if (pivot < 0) continue;
        std::swap(mat[rank], mat[pivot]);
        for (int r = 0; r < h.rows; ++r) {
            if (r != rank && mat[r][col]) {
                for (int j2 = 0; j2 < n; ++j2) mat[r][j2] ^= mat[rank][j2];
            }
        }
        pivot_col.push_back(col);
        ++rank;
    }
    const int k = n - rank;
    std::printf("  [8] toy code n=%d, k=%d\n", n, k);
    if (k > 12) return false;
    std::vector<uint8_t> is_pivot(n, 0);
    for (int col : pivot_col) is_pivot[col] = 1;
    std::vector<std::vector<uint8_t>> gen;  // null-space basis rows
    for (int col = 0; col < n; ++col) {
        if (is_pivot[col]) continue;
        std::vector<uint8_t> v(n, 0);
        v[col] = 1;
        for (int r = 0; r < rank; ++r) {
            if (mat[r][col]) v[pivot_col[r]] = 1;
        }
        gen.push_back(v);
    }

    const BpDecoder dec(h);
    auto run_trials = [&](double sigma, long trials, bool with_bp, long* ml_out,
                          long* bp_out) {
        long ml_errors = 0, bp_errors = 0;
        std::vector<double> llrs(n);
        std::vector<uint8_t> cur(n);
        for (long t = 0; t < trials; ++t) {
            FrameRng rng(9000 + static_cast<uint64_t>(1000.0 * sigma), t);
            for (int j = 0; j < n; ++j) {
                llrs[j] = 2.0 * (1.0 + sigma * rng.next_gaussian()) / (sigma * sigma);
            }
            // ML over all 2^k codewords by a Gray-code walk of the messages.
            std::fill(cur.begin(), cur.end(), 0);
            double s = 0.0;
            bool ml_error = false;
            for (uint64_t gidx = 1; gidx < (1ull << k); ++gidx) {
                const int flip = std::countr_zero(gidx);
                for (int j = 0; j < n; ++j) {
                    if (!gen[flip][j]) continue;
                    if (cur[j]) {
                        s -= llrs[j];
                        cur[j] = 0;
                    } else {
                        s += llrs[j];
                        cur[j] = 1;
                    }
                }
                if (s <= 0.0) {  // a nonzero codeword beats (or ties) all-zero
                    ml_error = true;
                    break;
                }
            }
            if (ml_error) ++ml_errors;
            if (with_bp) {
                const BpResult res = dec.decode(llrs, 100);
                for (uint8_t b : res.bits) {
                    if (b) {
                        ++bp_errors;
                        break;
                    }
                }
            }
        }
        *ml_out = ml_errors;
        if (bp_out) *bp_out = bp_errors;
    };

    // Calibrate sigma so that ML-FER is near 1e-2.
    double sigma_star = 0.0, best_dist = 1e9;
    for (double sigma = 0.50; sigma <= 0.96; sigma += 0.05) {
        long ml = 0;
        run_trials(sigma, 1500, false, &ml, nullptr);
        const double fer = ml / 1500.0;
        if (fer <= 0.0) continue;
        const double dist = std::abs(std::log10(fer) + 2.0);
        if (dist < best_dist) {
            best_dist = dist;
            sigma_star = sigma;
        }
    }
    if (sigma_star == 0.0) return false;

    long ml = 0, bp = 0;
    const long trials = 15000;
    run_trials(sigma_star, trials, true, &ml, &bp);
    const double ml_fer = static_cast<double>(ml) / trials;
    const double bp_fer = static_cast<double>(bp) / trials;
    std::printf("  [8] sigma=%.2f ML FER %.4g, BP FER %.4g\n", sigma_star, ml_fer, bp_fer);
    if (ml == 0) return false;
    return bp_fer <= 3.0 * ml_fer && bp_fer >= ml_fer - 3.0 * std::sqrt(ml_fer / trials);
}

bool criterion9_desk_fer() {
    const SparseParityMatrix h =
        lift_circulant(expand_parallel(robust_base_matrix(), 3), 56, 1);
    SimConfig cfg;
    cfg.code_rate = kCodeRate;
    cfg.m = kM;
    cfg.max_frames = 4000;
    cfg.min_errors = 40;
    cfg.master_seed = 11;
    cfg.workers = hardware_workers();
    const double snr_db = capacity_snr_db(2.1) + 2.0;
    const SimResult r = run_fer_point(h, 2.1, snr_db, cfg);
    std::printf("  [9] n=%d at %.2f dB: %ld/%ld errors, FER %.4g\n", h.cols, snr_db,
                r.frame_errors, r.frames, r.fer);
    if (r.fer > 1e-2) return false;

    if (std::getenv("PASLDPC_FULLSCALE")) {
        // Opt-in long-running target: the full 16224-bit code at FER 1e-3.
        const SparseParityMatrix big = full_code();
        SimConfig big_cfg = cfg;
        big_cfg.max_frames = 200000;
        big_cfg.min_errors = 100;
        big_cfg.rates = {2.1};
        big_cfg.snr_start_db = capacity_snr_db(2.1) + 0.7;
        big_cfg.snr_stop_db = capacity_snr_db(2.1) + 1.3;
        big_cfg.snr_step_db = 0.1;
        const auto sweep = run_fer(big, big_cfg);
        const auto gaps = gap_at_target(sweep, 1e-3);
        std::printf("  [9] full-scale gap at FER 1e-3: %.3f dB\n", gaps[0].second);
        if (std::abs(gaps[0].second - 1.05) > 0.15) return false;
    }
    return true;
}

bool criterion10_determinism() {
    const SparseParityMatrix h =
        lift_circulant(expand_parallel(robust_base_matrix(), 3), 14, 7);
    SimConfig cfg;
    cfg.max_frames = 400;
    cfg.min_errors = 8;
    cfg.master_seed = 77;
    cfg.rates = {1.1, 2.1};
    cfg.snr_start_db = 5.0;
    cfg.snr_stop_db = 6.0;
    cfg.snr_step_db = 0.5;

    std::vector<std::string> outputs;
    for (int workers : {1, 2, 8}) {
        cfg.workers = workers;
        std::vector<SimResult> results = run_fer(h, cfg);
        for (SimResult& r : results) r.wallclock_s = 0.0;  // timing is not data
        outputs.push_back(sim_results_csv(results));
    }
    return outputs[0] == outputs[1] && outputs[0] == outputs[2];
}

}  // namespace

int main() {
    ThresholdAnalyzer analyzer;  // shared caches for criteria 4 and 5
    int failures = 0;
    const auto report = [&](int idx, const char* name, bool ok) {
        std::printf("criterion %d (%s): %s\n", idx, name, ok ? "PASS" : "FAIL");
        std::fflush(stdout);
        if (!ok) ++failures;
    };

    report(1, "rate bookkeeping", criterion1_rate_bookkeeping());
    report(2, "BMD-rate sanity", criterion2_bmd_sanity());
    report(3, "surrogate fit and ordering crossovers", criterion3_surrogates());
    report(4, "robust matrix threshold band", criterion4_threshold_band(analyzer));
    report(5, "robustness contrast vs single-rate DE", criterion5_robustness_contrast(analyzer));
    const SparseParityMatrix h = full_code();
    report(6, "two-stage lifting", criterion6_lifting(h));
    report(7, "chain correctness", criterion7_chain(h));
    report(8, "BP vs exhaustive ML", criterion8_bp_vs_ml());
    report(9, "desk-scale FER", criterion9_desk_fer());
    report(10, "worker-count determinism", criterion10_determinism());

    if (failures > 0) {
        std::printf("%d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
