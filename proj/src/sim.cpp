#include "pasldpc/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "pasldpc/errors.hpp"
#include "pasldpc/parallel.hpp"
#include "pasldpc/rates.hpp"

namespace pasldpc {

namespace {

uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Regularized incomplete beta via Lentz continued fraction.
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-14, kFpmin = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0, d = 1.0 - qab * x / qap;
    if (std::abs(d) < kFpmin) d = kFpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpmin) d = kFpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpmin) c = kFpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpmin) d = kFpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpmin) c = kFpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

double reg_inc_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                         a * std::log(x) + b * std::log1p(-x);
    const double bt = std::exp(ln_bt);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return bt * betacf(a, b, x) / a;
    }
    return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

double beta_inv(double p, double a, double b) {
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (reg_inc_beta(a, b, mid) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

FrameRng::FrameRng(uint64_t master_seed, uint64_t frame_index)
    : key_(splitmix64(splitmix64(master_seed) ^
                      (frame_index * 0xD1342543DE82EF95ull))) {}

uint64_t FrameRng::next_u64() {
    return splitmix64(key_ + (++counter_) * 0x9E3779B97F4A7C15ull);
}

double FrameRng::next_uniform() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
}

double FrameRng::next_gaussian() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

std::pair<double, double> clopper_pearson(long errors, long trials, double confidence) {
    if (trials <= 0 || errors < 0 || errors > trials) {
        throw Error(ErrorKind::invalid_parameter, "bad binomial counts");
    }
    const double alpha = 1.0 - confidence;
    const double lo =
        errors == 0 ? 0.0
                    : beta_inv(alpha / 2.0, static_cast<double>(errors),
                               static_cast<double>(trials - errors + 1));
    const double hi =
        errors == trials ? 1.0
                         : beta_inv(1.0 - alpha / 2.0, static_cast<double>(errors + 1),
                                    static_cast<double>(trials - errors));
    return {lo, hi};
}

namespace {

struct FrameOutcome {
    bool frame_error = false;
    long bit_errors = 0;
};

FrameOutcome simulate_frame(const PasChain& chain, uint64_t master_seed,
                            uint64_t frame_index, int bp_iterations) {
    FrameRng rng(master_seed, frame_index);
    std::vector<uint8_t> frame_bits(chain.frame_bits());
    for (auto& b : frame_bits) b = static_cast<uint8_t>(rng.next_u64() & 1);
    const PasFrame frame = chain.encode(frame_bits);
    std::vector<double> y = chain.modulate(frame);
    for (double& v : y) v += rng.next_gaussian();
    const std::vector<double> llrs = chain.demap_llrs(y);
    const BpResult decoded = chain.bp_decode(llrs, bp_iterations);

    FrameOutcome outcome;
    for (std::size_t j = 0; j < frame.codeword.size(); ++j) {
        if (decoded.bits[j] != frame.codeword[j]) ++outcome.bit_errors;
    }
    if (outcome.bit_errors > 0) {
        outcome.frame_error = true;
        return outcome;
    }
    try {
        outcome.frame_error = chain.recover_frame_bits(decoded.bits) != frame_bits;
    } catch (const Error&) {
        outcome.frame_error = true;
    }
    return outcome;
}

}  // namespace

SimResult run_fer_point(const SparseParityMatrix& h, double rate_se, double snr_db,
                        const SimConfig& cfg) {
    if (cfg.min_errors < 1 || cfg.max_frames < 1) {
        throw Error(ErrorKind::invalid_config, "min_errors and max_frames must be >= 1");
    }
    const auto t0 = std::chrono::steady_clock::now();
    const SymbolPmf pmf = operating_pmf(rate_se, cfg.code_rate, cfg.m);
    const ShapedSource source =
        scale_to_snr(make_ask(cfg.m), pmf, db_to_linear(snr_db));
    const PasChain chain(h, source);

    constexpr long kBatch = 64;  // fixed so stopping is worker-independent
    std::vector<FrameOutcome> outcomes;
    long frames = 0;
    while (frames < cfg.max_frames) {
        const long batch = std::min(kBatch, cfg.max_frames - frames);
        outcomes.resize(frames + batch);
        parallel_for(static_cast<int>(batch), cfg.workers, [&](int i) {
            outcomes[frames + i] =
                simulate_frame(chain, cfg.master_seed, frames + i, cfg.bp_iterations);
        });
        frames += batch;
        long cum = 0;
        for (long f = 0; f < frames; ++f) {
            cum += outcomes[f].frame_error ? 1 : 0;
            if (cum >= cfg.min_errors) {
                frames = f + 1;  // shortest qualifying prefix
                break;
            }
        }
        if (cum >= cfg.min_errors) break;
    }

    SimResult result;
    result.rate_se = rate_se;
    result.snr_db = snr_db;
    result.frames = frames;
    result.seed = cfg.master_seed;
    for (long f = 0; f < frames; ++f) {
        result.frame_errors += outcomes[f].frame_error ? 1 : 0;
        result.bit_errors += outcomes[f].bit_errors;
    }
    result.fer = static_cast<double>(result.frame_errors) / static_cast<double>(frames);
    std::tie(result.ci95_lo, result.ci95_hi) = clopper_pearson(result.frame_errors, frames);
    result.wallclock_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

std::vector<SimResult> run_fer(const SparseParityMatrix& h, const SimConfig& cfg) {
    if (cfg.snr_step_db <= 0.0) {
        throw Error(ErrorKind::invalid_config, "SNR step must be positive");
    }
    std::vector<SimResult> results;
    for (double r : cfg.rates) {
        for (double snr = cfg.snr_start_db; snr <= cfg.snr_stop_db + 1e-9;
             snr += cfg.snr_step_db) {
            results.push_back(run_fer_point(h, r, snr, cfg));
        }
    }
    return results;
}

std::vector<std::pair<double, double>> gap_at_target(const std::vector<SimResult>& results,
                                                     double target_fer) {
    std::map<long long, std::vector<SimResult>> by_rate;
    for (const SimResult& r : results) {
        by_rate[std::llround(r.rate_se * 1e9)].push_back(r);
    }
    std::vector<std::pair<double, double>> gaps;
    for (auto& [key, points] : by_rate) {
        std::sort(points.begin(), points.end(),
                  [](const SimResult& a, const SimResult& b) { return a.snr_db < b.snr_db; });
        const double rate = points.front().rate_se;
        const double cap_db = linear_to_db(std::pow(2.0, 2.0 * rate) - 1.0);
        double snr_at_target = 0.0;
        bool found = false;
        for (std::size_t i = 0; i < points.size() && !found; ++i) {
            if (std::abs(points[i].fer - target_fer) < 1e-15) {
                snr_at_target = points[i].snr_db;
                found = true;
            } else if (i + 1 < points.size() && points[i].fer > target_fer &&
                       points[i + 1].fer <= target_fer && points[i + 1].fer > 0.0) {
                const double lf0 = std::log10(points[i].fer);
                const double lf1 = std::log10(points[i + 1].fer);
                const double t = (std::log10(target_fer) - lf0) / (lf1 - lf0);
                snr_at_target = points[i].snr_db + t * (points[i + 1].snr_db - points[i].snr_db);
                found = true;
            }
        }
        if (!found) {
            throw Error(ErrorKind::insufficient_sweep,
                        "no FER bracket around the target for R=" + std::to_string(rate));
        }
        gaps.emplace_back(rate, snr_at_target - cap_db);
    }
    return gaps;
}

std::string sim_results_csv(const std::vector<SimResult>& results) {
    std::ostringstream out;
    out << "R,snr_db,frames,frame_errors,bit_errors,fer,ci95_lo,ci95_hi,wallclock_s,seed\n";
    char buf[512];
    for (const SimResult& r : results) {
        std::snprintf(buf, sizeof(buf),
                      "%.17g,%.17g,%ld,%ld,%ld,%.17g,%.17g,%.17g,%.17g,%llu\n", r.rate_se,
                      r.snr_db, r.frames, r.frame_errors, r.bit_errors, r.fer, r.ci95_lo,
                      r.ci95_hi, r.wallclock_s, static_cast<unsigned long long>(r.seed));
        out << buf;
    }
    return out.str();
}

std::vector<SimResult> parse_sim_results_csv(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);  // header
    std::vector<SimResult> results;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        SimResult r;
        unsigned long long seed = 0;
        if (std::sscanf(line.c_str(), "%lg,%lg,%ld,%ld,%ld,%lg,%lg,%lg,%lg,%llu", &r.rate_se,
                        &r.snr_db, &r.frames, &r.frame_errors, &r.bit_errors, &r.fer,
                        &r.ci95_lo, &r.ci95_hi, &r.wallclock_s, &seed) != 10) {
            throw Error(ErrorKind::io_failure, "bad sim result row: " + line);
        }
        r.seed = seed;
        results.push_back(r);
    }
    return results;
}

}  // namespace pasldpc
