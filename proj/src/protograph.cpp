#include "pasldpc/protograph.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "pasldpc/errors.hpp"
#include "pasldpc/quadrature.hpp"
#include "pasldpc/rates.hpp"

namespace pasldpc {

int BaseMatrix::column_sum(int k) const {
    int s = 0;
    for (int l = 0; l < rows; ++l) s += at(l, k);
    return s;
}

int BaseMatrix::row_sum(int l) const {
    int s = 0;
    for (int k = 0; k < cols; ++k) s += at(l, k);
    return s;
}

std::vector<std::string> BaseMatrix::violations(const BaseMatrixConstraints& c) const {
    std::vector<std::string> v;
    int degree2 = 0;
    for (int k = 0; k < cols; ++k) {
        const int sum = column_sum(k);
        if (sum == 2) ++degree2;
        if (sum < 2) v.push_back("column " + std::to_string(k) + " has degree < 2");
        if (sum > c.vn_degree_max)
            v.push_back("column " + std::to_string(k) + " exceeds max degree");
    }
    if (degree2 > c.degree2_columns_max)
        v.push_back("more than " + std::to_string(c.degree2_columns_max) +
                    " degree-2 column(s)");
    for (int l = 0; l < rows; ++l) {
        if (row_sum(l) < 2) v.push_back("row " + std::to_string(l) + " has degree < 2");
    }
    for (int e : entries) {
        if (e < 0 || e > c.entry_max) {
            v.push_back("entry outside [0, entry_max]");
            break;
        }
    }
    if (static_cast<int>(level_of_column.size()) != cols)
        v.push_back("level assignment size mismatch");
    return v;
}

BaseMatrix robust_base_matrix() {
    BaseMatrix a;
    a.rows = 3;
    a.cols = 16;
    a.entries = {
        3, 1, 1, 2, 1, 2, 2, 1, 0, 1, 1, 1, 3, 1, 1, 1,
        3, 2, 2, 0, 2, 2, 2, 2, 2, 0, 1, 1, 3, 2, 1, 2,
        3, 0, 0, 1, 0, 0, 0, 0, 1, 2, 3, 3, 3, 0, 0, 0,
    };
    // Column blocks carry levels B2, B3, B4, B1 in that order.
    a.level_of_column = {2, 2, 2, 2, 3, 3, 3, 3, 4, 4, 4, 4, 1, 1, 1, 1};
    return a;
}

int level_map(int k, int d) { return (k + d - 1) / d; }

BaseMatrix parse_base_matrix(std::istream& in) {
    BaseMatrix a;
    if (!(in >> a.rows >> a.cols) || a.rows < 1 || a.cols < 1) {
        throw Error(ErrorKind::io_failure, "bad base matrix header");
    }
    a.entries.resize(static_cast<std::size_t>(a.rows) * a.cols);
    for (int& e : a.entries) {
        if (!(in >> e)) throw Error(ErrorKind::io_failure, "truncated base matrix");
    }
    a.level_of_column.resize(a.cols);
    for (int& lvl : a.level_of_column) {
        if (!(in >> lvl)) throw Error(ErrorKind::io_failure, "missing level row");
    }
    return a;
}

void write_base_matrix(const BaseMatrix& a, std::ostream& out) {
    out << a.rows << " " << a.cols << "\n";
    for (int l = 0; l < a.rows; ++l) {
        for (int k = 0; k < a.cols; ++k) out << (k ? " " : "") << a.at(l, k);
        out << "\n";
    }
    for (int k = 0; k < a.cols; ++k) out << (k ? " " : "") << a.level_of_column[k];
    out << "\n";
}

BaseMatrix load_base_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io_failure, "cannot open " + path);
    return parse_base_matrix(in);
}

void save_base_matrix(const BaseMatrix& a, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::io_failure, "cannot open " + path);
    write_base_matrix(a, out);
}

// --- J function -------------------------------------------------------------

namespace {

constexpr int kJTableSize = 4096;
constexpr double kJSigmaMax = 14.0;

double j_quadrature(double sigma) {
    if (sigma <= 0.0) return 0.0;
    const auto& gh = GaussHermite::rule(128);
    const double mu = 0.5 * sigma * sigma;
    const double sqrt2 = std::sqrt(2.0);
    double loss = 0.0;
    for (std::size_t j = 0; j < gh.nodes.size(); ++j) {
        const double llr = mu + sqrt2 * sigma * gh.nodes[j];
        loss += gh.weights[j] * log2_1p_exp(-llr);
    }
    return std::clamp(1.0 - loss / 1.7724538509055160, 0.0, 1.0);
}

struct JTable {
    std::array<double, kJTableSize> value;
    std::array<double, kJTableSize> slope;
    double step;

    JTable() {
        step = kJSigmaMax / (kJTableSize - 1);
        for (int i = 0; i < kJTableSize; ++i) {
            value[i] = j_quadrature(i * step);
            if (i > 0 && value[i] < value[i - 1]) value[i] = value[i - 1];
        }
        // Fritsch-Carlson monotone cubic slopes on the uniform grid.
        std::array<double, kJTableSize - 1> delta;
        for (int i = 0; i + 1 < kJTableSize; ++i) delta[i] = (value[i + 1] - value[i]) / step;
        slope[0] = delta[0];
        slope[kJTableSize - 1] = delta[kJTableSize - 2];
        for (int i = 1; i + 1 < kJTableSize; ++i) {
            if (delta[i - 1] <= 0.0 || delta[i] <= 0.0) {
                slope[i] = 0.0;
            } else {
                slope[i] = 2.0 * delta[i - 1] * delta[i] / (delta[i - 1] + delta[i]);
            }
        }
    }

    double eval(double sigma) const {
        if (sigma <= 0.0) return 0.0;
        if (sigma >= kJSigmaMax) return value.back();
        const int i = std::min(kJTableSize - 2, static_cast<int>(sigma / step));
        const double t = (sigma - i * step) / step;
        const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
        const double h10 = t * (1 - t) * (1 - t);
        const double h01 = t * t * (3 - 2 * t);
        const double h11 = t * t * (t - 1);
        return h00 * value[i] + h10 * step * slope[i] + h01 * value[i + 1] +
               h11 * step * slope[i + 1];
    }

    double inverse(double mi) const {
        if (mi <= 0.0) return 0.0;
        if (mi >= value.back()) return kJSigmaMax;
        double lo = 0.0, hi = kJSigmaMax;
        for (int it = 0; it < 100; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (eval(mid) < mi) {
                lo = mid;
            } else {
                hi = mid;
            }
            if (hi - lo < 1e-12) break;
        }
        return 0.5 * (lo + hi);
    }
};

const JTable& j_table() {
    static const JTable table;
    return table;
}

}  // namespace

double j_function(double sigma_llr) { return j_table().eval(sigma_llr); }
double j_function_inverse(double mi) { return j_table().inverse(mi); }

// --- PEXIT ------------------------------------------------------------------

PexitTrace pexit_converges(const BaseMatrix& a, const std::vector<double>& sigma_by_level,
                           int max_iter, double eps_conv) {
    const int m_rows = a.rows, n_cols = a.cols;
    for (int lvl : a.level_of_column) {
        if (lvl < 1 || lvl > static_cast<int>(sigma_by_level.size())) {
            throw Error(ErrorKind::invalid_parameter, "missing surrogate for a bit level");
        }
    }
    std::vector<double> sigma_ch(n_cols);
    for (int k = 0; k < n_cols; ++k) {
        sigma_ch[k] = 2.0 / sigma_by_level[a.level_of_column[k] - 1];
    }

    std::vector<double> iev(m_rows * n_cols, 0.0), iec(m_rows * n_cols, 0.0);
    std::vector<double> x2(m_rows * n_cols, 0.0);  // scratch for Jinv^2 values
    PexitTrace trace;
    trace.app_mi.assign(n_cols, 0.0);

    for (int iter = 1; iter <= max_iter; ++iter) {
        // Variable-to-check update.
        for (int l = 0; l < m_rows; ++l)
            for (int k = 0; k < n_cols; ++k) {
                const double x = j_function_inverse(iec[l * n_cols + k]);
                x2[l * n_cols + k] = x * x;
            }
        for (int k = 0; k < n_cols; ++k) {
            double total = 0.0;
            for (int l = 0; l < m_rows; ++l) total += a.at(l, k) * x2[l * n_cols + k];
            for (int l = 0; l < m_rows; ++l) {
                if (a.at(l, k) == 0) continue;
                const double s =
                    std::max(0.0, total - x2[l * n_cols + k] + sigma_ch[k] * sigma_ch[k]);
                iev[l * n_cols + k] = j_function(std::sqrt(s));
            }
        }
        // Check-to-variable update.
        for (int l = 0; l < m_rows; ++l)
            for (int k = 0; k < n_cols; ++k) {
                const double x = j_function_inverse(1.0 - iev[l * n_cols + k]);
                x2[l * n_cols + k] = x * x;
            }
        for (int l = 0; l < m_rows; ++l) {
            double total = 0.0;
            for (int k = 0; k < n_cols; ++k) total += a.at(l, k) * x2[l * n_cols + k];
            for (int k = 0; k < n_cols; ++k) {
                if (a.at(l, k) == 0) continue;
                const double s = std::max(0.0, total - x2[l * n_cols + k]);
                iec[l * n_cols + k] =
                    std::clamp(1.0 - j_function(std::sqrt(s)), 0.0, 1.0);
            }
        }
        // A-posteriori MI per variable node.
        bool all_converged = true;
        for (int k = 0; k < n_cols; ++k) {
            double s = sigma_ch[k] * sigma_ch[k];
            for (int l = 0; l < m_rows; ++l) {
                if (a.at(l, k) == 0) continue;
                const double x = j_function_inverse(iec[l * n_cols + k]);
                s += a.at(l, k) * x * x;
            }
            trace.app_mi[k] = j_function(std::sqrt(s));
            if (trace.app_mi[k] < 1.0 - eps_conv) all_converged = false;
        }
        trace.iterations_used = iter;
        if (all_converged) {
            trace.converged = true;
            return trace;
        }
    }
    trace.converged = false;
    return trace;
}

// --- Threshold analysis -----------------------------------------------------

namespace {
long long quantize(double v) { return std::llround(v * 1e9); }
}  // namespace

const SymbolPmf& ThresholdAnalyzer::pmf_for_rate(double rate_se) {
    const long long key = quantize(rate_se);
    std::lock_guard<std::mutex> lock(mu_);
    auto it = pmf_cache_.find(key);
    if (it == pmf_cache_.end()) {
        it = pmf_cache_.emplace(key, operating_pmf(rate_se, cfg_.code_rate, cfg_.m)).first;
    }
    return it->second;
}

double ThresholdAnalyzer::required_snr_db(double rate_se) {
    const long long key = quantize(rate_se);
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = required_snr_cache_.find(key);
        if (it != required_snr_cache_.end()) return it->second;
    }
    const SymbolPmf pmf = pmf_for_rate(rate_se);
    const double db =
        linear_to_db(bmd_rate_inverse(make_ask(cfg_.m), pmf, rate_se));
    std::lock_guard<std::mutex> lock(mu_);
    required_snr_cache_[key] = db;
    return db;
}

SurrogateSet ThresholdAnalyzer::surrogates(double rate_se, double snr_db) {
    const auto key = std::make_pair(quantize(rate_se), quantize(snr_db));
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = surrogate_cache_.find(key);
        if (it != surrogate_cache_.end()) return it->second;
    }
    const SymbolPmf pmf = pmf_for_rate(rate_se);
    const ShapedSource src =
        scale_to_snr(make_ask(cfg_.m), pmf, db_to_linear(snr_db));
    SurrogateSet set = fit_surrogates(bit_channel_stats(src), snr_db, rate_se);
    std::lock_guard<std::mutex> lock(mu_);
    surrogate_cache_.emplace(key, set);
    return set;
}

double ThresholdAnalyzer::threshold_db(const BaseMatrix& a, double rate_se) {
    const double cap_db = linear_to_db(std::pow(2.0, 2.0 * rate_se) - 1.0);
    auto converges_at = [&](double snr_db) {
        SurrogateSet set;
        try {
            set = surrogates(rate_se, snr_db);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::degenerate_channel) return false;
            throw;
        }
        return pexit_converges(a, set.sigmas, cfg_.pexit_max_iter, cfg_.eps_conv)
            .converged;
    };
    double lo = cap_db + cfg_.bracket_lo_db;
    double hi = cap_db + cfg_.bracket_hi_db;
    if (!converges_at(hi)) {
        throw Error(ErrorKind::diverged_ensemble,
                    "no convergence at bracket top for R=" + std::to_string(rate_se));
    }
    if (converges_at(lo)) return lo;
    while (hi - lo > cfg_.resolution_db) {
        const double mid = 0.5 * (lo + hi);
        if (converges_at(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

double ThresholdAnalyzer::gap_db(const BaseMatrix& a, double rate_se) {
    const double cap_db = linear_to_db(std::pow(2.0, 2.0 * rate_se) - 1.0);
    return threshold_db(a, rate_se) - cap_db;
}

std::vector<std::pair<double, double>> ThresholdAnalyzer::gap_curve(
    const BaseMatrix& a, const std::vector<double>& r_grid) {
    std::vector<std::pair<double, double>> out;
    out.reserve(r_grid.size());
    for (double r : r_grid) out.emplace_back(r, gap_db(a, r));
    return out;
}

}  // namespace pasldpc
