#include "pasldpc/paschain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pasldpc/errors.hpp"

namespace pasldpc {

namespace {

// Minimal unsigned big integer: little-endian 64-bit limbs, no leading zeros.
struct BigUint {
    std::vector<uint64_t> w;

    bool is_zero() const { return w.empty(); }

    void trim() {
        while (!w.empty() && w.back() == 0) w.pop_back();
    }

    static BigUint one() { return BigUint{{1}}; }

    void mul_small(uint64_t x) {
        unsigned __int128 carry = 0;
        for (uint64_t& limb : w) {
            const unsigned __int128 p = static_cast<unsigned __int128>(limb) * x + carry;
            limb = static_cast<uint64_t>(p);
            carry = p >> 64;
        }
        if (carry) w.push_back(static_cast<uint64_t>(carry));
    }

    void div_small(uint64_t x) {
        unsigned __int128 rem = 0;
        for (std::size_t i = w.size(); i-- > 0;) {
            const unsigned __int128 cur = (rem << 64) | w[i];
            w[i] = static_cast<uint64_t>(cur / x);
            rem = cur % x;
        }
        trim();
    }

    void add(const BigUint& o) {
        if (o.w.size() > w.size()) w.resize(o.w.size(), 0);
        unsigned __int128 carry = 0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            unsigned __int128 s = carry + w[i];
            if (i < o.w.size()) s += o.w[i];
            w[i] = static_cast<uint64_t>(s);
            carry = s >> 64;
        }
        if (carry) w.push_back(static_cast<uint64_t>(carry));
    }

    // Requires *this >= o.
    void sub(const BigUint& o) {
        long long borrow = 0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            unsigned __int128 lhs = w[i];
            unsigned __int128 rhs = (i < o.w.size() ? o.w[i] : 0);
            rhs += static_cast<unsigned __int128>(borrow);
            if (lhs >= rhs) {
                w[i] = static_cast<uint64_t>(lhs - rhs);
                borrow = 0;
            } else {
                w[i] = static_cast<uint64_t>((lhs + (static_cast<unsigned __int128>(1) << 64)) - rhs);
                borrow = 1;
            }
        }
        trim();
    }

    int cmp(const BigUint& o) const {
        if (w.size() != o.w.size()) return w.size() < o.w.size() ? -1 : 1;
        for (std::size_t i = w.size(); i-- > 0;) {
            if (w[i] != o.w[i]) return w[i] < o.w[i] ? -1 : 1;
        }
        return 0;
    }

    std::size_t bit_length() const {
        if (w.empty()) return 0;
        return 64 * (w.size() - 1) + (64 - std::countl_zero(w.back()));
    }

    bool get_bit(std::size_t i) const {
        const std::size_t limb = i / 64;
        if (limb >= w.size()) return false;
        return (w[limb] >> (i % 64)) & 1;
    }

    void set_bit(std::size_t i) {
        const std::size_t limb = i / 64;
        if (limb >= w.size()) w.resize(limb + 1, 0);
        w[limb] |= (1ull << (i % 64));
    }
};

BigUint multinomial(const Composition& comp) {
    BigUint c = BigUint::one();
    uint64_t t = 0;
    for (long count : comp.counts) {
        for (long j = 1; j <= count; ++j) {
            ++t;
            c.mul_small(t);
            c.div_small(static_cast<uint64_t>(j));
        }
    }
    return c;
}

int inverse_gray(int gray) {
    int j = gray;
    for (int shift = 1; shift < 16; shift <<= 1) j ^= j >> shift;
    return j;
}

}  // namespace

long Composition::total() const {
    return std::accumulate(counts.begin(), counts.end(), 0L);
}

Composition composition_from_pmf(const std::vector<double>& amp_pmf, long n_c) {
    if (n_c < 1) throw Error(ErrorKind::invalid_parameter, "n_c must be >= 1");
    Composition comp;
    comp.counts.resize(amp_pmf.size());
    std::vector<std::pair<double, std::size_t>> remainders;
    long assigned = 0;
    for (std::size_t i = 0; i < amp_pmf.size(); ++i) {
        const double ideal = amp_pmf[i] * static_cast<double>(n_c);
        comp.counts[i] = static_cast<long>(std::floor(ideal));
        assigned += comp.counts[i];
        remainders.emplace_back(ideal - std::floor(ideal), i);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (long r = 0; r < n_c - assigned; ++r) {
        comp.counts[remainders[r % remainders.size()].second] += 1;
    }
    return comp;
}

int ccdm_input_bits(const Composition& comp) {
    const std::size_t bits = multinomial(comp).bit_length();
    return bits > 0 ? static_cast<int>(bits) - 1 : 0;
}

std::vector<int> ccdm_encode(const std::vector<uint8_t>& bits, const Composition& comp) {
    const int k = ccdm_input_bits(comp);
    if (static_cast<int>(bits.size()) != k) {
        throw Error(ErrorKind::invalid_parameter,
                    "ccdm_encode expects exactly " + std::to_string(k) + " bits");
    }
    BigUint u;
    for (int i = 0; i < k; ++i) {
        if (bits[i]) u.set_bit(k - 1 - i);  // bits[0] is the MSB
    }
    BigUint count = multinomial(comp);
    std::vector<long> remaining = comp.counts;
    long t = comp.total();
    std::vector<int> out;
    out.reserve(t);
    while (t > 0) {
        for (std::size_t a = 0; a < remaining.size(); ++a) {
            if (remaining[a] == 0) continue;
            // Sequences starting with symbol a: count * c_a / t (exact).
            BigUint na = count;
            na.mul_small(static_cast<uint64_t>(remaining[a]));
            na.div_small(static_cast<uint64_t>(t));
            if (u.cmp(na) < 0) {
                out.push_back(static_cast<int>(a));
                count = std::move(na);
                remaining[a] -= 1;
                t -= 1;
                break;
            }
            u.sub(na);
        }
    }
    return out;
}

std::vector<uint8_t> ccdm_decode(const std::vector<int>& amplitudes, const Composition& comp) {
    std::vector<long> check(comp.counts.size(), 0);
    for (int a : amplitudes) {
        if (a < 0 || a >= static_cast<int>(check.size())) {
            throw Error(ErrorKind::composition_mismatch, "amplitude index out of range");
        }
        check[a] += 1;
    }
    if (check != comp.counts) {
        throw Error(ErrorKind::composition_mismatch,
                    "sequence does not match the prescribed composition");
    }
    const int k = ccdm_input_bits(comp);
    BigUint u;
    BigUint count = multinomial(comp);
    std::vector<long> remaining = comp.counts;
    long t = comp.total();
    for (int sym : amplitudes) {
        for (int a = 0; a < sym; ++a) {
            if (remaining[a] == 0) continue;
            BigUint na = count;
            na.mul_small(static_cast<uint64_t>(remaining[a]));
            na.div_small(static_cast<uint64_t>(t));
            u.add(na);
        }
        BigUint chosen = count;
        chosen.mul_small(static_cast<uint64_t>(remaining[sym]));
        chosen.div_small(static_cast<uint64_t>(t));
        count = std::move(chosen);
        remaining[sym] -= 1;
        t -= 1;
    }
    std::vector<uint8_t> bits(k);
    for (int i = 0; i < k; ++i) bits[i] = u.get_bit(k - 1 - i) ? 1 : 0;
    return bits;
}

// --- BP decoder ---------------------------------------------------------

BpDecoder::BpDecoder(const SparseParityMatrix& h) : rows_(h.rows), cols_(h.cols) {
    std::vector<std::vector<int>> per_check(rows_);
    for (const auto& [r, c] : h.edges) per_check[r].push_back(c);
    check_offset_.resize(rows_ + 1, 0);
    for (int r = 0; r < rows_; ++r) {
        std::sort(per_check[r].begin(), per_check[r].end());
        check_offset_[r + 1] = check_offset_[r] + static_cast<int>(per_check[r].size());
    }
    check_vars_.reserve(check_offset_.back());
    var_edges_.resize(cols_);
    for (int r = 0; r < rows_; ++r) {
        for (int c : per_check[r]) {
            var_edges_[c].push_back(static_cast<int>(check_vars_.size()));
            check_vars_.push_back(c);
        }
    }
}

bool BpDecoder::syndrome_ok(const std::vector<uint8_t>& bits) const {
    for (int r = 0; r < rows_; ++r) {
        int parity = 0;
        for (int e = check_offset_[r]; e < check_offset_[r + 1]; ++e) {
            parity ^= bits[check_vars_[e]];
        }
        if (parity) return false;
    }
    return true;
}

BpResult BpDecoder::decode(const std::vector<double>& llrs, int max_iter,
                           bool early_exit) const {
    if (static_cast<int>(llrs.size()) != cols_) {
        throw Error(ErrorKind::invalid_parameter, "LLR vector length mismatch");
    }
    BpResult result;
    result.bits.resize(cols_);
    auto hard = [&](const std::vector<double>& totals) {
        for (int v = 0; v < cols_; ++v) result.bits[v] = totals[v] < 0.0 ? 1 : 0;
    };
    std::vector<double> totals(llrs);
    hard(totals);
    if (early_exit && syndrome_ok(result.bits)) {
        result.converged = true;
        result.iterations = 0;
        return result;
    }

    const int n_edges = static_cast<int>(check_vars_.size());
    std::vector<double> r_msg(n_edges, 0.0), q_tanh(n_edges, 0.0);
    for (int iter = 1; iter <= max_iter; ++iter) {
        // Variable-to-check, in tanh domain.
        for (int v = 0; v < cols_; ++v) {
            double total = std::clamp(llrs[v], -kLlrClamp, kLlrClamp);
            for (int e : var_edges_[v]) total += r_msg[e];
            totals[v] = total;
            for (int e : var_edges_[v]) {
                q_tanh[e] = std::tanh(0.5 * (total - r_msg[e]));
            }
        }
        // Check-to-variable with exclusion via forward/backward products.
        for (int r = 0; r < rows_; ++r) {
            const int lo = check_offset_[r], hi = check_offset_[r + 1];
            double forward = 1.0;
            static thread_local std::vector<double> backward;
            backward.resize(hi - lo + 1);
            backward[hi - lo] = 1.0;
            for (int e = hi - 1; e >= lo; --e) {
                backward[e - lo] = backward[e - lo + 1] * q_tanh[e];
            }
            for (int e = lo; e < hi; ++e) {
                const double excl = forward * backward[e - lo + 1];
                const double clamped = std::clamp(excl, -(1.0 - 1e-14), 1.0 - 1e-14);
                r_msg[e] = 2.0 * std::atanh(clamped);
                forward *= q_tanh[e];
            }
        }
        for (int v = 0; v < cols_; ++v) {
            double total = std::clamp(llrs[v], -kLlrClamp, kLlrClamp);
            for (int e : var_edges_[v]) total += r_msg[e];
            totals[v] = total;
        }
        hard(totals);
        result.iterations = iter;
        if (early_exit && syndrome_ok(result.bits)) {
            result.converged = true;
            return result;
        }
    }
    result.converged = syndrome_ok(result.bits);
    return result;
}

// --- PAS chain ------------------------------------------------------------

PasChain::PasChain(const SparseParityMatrix& h, const ShapedSource& source)
    : source_(source) {
    const int m = source_.constellation.m;
    if (static_cast<int>(h.level_of_column.size()) != h.cols) {
        throw Error(ErrorKind::invalid_config, "parity-check matrix lacks bit-level tags");
    }
    if (h.cols % m != 0) {
        throw Error(ErrorKind::invalid_config, "blocklength not divisible by m");
    }
    level_of_column_ = h.level_of_column;
    n_c_ = h.cols / m;
    level_positions_.assign(m, {});
    for (int j = 0; j < h.cols; ++j) {
        const int lvl = level_of_column_[j];
        if (lvl < 1 || lvl > m) {
            throw Error(ErrorKind::invalid_config, "bit level out of range");
        }
        level_positions_[lvl - 1].push_back(j);
    }
    for (const auto& positions : level_positions_) {
        if (static_cast<long>(positions.size()) != n_c_) {
            throw Error(ErrorKind::invalid_config,
                        "bit levels are not balanced across columns");
        }
    }
    comp_ = composition_from_pmf(
        amplitude_marginal(source_.constellation, source_.pmf), n_c_);
    k_dm_ = ccdm_input_bits(comp_);
    decoder_ = std::make_unique<BpDecoder>(h);
    build_systematic(h);
    n_extra_ = n_c_ - static_cast<long>(pivot_of_row_.size());
}

int PasChain::n() const { return decoder_->n(); }

long PasChain::parity_bits() const { return static_cast<long>(pivot_of_row_.size()); }

double PasChain::realized_se() const {
    return static_cast<double>(k_dm_ + n_extra_) / static_cast<double>(n_c_);
}

void PasChain::build_systematic(const SparseParityMatrix& h) {
    const int n = h.cols, r = h.rows;
    words_ = (n + 63) / 64;
    std::vector<std::vector<uint64_t>> rowbits(r, std::vector<uint64_t>(words_, 0));
    for (const auto& [row, col] : h.edges) {
        rowbits[row][col / 64] ^= (1ull << (col % 64));  // xor folds duplicates
    }
    is_pivot_.assign(n, 0);
    is_carrier_.assign(n, 0);
    pivot_of_row_.clear();
    displaced_.clear();
    read_from_.resize(n);
    for (int j = 0; j < n; ++j) read_from_[j] = j;
    int rank = 0;
    auto eliminate_on = [&](int col) {
        int pivot_row = -1;
        for (int row = rank; row < r; ++row) {
            if ((rowbits[row][col / 64] >> (col % 64)) & 1) {
                pivot_row = row;
                break;
            }
        }
        if (pivot_row < 0) return false;
        std::swap(rowbits[rank], rowbits[pivot_row]);
        for (int row = 0; row < r; ++row) {
            if (row == rank) continue;
            if ((rowbits[row][col / 64] >> (col % 64)) & 1) {
                for (int w = 0; w < words_; ++w) rowbits[row][w] ^= rowbits[rank][w];
            }
        }
        pivot_of_row_.push_back(col);
        is_pivot_[col] = 1;
        ++rank;
        return true;
    };
    // Pivots prefer sign-level columns so amplitude bits stay systematic.
    for (int col : level_positions_[0]) {
        if (eliminate_on(col) && rank == r) break;
    }
    std::vector<int> amplitude_pivots;
    if (rank < r) {
        // Structural sign-column rank deficit (see header note): place the
        // remaining pivots on amplitude columns and carry their displaced
        // matcher bits on spare sign positions.
        for (int j = 0; j < n && rank < r; ++j) {
            if (is_pivot_[j] || level_of_column_[j] == 1) continue;
            if (eliminate_on(j)) amplitude_pivots.push_back(j);
        }
    }
    if (rank < r) {
        throw Error(ErrorKind::encoder_construction_failure,
                    "parity-check matrix is rank deficient");
    }
    // Reserve the last free sign positions as carriers for displaced bits.
    std::vector<int> free_signs;
    for (int pos : level_positions_[0]) {
        if (!is_pivot_[pos]) free_signs.push_back(pos);
    }
    if (free_signs.size() < amplitude_pivots.size()) {
        throw Error(ErrorKind::encoder_construction_failure,
                    "not enough sign positions to carry displaced matcher bits");
    }
    for (std::size_t i = 0; i < amplitude_pivots.size(); ++i) {
        const int carrier = free_signs[free_signs.size() - 1 - i];
        displaced_.emplace_back(amplitude_pivots[i], carrier);
        is_carrier_[carrier] = 1;
        read_from_[amplitude_pivots[i]] = carrier;
    }
    reduced_rows_.assign(rowbits.begin(), rowbits.begin() + rank);
    info_positions_.clear();
    for (int j = 0; j < n; ++j) {
        if (!is_pivot_[j] && !is_carrier_[j]) info_positions_.push_back(j);
    }
}

PasFrame PasChain::encode(const std::vector<uint8_t>& frame_bits) const {
    if (static_cast<int>(frame_bits.size()) != this->frame_bits()) {
        throw Error(ErrorKind::invalid_parameter,
                    "frame must have k_dm + gamma*n_c bits");
    }
    const int m = source_.constellation.m;
    PasFrame frame;
    frame.dm_bits.assign(frame_bits.begin(), frame_bits.begin() + k_dm_);
    frame.extra_bits.assign(frame_bits.begin() + k_dm_, frame_bits.end());
    frame.amplitudes = ccdm_encode(frame.dm_bits, comp_);

    const int n = this->n();
    frame.codeword.assign(n, 0);
    for (long t = 0; t < n_c_; ++t) {
        const int j = frame.amplitudes[t];
        const int gray = j ^ (j >> 1);
        for (int level = 2; level <= m; ++level) {
            frame.codeword[level_positions_[level - 1][t]] =
                static_cast<uint8_t>((gray >> (m - level)) & 1);
        }
    }
    // Matcher bits displaced by amplitude pivots ride on carrier sign
    // positions; the pivot positions themselves are computed as parity below.
    for (const auto& [dis, carrier] : displaced_) {
        frame.codeword[carrier] = frame.codeword[dis];
        frame.codeword[dis] = 0;
    }
    long e = 0;
    for (int pos : level_positions_[0]) {
        if (!is_pivot_[pos] && !is_carrier_[pos]) frame.codeword[pos] = frame.extra_bits[e++];
    }
    // Parity via the cached reduced rows: each row reads its info support.
    std::vector<uint64_t> cw(words_, 0);
    for (int j = 0; j < n; ++j) {
        if (frame.codeword[j]) cw[j / 64] |= (1ull << (j % 64));
    }
    for (std::size_t row = 0; row < reduced_rows_.size(); ++row) {
        uint64_t acc = 0;
        for (int w = 0; w < words_; ++w) acc ^= reduced_rows_[row][w] & cw[w];
        const uint8_t parity = static_cast<uint8_t>(std::popcount(acc) & 1);
        frame.codeword[pivot_of_row_[row]] = parity;
        if (parity) {
            const int pos = pivot_of_row_[row];
            cw[pos / 64] |= (1ull << (pos % 64));
        }
    }
    // Transmitted amplitudes come from the codeword: where a pivot landed on
    // an amplitude column the parity bit overrides the matcher output there.
    frame.symbols.resize(n_c_);
    for (long t = 0; t < n_c_; ++t) {
        int gray = 0;
        for (int level = 2; level <= m; ++level) {
            gray = (gray << 1) | frame.codeword[level_positions_[level - 1][t]];
        }
        const double amp = 2.0 * inverse_gray(gray) + 1.0;
        const int sign_bit = frame.codeword[level_positions_[0][t]];
        frame.symbols[t] = sign_bit ? amp : -amp;
    }
    return frame;
}

std::vector<double> PasChain::modulate(const PasFrame& frame) const {
    std::vector<double> x(frame.symbols.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = source_.delta * frame.symbols[i];
    return x;
}

std::vector<double> PasChain::demap_llrs(const std::vector<double>& y) const {
    if (static_cast<long>(y.size()) != n_c_) {
        throw Error(ErrorKind::invalid_parameter, "received vector length mismatch");
    }
    const auto& c = source_.constellation;
    const int m = c.m;
    std::vector<double> llrs(this->n(), 0.0);
    std::vector<double> logw(c.size());
    for (long t = 0; t < n_c_; ++t) {
        double peak = -1e300;
        for (int i = 0; i < c.size(); ++i) {
            const double d = y[t] - source_.delta * c.points[i];
            logw[i] = (source_.pmf.probs[i] > 0.0 ? std::log(source_.pmf.probs[i]) : -1e300) -
                      0.5 * d * d;
            peak = std::max(peak, logw[i]);
        }
        for (int level = 1; level <= m; ++level) {
            double s0 = 0.0, s1 = 0.0;
            for (int i = 0; i < c.size(); ++i) {
                const double w = std::exp(logw[i] - peak);
                if (c.bit(i, level) == 0) {
                    s0 += w;
                } else {
                    s1 += w;
                }
            }
            double llr;
            if (s0 <= 0.0) {
                llr = -kLlrClamp;
            } else if (s1 <= 0.0) {
                llr = kLlrClamp;
            } else {
                llr = std::clamp(std::log(s0) - std::log(s1), -kLlrClamp, kLlrClamp);
            }
            llrs[level_positions_[level - 1][t]] = llr;
        }
    }
    return llrs;
}

BpResult PasChain::bp_decode(const std::vector<double>& llrs, int max_iter) const {
    return decoder_->decode(llrs, max_iter);
}

std::vector<uint8_t> PasChain::recover_frame_bits(const std::vector<uint8_t>& codeword) const {
    const int m = source_.constellation.m;
    std::vector<int> amps(n_c_);
    for (long t = 0; t < n_c_; ++t) {
        int gray = 0;
        for (int level = 2; level <= m; ++level) {
            gray = (gray << 1) | codeword[read_from_[level_positions_[level - 1][t]]];
        }
        amps[t] = inverse_gray(gray);
    }
    std::vector<uint8_t> bits = ccdm_decode(amps, comp_);
    bits.reserve(bits.size() + n_extra_);
    for (int pos : level_positions_[0]) {
        if (!is_pivot_[pos] && !is_carrier_[pos]) bits.push_back(codeword[pos]);
    }
    return bits;
}

}  // namespace pasldpc
