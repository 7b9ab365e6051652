#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "pasldpc/constellation.hpp"
#include "pasldpc/lifting.hpp"

namespace pasldpc {

// n-type quantization of an amplitude PMF: counts per amplitude summing to n_c.
struct Composition {
    std::vector<long> counts;

    long total() const;
};

Composition composition_from_pmf(const std::vector<double>& amp_pmf, long n_c);

// Number of information bits the matcher carries: floor(log2 multinomial).
int ccdm_input_bits(const Composition& comp);

// Constant-composition distribution matching by exact interval (multinomial
// ranking) arithmetic. encode consumes exactly ccdm_input_bits(comp) bits and
// emits amplitude indices with exactly the prescribed composition.
std::vector<int> ccdm_encode(const std::vector<uint8_t>& bits, const Composition& comp);
std::vector<uint8_t> ccdm_decode(const std::vector<int>& amplitudes, const Composition& comp);

struct PasFrame {
    std::vector<uint8_t> dm_bits;     // k_dm matcher input bits
    std::vector<uint8_t> extra_bits;  // gamma * n_c uniform bits on signs
    std::vector<int> amplitudes;      // n_c amplitude indices
    std::vector<uint8_t> codeword;    // n bits
    std::vector<double> symbols;      // n_c unscaled channel symbols (odd integers)
};

struct BpResult {
    std::vector<uint8_t> bits;
    bool converged = false;
    int iterations = 0;
};

// Flooding sum-product decoder over a fixed parity-check matrix.
class BpDecoder {
public:
    explicit BpDecoder(const SparseParityMatrix& h);

    BpResult decode(const std::vector<double>& llrs, int max_iter = 100,
                    bool early_exit = true) const;

    int n() const { return cols_; }
    int checks() const { return rows_; }
    bool syndrome_ok(const std::vector<uint8_t>& bits) const;

private:
    int rows_, cols_;
    std::vector<int> check_offset_;  // CSR over checks
    std::vector<int> check_vars_;
    std::vector<std::vector<int>> var_edges_;  // edge ids per variable
};

// PAS transmit/receive chain for one lifted code and shaped source.
class PasChain {
public:
    PasChain(const SparseParityMatrix& h, const ShapedSource& source);

    int n() const;
    long n_symbols() const { return n_c_; }
    int dm_bits() const { return k_dm_; }
    long extra_bits() const { return n_extra_; }
    long parity_bits() const;
    int frame_bits() const { return k_dm_ + static_cast<int>(n_extra_); }
    const Composition& composition() const { return comp_; }
    const ShapedSource& source() const { return source_; }
    const BpDecoder& decoder() const { return *decoder_; }

    // Spectral efficiency actually realized (CCDM rate loss included).
    double realized_se() const;

    PasFrame encode(const std::vector<uint8_t>& frame_bits) const;

    // Bitwise soft demapper (prior + mixture likelihood ratio), clamped +-50,
    // arranged in codeword bit order.
    std::vector<double> demap_llrs(const std::vector<double>& y) const;

    std::vector<double> modulate(const PasFrame& frame) const;  // delta-scaled

    BpResult bp_decode(const std::vector<double>& llrs, int max_iter = 100) const;

    // Inverse of encode on a decoded codeword.
    std::vector<uint8_t> recover_frame_bits(const std::vector<uint8_t>& codeword) const;

private:
    void build_systematic(const SparseParityMatrix& h);

    ShapedSource source_;
    std::vector<int> level_of_column_;
    std::vector<std::vector<int>> level_positions_;  // per level, codeword positions
    long n_c_ = 0;
    int k_dm_ = 0;
    long n_extra_ = 0;
    Composition comp_;
    std::unique_ptr<BpDecoder> decoder_;

    // Systematic structure: pivot (parity) columns and the reduced rows over
    // the information positions. Pivots prefer sign-level columns; the lifted
    // matrices of this family have a small structural rank deficit there (the
    // sign block of the published protograph is a single triple edge whose
    // circulant lift is singular at the x=1 component), so the few leftover
    // pivots land on amplitude columns and the matcher bits they displace are
    // carried on spare sign positions instead.
    std::vector<int> pivot_of_row_;
    std::vector<uint8_t> is_pivot_;
    std::vector<uint8_t> is_carrier_;
    std::vector<int> read_from_;  // amplitude-bit source per position
    std::vector<std::pair<int, int>> displaced_;  // (amplitude pivot, carrier)
    std::vector<int> info_positions_;
    std::vector<std::vector<uint64_t>> reduced_rows_;  // over full column index
    int words_ = 0;
};

// Clamp used by the demapper and decoder input path.
constexpr double kLlrClamp = 50.0;

}  // namespace pasldpc
