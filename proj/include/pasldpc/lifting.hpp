#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pasldpc/protograph.hpp"

namespace pasldpc {

struct Lineage {
    std::string base_id;
    int stage1_factor = 1;
    int stage2_factor = 1;
    uint64_t seed = 0;
    // One circulant shift per edge of the stage-1 (binary) matrix, in the
    // edge order of that matrix (row-major scan).
    std::vector<int> shifts;
};

// Binary sparse parity-check matrix in edge form.
struct SparseParityMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<std::pair<int, int>> edges;  // (row, col), unique
    std::vector<int> level_of_column;        // bit level per lifted column
    Lineage origin;

    std::vector<std::vector<int>> rows_of_column() const;
    std::vector<std::vector<int>> cols_of_row() const;
};

// Stage 1: f-fold copy-and-permute resolving parallel edges. Each bundle of
// a parallel edges becomes a disjoint cyclic-shift permutations among the f
// copies, so f must be at least the largest entry.
BaseMatrix expand_parallel(const BaseMatrix& a, int f);

// Stage 2: replace each 1-entry of a binary base matrix by a QxQ circulant
// permutation. Shifts are chosen greedily in a seeded random scan order,
// rejecting 4-cycles where possible and minimizing new 6-cycles.
SparseParityMatrix lift_circulant(const BaseMatrix& a01, int q, uint64_t seed);

// Girth of the Tanner graph up to `cap`; returns cap + 2 when no cycle of
// length <= cap exists.
int girth(const SparseParityMatrix& h, int cap);

void write_alist(const SparseParityMatrix& h, const std::string& path);
SparseParityMatrix read_alist(const std::string& path);

// Compact binary format carrying lineage and column levels alongside edges.
void write_pgc(const SparseParityMatrix& h, const std::string& path);
SparseParityMatrix read_pgc(const std::string& path);

}  // namespace pasldpc
