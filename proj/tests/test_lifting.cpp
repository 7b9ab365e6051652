#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <map>
#include <set>

#include "pasldpc/errors.hpp"
#include "pasldpc/lifting.hpp"

using namespace pasldpc;

namespace {

// Independent 4-cycle detector: two columns sharing two rows close a 4-cycle.
bool has_four_cycle(const SparseParityMatrix& h) {
    const auto cols = h.rows_of_column();
    std::set<std::pair<int, int>> seen;
    for (int j = 0; j < h.cols; ++j) {
        for (std::size_t a = 0; a + 1 < cols[j].size(); ++a) {
            for (std::size_t b = a + 1; b < cols[j].size(); ++b) {
                if (!seen.insert({cols[j][a], cols[j][b]}).second) return true;
            }
        }
    }
    return false;
}

BaseMatrix tiny_binary(int rows, int cols, std::vector<int> entries) {
    BaseMatrix a;
    a.rows = rows;
    a.cols = cols;
    a.entries = std::move(entries);
    a.level_of_column.assign(cols, 1);
    return a;
}

}  // namespace

TEST_CASE("expand_parallel identity for binary matrices") {
    const BaseMatrix a = tiny_binary(2, 3, {1, 1, 0, 0, 1, 1});
    const BaseMatrix out = expand_parallel(a, 1);
    CHECK(out == a);
}

TEST_CASE("triple parallel edge becomes an all-ones 3x3 block") {
    const BaseMatrix a = tiny_binary(1, 1, {3});
    const BaseMatrix out = expand_parallel(a, 3);
    REQUIRE(out.rows == 3);
    REQUIRE(out.cols == 3);
    for (int e : out.entries) CHECK(e == 1);
}

TEST_CASE("expand_parallel on the robust matrix") {
    const BaseMatrix a = robust_base_matrix();
    int total = 0;
    for (int e : a.entries) total += e;
    const BaseMatrix out = expand_parallel(a, 3);
    REQUIRE(out.rows == 9);
    REQUIRE(out.cols == 48);
    int edges = 0;
    for (int e : out.entries) {
        CHECK((e == 0 || e == 1));
        edges += e;
    }
    CHECK(edges == 3 * total);
    // Column levels replicate.
    for (int k = 0; k < 48; ++k) {
        CHECK(out.level_of_column[k] == a.level_of_column[k / 3]);
    }
    // Degree preservation per copied column.
    for (int k = 0; k < 48; ++k) {
        CHECK(out.column_sum(k) == a.column_sum(k / 3));
    }
    CHECK_THROWS_AS(expand_parallel(a, 2), Error);
}

TEST_CASE("lift with Q=1 is the identity") {
    const BaseMatrix a = tiny_binary(2, 3, {1, 1, 0, 0, 1, 1});
    const SparseParityMatrix h = lift_circulant(a, 1, 123);
    CHECK(h.rows == 2);
    CHECK(h.cols == 3);
    std::set<std::pair<int, int>> expected{{0, 0}, {0, 1}, {1, 1}, {1, 2}};
    CHECK(std::set<std::pair<int, int>>(h.edges.begin(), h.edges.end()) == expected);
}

TEST_CASE("lifted robust matrix: dimensions, degrees, determinism, girth") {
    const BaseMatrix binary = expand_parallel(robust_base_matrix(), 3);
    const int q = 28;
    const SparseParityMatrix h = lift_circulant(binary, q, 7);
    CHECK(h.rows == 9 * q);
    CHECK(h.cols == 48 * q);

    const auto cols = h.rows_of_column();
    for (int j = 0; j < h.cols; ++j) {
        CHECK(static_cast<int>(cols[j].size()) == binary.column_sum(j / q));
    }
    const auto rows = h.cols_of_row();
    for (int i = 0; i < h.rows; ++i) {
        CHECK(static_cast<int>(rows[i].size()) == binary.row_sum(i / q));
    }
    // No duplicate edges.
    std::set<std::pair<int, int>> unique_edges(h.edges.begin(), h.edges.end());
    CHECK(unique_edges.size() == h.edges.size());

    const SparseParityMatrix h2 = lift_circulant(binary, q, 7);
    CHECK(h2.edges == h.edges);
    CHECK(h2.origin.shifts == h.origin.shifts);
    const SparseParityMatrix h3 = lift_circulant(binary, q, 8);
    CHECK(h3.edges != h.edges);
}

TEST_CASE("girth of a moderately lifted robust matrix") {
    const BaseMatrix binary = expand_parallel(robust_base_matrix(), 3);
    const SparseParityMatrix h = lift_circulant(binary, 169, 7);
    CHECK(girth(h, 8) >= 6);
    CHECK(!has_four_cycle(h));
}

TEST_CASE("girth basics") {
    // 2x2 all-ones: the minimal 4-cycle.
    const SparseParityMatrix four = lift_circulant(tiny_binary(2, 2, {1, 1, 1, 1}), 1, 0);
    CHECK(girth(four, 8) == 4);

    // A tree-shaped matrix has no cycles.
    const SparseParityMatrix tree = lift_circulant(tiny_binary(2, 3, {1, 1, 0, 0, 1, 1}), 1, 0);
    CHECK(girth(tree, 8) == 10);
}

TEST_CASE("alist roundtrip") {
    const BaseMatrix binary = expand_parallel(robust_base_matrix(), 3);
    const SparseParityMatrix h = lift_circulant(binary, 7, 3);
    const std::string path = "test_roundtrip.alist";
    write_alist(h, path);
    const SparseParityMatrix back = read_alist(path);
    CHECK(back.rows == h.rows);
    CHECK(back.cols == h.cols);
    CHECK(std::set<std::pair<int, int>>(back.edges.begin(), back.edges.end()) ==
          std::set<std::pair<int, int>>(h.edges.begin(), h.edges.end()));
    std::remove(path.c_str());
}

TEST_CASE("pgc roundtrip keeps lineage and levels") {
    const BaseMatrix binary = expand_parallel(robust_base_matrix(), 3);
    SparseParityMatrix h = lift_circulant(binary, 7, 3);
    h.origin.base_id = "arob";
    h.origin.stage1_factor = 3;
    const std::string path = "test_roundtrip.pgc";
    write_pgc(h, path);
    const SparseParityMatrix back = read_pgc(path);
    CHECK(back.rows == h.rows);
    CHECK(back.cols == h.cols);
    CHECK(back.edges == h.edges);
    CHECK(back.level_of_column == h.level_of_column);
    CHECK(back.origin.base_id == "arob");
    CHECK(back.origin.stage1_factor == 3);
    CHECK(back.origin.stage2_factor == h.origin.stage2_factor);
    CHECK(back.origin.seed == h.origin.seed);
    CHECK(back.origin.shifts == h.origin.shifts);
    std::remove(path.c_str());
}
