#include "pasldpc/lifting.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>

#include "pasldpc/errors.hpp"

namespace pasldpc {

std::vector<std::vector<int>> SparseParityMatrix::rows_of_column() const {
    std::vector<std::vector<int>> adj(cols);
    for (const auto& [r, c] : edges) adj[c].push_back(r);
    return adj;
}

std::vector<std::vector<int>> SparseParityMatrix::cols_of_row() const {
    std::vector<std::vector<int>> adj(rows);
    for (const auto& [r, c] : edges) adj[r].push_back(c);
    return adj;
}

BaseMatrix expand_parallel(const BaseMatrix& a, int f) {
    const int max_entry = *std::max_element(a.entries.begin(), a.entries.end());
    if (f < max_entry) {
        throw Error(ErrorKind::cannot_resolve_parallel,
                    "lift factor smaller than the largest parallel-edge count");
    }
    BaseMatrix out;
    out.rows = a.rows * f;
    out.cols = a.cols * f;
    out.entries.assign(static_cast<std::size_t>(out.rows) * out.cols, 0);
    out.level_of_column.resize(out.cols);
    for (int k = 0; k < a.cols; ++k)
        for (int t = 0; t < f; ++t) out.level_of_column[k * f + t] = a.level_of_column[k];
    for (int l = 0; l < a.rows; ++l) {
        for (int k = 0; k < a.cols; ++k) {
            // a parallel edges -> cyclic shifts 0..a-1 among the f copies
            for (int s = 0; s < a.at(l, k); ++s) {
                for (int r = 0; r < f; ++r) {
                    out.at(l * f + r, k * f + (r + s) % f) = 1;
                }
            }
        }
    }
    return out;
}

namespace {

// Alternating shift sum of a quasi-cyclic cycle must be nonzero mod Q for the
// cycle to stay open after lifting.
inline bool closes(long long alt_sum, int q) {
    long long r = alt_sum % q;
    return r == 0;
}

}  // namespace

SparseParityMatrix lift_circulant(const BaseMatrix& a01, int q, uint64_t seed) {
    for (int e : a01.entries) {
        if (e < 0 || e > 1)
            throw Error(ErrorKind::invalid_parameter, "stage-2 lifting needs a binary matrix");
    }
    if (q < 1) throw Error(ErrorKind::invalid_parameter, "Q must be >= 1");

    const int m = a01.rows, n = a01.cols;
    std::vector<int> shift(static_cast<std::size_t>(m) * n, -1);
    auto sh = [&](int l, int k) -> int& { return shift[l * n + k]; };

    std::vector<std::vector<int>> row_cols(m), col_rows(n);  // assigned edges only
    std::mt19937_64 rng(seed);
    std::vector<int> candidates(q);

    std::vector<int> edge_order_shifts;
    for (int l = 0; l < m; ++l) {
        for (int k = 0; k < n; ++k) {
            if (a01.at(l, k) == 0) continue;
            std::iota(candidates.begin(), candidates.end(), 0);
            std::shuffle(candidates.begin(), candidates.end(), rng);
            const int max_scan = std::min(q, 64);

            int best_shift = candidates[0];
            long long best_c4 = -1, best_c6 = -1;
            for (int scan = 0; scan < max_scan; ++scan) {
                const int s = candidates[scan];
                // 4-cycles with already placed edges: (l,k),(l,k'),(l',k'),(l',k)
                long long c4 = 0;
                for (int lp : col_rows[k]) {
                    for (int kp : row_cols[l]) {
                        if (sh(lp, kp) < 0) continue;
                        if (closes(static_cast<long long>(s) - sh(l, kp) + sh(lp, kp) - sh(lp, k), q))
                            ++c4;
                    }
                }
                long long c6 = 0;
                if (c4 == 0) {
                    // 6-cycles through the new edge using placed edges only.
                    for (int k1 : row_cols[l]) {
                        const long long p1 = s - sh(l, k1);
                        for (int l1 : col_rows[k1]) {
                            if (l1 == l) continue;
                            const long long p2 = p1 + sh(l1, k1);
                            for (int k2 : row_cols[l1]) {
                                if (k2 == k1 || k2 == k || sh(l1, k2) < 0) continue;
                                const long long p3 = p2 - sh(l1, k2);
                                for (int l2 : col_rows[k2]) {
                                    if (l2 == l1 || l2 == l || sh(l2, k) < 0) continue;
                                    if (closes(p3 + sh(l2, k2) - sh(l2, k), q)) ++c6;
                                }
                            }
                        }
                    }
                }
                if (best_c4 < 0 || c4 < best_c4 || (c4 == best_c4 && c6 < best_c6)) {
                    best_c4 = c4;
                    best_c6 = c6;
                    best_shift = s;
                }
                if (c4 == 0 && c6 == 0) break;
            }
            sh(l, k) = best_shift;
            row_cols[l].push_back(k);
            col_rows[k].push_back(l);
            edge_order_shifts.push_back(best_shift);
        }
    }

    SparseParityMatrix h;
    h.rows = m * q;
    h.cols = n * q;
    h.level_of_column.resize(h.cols);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < q; ++j) h.level_of_column[k * q + j] = a01.level_of_column[k];
    for (int l = 0; l < m; ++l) {
        for (int k = 0; k < n; ++k) {
            if (a01.at(l, k) == 0) continue;
            const int s = sh(l, k);
            for (int j = 0; j < q; ++j) {
                h.edges.emplace_back(l * q + j, k * q + (j + s) % q);
            }
        }
    }
    h.origin.stage2_factor = q;
    h.origin.seed = seed;
    h.origin.shifts = std::move(edge_order_shifts);
    return h;
}

int girth(const SparseParityMatrix& h, int cap) {
    if (cap < 4 || cap % 2 != 0) {
        throw Error(ErrorKind::invalid_parameter, "girth cap must be even and >= 4");
    }
    // Vertices: variables [0, cols), checks [cols, cols+rows).
    const int nv = h.cols + h.rows;
    std::vector<std::vector<int>> adj(nv);
    for (const auto& [r, c] : h.edges) {
        adj[c].push_back(h.cols + r);
        adj[h.cols + r].push_back(c);
    }
    int best = cap + 2;
    std::vector<int> dist(nv, -1), parent(nv, -1), queue;
    queue.reserve(nv);
    // Every cycle passes through a check node, so check roots suffice.
    for (int root = h.cols; root < nv; ++root) {
        std::fill(dist.begin(), dist.end(), -1);
        queue.clear();
        queue.push_back(root);
        dist[root] = 0;
        parent[root] = -1;
        const int depth_limit = best / 2;  // shrinks as better cycles appear
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const int u = queue[head];
            if (dist[u] >= depth_limit) break;
            for (int w : adj[u]) {
                if (w == parent[u]) continue;
                if (dist[w] < 0) {
                    dist[w] = dist[u] + 1;
                    parent[w] = u;
                    queue.push_back(w);
                } else {
                    best = std::min(best, dist[u] + dist[w] + 1);
                }
            }
        }
        if (best == 4) break;
    }
    return best <= cap ? best : cap + 2;
}

void write_alist(const SparseParityMatrix& h, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::io_failure, "cannot open " + path);
    auto col_adj = h.rows_of_column();
    auto row_adj = h.cols_of_row();
    for (auto& v : col_adj) std::sort(v.begin(), v.end());
    for (auto& v : row_adj) std::sort(v.begin(), v.end());
    std::size_t dc = 0, dr = 0;
    for (const auto& v : col_adj) dc = std::max(dc, v.size());
    for (const auto& v : row_adj) dr = std::max(dr, v.size());
    out << h.cols << " " << h.rows << "\n" << dc << " " << dr << "\n";
    for (std::size_t k = 0; k < col_adj.size(); ++k)
        out << (k ? " " : "") << col_adj[k].size();
    out << "\n";
    for (std::size_t l = 0; l < row_adj.size(); ++l)
        out << (l ? " " : "") << row_adj[l].size();
    out << "\n";
    for (const auto& v : col_adj) {
        for (std::size_t i = 0; i < v.size(); ++i) out << (i ? " " : "") << v[i] + 1;
        out << "\n";
    }
    for (const auto& v : row_adj) {
        for (std::size_t i = 0; i < v.size(); ++i) out << (i ? " " : "") << v[i] + 1;
        out << "\n";
    }
}

SparseParityMatrix read_alist(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io_failure, "cannot open " + path);
    SparseParityMatrix h;
    std::size_t dc = 0, dr = 0;
    if (!(in >> h.cols >> h.rows >> dc >> dr)) {
        throw Error(ErrorKind::io_failure, "bad alist header");
    }
    std::vector<int> col_deg(h.cols), row_deg(h.rows);
    for (int& d : col_deg)
        if (!(in >> d)) throw Error(ErrorKind::io_failure, "bad alist column degrees");
    for (int& d : row_deg)
        if (!(in >> d)) throw Error(ErrorKind::io_failure, "bad alist row degrees");
    for (int k = 0; k < h.cols; ++k) {
        for (int i = 0; i < col_deg[k]; ++i) {
            int r = 0;
            if (!(in >> r) || r < 1 || r > h.rows)
                throw Error(ErrorKind::io_failure, "bad alist column entry");
            h.edges.emplace_back(r - 1, k);
        }
    }
    // Row lists are redundant with the column lists; skip them if present.
    return h;
}

namespace {

template <typename T>
void put(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void get(std::ifstream& in, T& v) {
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
}

}  // namespace

void write_pgc(const SparseParityMatrix& h, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::io_failure, "cannot open " + path);
    out.write("PGC1", 4);
    put(out, static_cast<int32_t>(h.rows));
    put(out, static_cast<int32_t>(h.cols));
    put(out, static_cast<int32_t>(h.origin.stage1_factor));
    put(out, static_cast<int32_t>(h.origin.stage2_factor));
    put(out, static_cast<uint64_t>(h.origin.seed));
    put(out, static_cast<int32_t>(h.origin.base_id.size()));
    out.write(h.origin.base_id.data(), static_cast<std::streamsize>(h.origin.base_id.size()));
    put(out, static_cast<int32_t>(h.origin.shifts.size()));
    for (int s : h.origin.shifts) put(out, static_cast<int32_t>(s));
    put(out, static_cast<int32_t>(h.level_of_column.size()));
    for (int lvl : h.level_of_column) put(out, static_cast<int8_t>(lvl));
    put(out, static_cast<int64_t>(h.edges.size()));
    for (const auto& [r, c] : h.edges) {
        put(out, static_cast<int32_t>(r));
        put(out, static_cast<int32_t>(c));
    }
}

SparseParityMatrix read_pgc(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io_failure, "cannot open " + path);
    char magic[4] = {};
    in.read(magic, 4);
    if (std::memcmp(magic, "PGC1", 4) != 0) {
        throw Error(ErrorKind::io_failure, "not a PGC1 file: " + path);
    }
    SparseParityMatrix h;
    int32_t rows = 0, cols = 0, f = 0, q2 = 0, id_len = 0, n_shifts = 0, n_levels = 0;
    uint64_t seed = 0;
    get(in, rows);
    get(in, cols);
    get(in, f);
    get(in, q2);
    get(in, seed);
    get(in, id_len);
    h.origin.base_id.resize(id_len);
    in.read(h.origin.base_id.data(), id_len);
    get(in, n_shifts);
    h.origin.shifts.resize(n_shifts);
    for (int& s : h.origin.shifts) {
        int32_t v = 0;
        get(in, v);
        s = v;
    }
    get(in, n_levels);
    h.level_of_column.resize(n_levels);
    for (int& lvl : h.level_of_column) {
        int8_t v = 0;
        get(in, v);
        lvl = v;
    }
    int64_t n_edges = 0;
    get(in, n_edges);
    h.rows = rows;
    h.cols = cols;
    h.origin.stage1_factor = f;
    h.origin.stage2_factor = q2;
    h.origin.seed = seed;
    h.edges.reserve(n_edges);
    for (int64_t i = 0; i < n_edges; ++i) {
        int32_t r = 0, c = 0;
        get(in, r);
        get(in, c);
        h.edges.emplace_back(r, c);
    }
    if (!in) throw Error(ErrorKind::io_failure, "truncated PGC1 file: " + path);
    return h;
}

}  // namespace pasldpc
