#pragma once

// Test-side reference models. Each one is written from the format and
// dataflow definitions without calling the library code it checks.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <tuple>
#include <utility>
#include <vector>

#include "codr/conv.hpp"
#include "codr/reuse.hpp"

namespace oracle {

inline int bits_for(uint64_t n) {  // smallest b with 2^b >= n
    int b = 0;
    while ((uint64_t{1} << b) < n) ++b;
    return b;
}

struct Unified {
    std::vector<int32_t> values;
    std::vector<std::vector<uint32_t>> indexes;
};

/// Sort (value, position) pairs and cut runs of equal values.
inline Unified unify(const std::vector<int32_t>& v) {
    std::vector<std::pair<int32_t, uint32_t>> nz;
    for (uint32_t i = 0; i < v.size(); ++i) {
        if (v[i] != 0) nz.emplace_back(v[i], i);
    }
    std::sort(nz.begin(), nz.end());
    Unified u;
    for (size_t i = 0; i < nz.size(); ++i) {
        if (i == 0 || nz[i].first != nz[i - 1].first) {
            u.values.push_back(nz[i].first);
            u.indexes.emplace_back();
        }
        u.indexes.back().push_back(nz[i].second);
    }
    return u;
}

struct Params {
    int k_delta, k_count, k_index;
};

struct Size {
    uint64_t header = 0, delta = 0, count = 0, index = 0;
    uint64_t total() const { return header + delta + count + index; }
};

/// Field-by-field CoDR size of one layer.
inline Size codr_size(const std::vector<codr::UnifiedStream>& streams, Params p, int w, int len) {
    const int hdr = bits_for(static_cast<uint64_t>(len) + 1);
    const int idx_full = std::max(1, bits_for(static_cast<uint64_t>(len)));
    const uint64_t cap = uint64_t{1} << p.k_count;
    Size s;
    for (const auto& st : streams) {
        s.header += hdr;
        const size_t u = st.indexes.size();
        if (u == 0) continue;
        for (size_t e = 0; e < u; ++e) {
            const uint64_t c = st.indexes[e].size();
            const uint64_t pieces = (c + cap - 1) / cap;
            s.count += pieces * p.k_count;
            if (e == 0) {
                s.delta += 1 + w;
            } else {
                const uint64_t d = st.deltas[e - 1];
                s.delta += d < (uint64_t{1} << p.k_delta) ? 1 + p.k_delta : 1 + w;
            }
            s.delta += (pieces - 1) * (1 + p.k_delta);  // dummies carry delta 0
        }
        bool first = true;
        int64_t prev = 0;
        for (const auto& g : st.indexes) {
            for (auto idx : g) {
                const int64_t step = static_cast<int64_t>(idx) - prev;
                const bool rel = !first && step >= 0 && step < (int64_t{1} << p.k_index);
                s.index += rel ? 1 + p.k_index : 1 + idx_full;
                prev = idx;
                first = false;
            }
        }
    }
    return s;
}

struct Best {
    Params params;
    uint64_t bits;
};

/// Exhaustive minimum over the whole (k_delta, k_count, k_index) grid,
/// first minimum in lexicographic order.
inline Best brute_force(const std::vector<codr::UnifiedStream>& streams, int w, int len) {
    const int idx_full = std::max(1, bits_for(static_cast<uint64_t>(len)));
    const int count_max = bits_for(static_cast<uint64_t>(len)) + 1;
    Best best{{0, 0, 0}, std::numeric_limits<uint64_t>::max()};
    for (int kd = 1; kd <= w; ++kd) {
        for (int kc = 1; kc <= count_max; ++kc) {
            for (int ki = 1; ki <= idx_full; ++ki) {
                const uint64_t b = codr_size(streams, {kd, kc, ki}, w, len).total();
                if (b < best.bits) best = {{kd, kc, ki}, b};
            }
        }
    }
    return best;
}

/// Fixed width 5 for deltas and relative indexes, one transition bit per
/// index, relative indexing starting from 0, no counts and no headers.
inline uint64_t ucnn_size(const std::vector<codr::UnifiedStream>& streams, int w, int len) {
    const int idx_full = std::max(1, bits_for(static_cast<uint64_t>(len)));
    uint64_t bits = 0;
    for (const auto& st : streams) {
        if (st.indexes.empty()) continue;
        bits += 1 + w;
        for (auto d : st.deltas) bits += d < 32 ? 6 : 1 + w;
        int64_t prev = 0;
        for (const auto& g : st.indexes) {
            for (auto idx : g) {
                const int64_t step = static_cast<int64_t>(idx) - prev;
                bits += (step >= 0 && step < 32 ? 6 : 1 + idx_full) + 1;
                prev = idx;
            }
        }
    }
    return bits;
}

/// Row-major run scan; a run that would overflow 4 bits is broken by an
/// explicit zero weight. Zeros after the last non-zero are not stored.
inline uint64_t scnn_size(const codr::WeightTensor& wt, int w) {
    uint64_t bits = 0;
    uint64_t pending = 0;
    int run = 0;
    for (auto v : wt.values()) {
        if (v == 0) {
            if (run == 15) {
                pending += w + 4;  // stored zero closes the run
                run = 0;
            } else {
                ++run;
            }
            continue;
        }
        bits += pending + w + 4;
        pending = 0;
        run = 0;
    }
    return bits;
}

/// Plain 7-deep loop convolution with bias, padding read as zero.
inline codr::AccumulatorMap conv(const codr::FeatureMap& in, const codr::WeightTensor& wt,
                                 const codr::LayerShape& s) {
    codr::AccumulatorMap out(s.m_out, s.out_rows(), s.out_cols());
    for (int m = 0; m < s.m_out; ++m) {
        for (int r = 0; r < s.out_rows(); ++r) {
            for (int c = 0; c < s.out_cols(); ++c) {
                int64_t acc = wt.bias().empty() ? 0 : wt.bias()[m];
                for (int n = 0; n < s.n_in; ++n) {
                    for (int kr = 0; kr < s.k_rows; ++kr) {
                        for (int kc = 0; kc < s.k_cols; ++kc) {
                            const int ir = r * s.stride + kr - s.pad;
                            const int ic = c * s.stride + kc - s.pad;
                            if (ir < 0 || ic < 0 || ir >= s.in_rows || ic >= s.in_cols) continue;
                            acc += int64_t{wt.at(m, n, kr, kc)} * in.at(n, ir, ic);
                        }
                    }
                }
                out.at(m, r, c) = acc;
            }
        }
    }
    return out;
}

/// h(f): spatial tiles whose t_ri x t_ci window covers input cell (row, col).
inline int halo_cover(const codr::LayerShape& s, const codr::TilingConfig& cfg, int row, int col) {
    auto along = [&](int x, int out_extent, int t_out, int t_in) {
        int n = 0;
        for (int o = 0; o < out_extent; o += t_out) {
            const int lo = o * s.stride - s.pad;
            if (x >= lo && x < lo + t_in) ++n;
        }
        return n;
    };
    return along(row, s.out_rows(), cfg.t_ro, cfg.t_ri) * along(col, s.out_cols(), cfg.t_co, cfg.t_ci);
}

/// Sum over the tile plan of u * t_ri * t_ci, counting each vector once per
/// spatial tile it is streamed for.
inline uint64_t expected_mults(const std::vector<codr::UnifiedStream>& streams, const codr::LayerShape& s,
                               const codr::TilingConfig& cfg) {
    const uint64_t tiles = static_cast<uint64_t>((s.out_rows() + cfg.t_ro - 1) / cfg.t_ro) *
                           ((s.out_cols() + cfg.t_co - 1) / cfg.t_co);
    uint64_t u = 0;
    for (const auto& st : streams) u += st.indexes.size();
    return u * tiles * static_cast<uint64_t>(cfg.t_ri) * cfg.t_ci;
}

}  // namespace oracle
