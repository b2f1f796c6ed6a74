#include "codr/reuse.hpp"

#include <algorithm>
#include <map>

#include "codr/error.hpp"

namespace codr {

namespace {

int ceil_div(int a, int b) { return (a + b - 1) / b; }

}  // namespace

void TilingConfig::validate_for(const LayerShape& shape) const {
    if (t_pu < 1 || t_m < 1 || t_n < 1 || t_ro < 1 || t_co < 1 || t_ri < 1 || t_ci < 1) {
        throw ValidationError("tiling parameters must all be >= 1");
    }
    const int need_rows = (t_ro - 1) * shape.stride + shape.k_rows;
    const int need_cols = (t_co - 1) * shape.stride + shape.k_cols;
    if (t_ri < need_rows) {
        throw ValidationError("t_ri=" + std::to_string(t_ri) + " cannot hold the row halo (needs " +
                              std::to_string(need_rows) + ") for " + to_string(shape));
    }
    if (t_ci < need_cols) {
        throw ValidationError("t_ci=" + std::to_string(t_ci) + " cannot hold the column halo (needs " +
                              std::to_string(need_cols) + ") for " + to_string(shape));
    }
}

TilePlan::TilePlan(const LayerShape& shape, const TilingConfig& cfg) : shape_(shape), cfg_(cfg) {
    shape.validate();
    cfg.validate_for(shape);
    channel_groups_ = ceil_div(shape.m_out, cfg.lanes_per_group());
    input_groups_ = ceil_div(shape.n_in, cfg.t_n);

    const int ro = shape.out_rows();
    const int co = shape.out_cols();
    for (int r = 0; r < ro; r += cfg.t_ro) {
        for (int c = 0; c < co; c += cfg.t_co) {
            spatial_.push_back({r, c, std::min(cfg.t_ro, ro - r), std::min(cfg.t_co, co - c)});
        }
    }

    for (int g = 0; g < channel_groups_; ++g) {
        group_offset_.push_back(order_.size());
        for (int p = 0; p < populated_pus(g); ++p) {
            for (int n = 0; n < shape.n_in; ++n) order_.push_back({g, p, n});
        }
    }
}

int TilePlan::valid_lanes(int group, int pu) const {
    const int first = first_channel(group, pu);
    return std::clamp(shape_.m_out - first, 0, cfg_.t_m);
}

int TilePlan::populated_pus(int group) const {
    const int first = group * cfg_.lanes_per_group();
    return std::clamp(ceil_div(shape_.m_out - first, cfg_.t_m), 0, cfg_.t_pu);
}

size_t TilePlan::vector_position(const VectorCoord& c) const {
    return group_offset_.at(c.group) + static_cast<size_t>(c.pu) * shape_.n_in + c.n;
}

TilePlan partition_into_tiles(const LayerShape& shape, const TilingConfig& cfg) { return TilePlan(shape, cfg); }

std::vector<WeightVector> build_weight_vectors(const WeightTensor& weights, const TilePlan& plan) {
    const auto& shape = plan.shape();
    if (!weights.matches(shape)) throw ValidationError("weight tensor does not match layer shape");
    const int area = shape.kernel_area();
    std::vector<WeightVector> out;
    out.reserve(plan.vector_order().size());
    for (const auto& coord : plan.vector_order()) {
        WeightVector v;
        v.coord = coord;
        v.valid_lanes = plan.valid_lanes(coord.group, coord.pu);
        v.values.assign(static_cast<size_t>(plan.vector_length()), 0);
        const int m0 = plan.first_channel(coord.group, coord.pu);
        for (int lane = 0; lane < v.valid_lanes; ++lane) {
            for (int kr = 0; kr < shape.k_rows; ++kr) {
                for (int kc = 0; kc < shape.k_cols; ++kc) {
                    v.values[lane * area + kr * shape.k_cols + kc] = weights.at(m0 + lane, coord.n, kr, kc);
                }
            }
        }
        out.push_back(std::move(v));
    }
    return out;
}

std::vector<uint32_t> UnifiedStream::counts() const {
    std::vector<uint32_t> c;
    c.reserve(indexes.size());
    for (const auto& list : indexes) c.push_back(static_cast<uint32_t>(list.size()));
    return c;
}

std::vector<int32_t> UnifiedStream::values() const {
    std::vector<int32_t> v;
    if (indexes.empty()) return v;
    int64_t value = first_value;
    v.push_back(first_value);
    for (auto d : deltas) {
        value += d;
        v.push_back(static_cast<int32_t>(value));
    }
    return v;
}

size_t UnifiedStream::nonzero_count() const {
    size_t n = 0;
    for (const auto& list : indexes) n += list.size();
    return n;
}

UnifiedStream unify_weight_vector(std::span<const int32_t> values) {
    // std::map keeps values sorted ascending; positions arrive in order.
    std::map<int32_t, std::vector<uint32_t>> groups;
    for (size_t i = 0; i < values.size(); ++i) {
        if (values[i] != 0) groups[values[i]].push_back(static_cast<uint32_t>(i));
    }
    UnifiedStream s;
    bool first = true;
    int64_t prev = 0;
    for (auto& [value, positions] : groups) {
        if (first) {
            s.first_value = value;
            first = false;
        } else {
            s.deltas.push_back(static_cast<uint32_t>(int64_t{value} - prev));
        }
        prev = value;
        s.indexes.push_back(std::move(positions));
    }
    return s;
}

std::vector<int32_t> reconstruct_weight_vector(const UnifiedStream& s, size_t length) {
    if (!s.indexes.empty() && s.deltas.size() + 1 != s.indexes.size()) {
        throw CorruptionError("unified stream has " + std::to_string(s.deltas.size()) + " deltas for " +
                              std::to_string(s.indexes.size()) + " unique entries");
    }
    std::vector<int32_t> out(length, 0);
    std::vector<bool> seen(length, false);
    const auto vals = s.values();
    for (size_t e = 0; e < s.indexes.size(); ++e) {
        if (vals[e] == 0) throw CorruptionError("unified stream holds a zero unique value");
        for (auto idx : s.indexes[e]) {
            if (idx >= length) {
                throw CorruptionError("index " + std::to_string(idx) + " outside vector of length " +
                                      std::to_string(length));
            }
            if (seen[idx]) throw CorruptionError("index " + std::to_string(idx) + " appears twice");
            seen[idx] = true;
            out[idx] = vals[e];
        }
    }
    return out;
}

std::vector<UnifiedStream> unify_layer(const WeightTensor& weights, const TilePlan& plan) {
    std::vector<UnifiedStream> out;
    for (const auto& v : build_weight_vectors(weights, plan)) out.push_back(unify_weight_vector(v));
    return out;
}

}  // namespace codr
