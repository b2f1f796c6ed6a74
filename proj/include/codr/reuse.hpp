#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "codr/conv.hpp"

namespace codr {

/// Tiling parameters of the accelerator. Defaults are the CoDR design point.
struct TilingConfig {
    int t_pu = 8;
    int t_m = 4;
    int t_n = 4;
    int t_ro = 8;
    int t_co = 8;
    int t_ri = 20;
    int t_ci = 20;

    /// Throws ValidationError naming the failing dimension when the input
    /// tile cannot hold the halo of an output tile for `shape`.
    void validate_for(const LayerShape& shape) const;

    int lanes_per_group() const { return t_pu * t_m; }

    bool operator==(const TilingConfig&) const = default;
};

/// One spatial output tile: origin and valid extent in output coordinates.
struct SpatialTile {
    int row0 = 0;
    int col0 = 0;
    int rows = 0;
    int cols = 0;
};

/// Identifies one weight vector: output-channel group, PU slot, input channel.
struct VectorCoord {
    int group = 0;
    int pu = 0;
    int n = 0;

    bool operator==(const VectorCoord&) const = default;
};

class TilePlan {
public:
    TilePlan(const LayerShape& shape, const TilingConfig& cfg);

    const LayerShape& shape() const { return shape_; }
    const TilingConfig& config() const { return cfg_; }

    int channel_groups() const { return channel_groups_; }
    int input_groups() const { return input_groups_; }
    const std::vector<SpatialTile>& spatial_tiles() const { return spatial_; }

    /// t_m * k_rows * k_cols
    int vector_length() const { return cfg_.t_m * shape_.kernel_area(); }

    /// First output channel handled by `pu` in `group`.
    int first_channel(int group, int pu) const { return group * cfg_.lanes_per_group() + pu * cfg_.t_m; }
    /// Output channels of (group, pu) that exist in the layer, 0..t_m.
    int valid_lanes(int group, int pu) const;
    /// PU slots of `group` with at least one valid lane; always a prefix.
    int populated_pus(int group) const;

    /// Deterministic vector order: group-major, then PU slot, then input
    /// channel. Only populated PU slots carry vectors.
    const std::vector<VectorCoord>& vector_order() const { return order_; }
    size_t vector_position(const VectorCoord& c) const;

private:
    LayerShape shape_;
    TilingConfig cfg_;
    int channel_groups_ = 0;
    int input_groups_ = 0;
    std::vector<SpatialTile> spatial_;
    std::vector<VectorCoord> order_;
    std::vector<size_t> group_offset_;
};

TilePlan partition_into_tiles(const LayerShape& shape, const TilingConfig& cfg);

/// Weights of t_m kernels for one input channel, linearized m-major then
/// row-major over the kernel.
struct WeightVector {
    VectorCoord coord;
    std::vector<int32_t> values;
    int valid_lanes = 0;  // lanes >= valid_lanes are masked and hold 0
};

std::vector<WeightVector> build_weight_vectors(const WeightTensor& weights, const TilePlan& plan);

/// Sorted, densified, unified form of one weight vector. Unique values are
/// first_value, first_value + deltas[0], ... and each owns an ascending
/// index list; a list's size is that value's repetition count.
struct UnifiedStream {
    int32_t first_value = 0;
    std::vector<uint32_t> deltas;
    std::vector<std::vector<uint32_t>> indexes;

    size_t unique_count() const { return indexes.size(); }
    std::vector<uint32_t> counts() const;
    /// Absolute unique values in stream order.
    std::vector<int32_t> values() const;
    size_t nonzero_count() const;

    bool operator==(const UnifiedStream&) const = default;
};

UnifiedStream unify_weight_vector(std::span<const int32_t> values);
inline UnifiedStream unify_weight_vector(const WeightVector& v) { return unify_weight_vector(v.values); }

/// Inverse of unify_weight_vector. Throws CorruptionError on an index out of
/// range or repeated across entries.
std::vector<int32_t> reconstruct_weight_vector(const UnifiedStream& s, size_t length);

/// Unified streams for every vector of a layer, in plan order.
std::vector<UnifiedStream> unify_layer(const WeightTensor& weights, const TilePlan& plan);

}  // namespace codr
