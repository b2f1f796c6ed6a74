#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "codr/config.hpp"
#include "codr/dataflow.hpp"
#include "codr/rle.hpp"

namespace codr {

/// Tile, unify, choose parameters and encode one layer.
rle::EncodedLayer compress_layer(const LayerConfig& layer, const WeightTensor& weights, const TilingConfig& cfg);

/// Size of one layer under every storage scheme.
struct CompressionRow {
    uint32_t layer_id = 0;
    std::string name;
    rle::EncodingParams params;
    uint64_t vectors = 0;
    uint64_t weights = 0;
    uint64_t nonzero = 0;
    uint64_t unique_entries = 0;
    rle::LayerSize codr;
    uint64_t ucnn_bits = 0;
    uint64_t scnn_bits = 0;
    uint64_t dense_bits = 0;

    double bits_per_weight() const;
    double ratio_vs_dense() const;
};

CompressionRow measure_compression(const LayerConfig& layer, const WeightTensor& weights, const TilingConfig& cfg);

/// direct_conv followed by the layer activation.
AccumulatorMap reference_output(const FeatureMap& input, const WeightTensor& weights, const LayerConfig& layer);

struct Mismatch {
    int m = 0;
    int row = 0;
    int col = 0;
    int64_t got = 0;
    int64_t expected = 0;

    std::string describe() const;
};

/// First differing element in channel, row, column order. A shape
/// difference is reported at (-1, -1, -1).
template <typename T>
std::optional<Mismatch> first_mismatch(const Volume<T>& got, const Volume<T>& expected) {
    if (got.channels() != expected.channels() || got.rows() != expected.rows() || got.cols() != expected.cols()) {
        return Mismatch{-1, -1, -1, 0, 0};
    }
    for (int m = 0; m < got.channels(); ++m) {
        for (int r = 0; r < got.rows(); ++r) {
            for (int c = 0; c < got.cols(); ++c) {
                if (got.at(m, r, c) != expected.at(m, r, c)) {
                    return Mismatch{m, r, c, got.at(m, r, c), expected.at(m, r, c)};
                }
            }
        }
    }
    return std::nullopt;
}

}  // namespace codr
