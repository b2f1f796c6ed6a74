#include "codr/pipeline.hpp"

#include "codr/error.hpp"

namespace codr {

rle::EncodedLayer compress_layer(const LayerConfig& layer, const WeightTensor& weights, const TilingConfig& cfg) {
    if (!weights.matches(layer.shape)) {
        throw ValidationError(layer.label() + ": weights do not match " + to_string(layer.shape));
    }
    check_range(weights.values(), layer.bit_width, "weights");
    const TilePlan plan(layer.shape, cfg);
    const auto streams = unify_layer(weights, plan);
    const auto params = rle::choose_encoding_params(streams, layer.bit_width, plan.vector_length());
    return rle::encode_layer(layer.id, streams, params, plan.vector_length());
}

double CompressionRow::bits_per_weight() const {
    return weights == 0 ? 0.0 : static_cast<double>(codr.total()) / static_cast<double>(weights);
}

double CompressionRow::ratio_vs_dense() const {
    return codr.total() == 0 ? 0.0 : static_cast<double>(dense_bits) / static_cast<double>(codr.total());
}

CompressionRow measure_compression(const LayerConfig& layer, const WeightTensor& weights, const TilingConfig& cfg) {
    if (!weights.matches(layer.shape)) {
        throw ValidationError(layer.label() + ": weights do not match " + to_string(layer.shape));
    }
    check_range(weights.values(), layer.bit_width, "weights");
    const TilePlan plan(layer.shape, cfg);
    const auto streams = unify_layer(weights, plan);
    const int len = plan.vector_length();

    CompressionRow row;
    row.layer_id = layer.id;
    row.name = layer.name;
    row.params = rle::choose_encoding_params(streams, layer.bit_width, len);
    row.vectors = streams.size();
    row.weights = weights.values().size();
    for (const auto& s : streams) {
        row.nonzero += s.nonzero_count();
        row.unique_entries += s.unique_count();
    }
    row.codr = rle::encoded_size(streams, row.params, len);
    row.ucnn_bits = rle::size_ucnn_baseline(streams, layer.bit_width, len);
    row.scnn_bits = rle::size_scnn_baseline(weights, layer.bit_width);
    row.dense_bits = row.weights * static_cast<uint64_t>(layer.bit_width);
    return row;
}

AccumulatorMap reference_output(const FeatureMap& input, const WeightTensor& weights, const LayerConfig& layer) {
    return apply_activation(direct_conv(input, weights, layer.shape), layer.activation);
}

std::string Mismatch::describe() const {
    if (m < 0) return "output shape differs";
    return "output (m " + std::to_string(m) + ", row " + std::to_string(row) + ", col " + std::to_string(col) +
           "): pipeline " + std::to_string(got) + ", reference " + std::to_string(expected);
}

}  // namespace codr
