#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "codr/bitstream.hpp"
#include "codr/reuse.hpp"

namespace codr::rle {

// Three structures per layer, each a separate bitstream:
//
//   delta:  per vector  [u' header][first value][delta]...
//   count:  per vector  [count-1]...                 (u' fields)
//   index:  per vector  [index]...                   (sum of counts fields)
//
// Flagged fields put the flag bit first: 0 = low precision, 1 = full width.
// The first value is always flag 1 + W signed bits. A delta d is flag 0 +
// k_delta bits when d < 2^k_delta, otherwise flag 1 + W bits. An index is
// flag 0 + k_index bits holding the distance from the previous index when
// that distance is in [0, 2^k_index), otherwise flag 1 + idx_full bits
// holding the index itself. The first index of a vector is always absolute.
//
// A count c that exceeds 2^k_count is split: the entry keeps 2^k_count
// repetitions and dummy entries (delta 0) carry the rest, so all three
// structures describe the same u' entries.

struct EncodingParams {
    int k_delta = 1;
    int k_count = 1;
    int k_index = 1;
    int w_full = 8;
    int idx_full = 1;

    /// Throws ValidationError when any width is outside its valid range for
    /// vectors of `vector_length`.
    void validate(int vector_length) const;

    bool operator==(const EncodingParams&) const = default;
};

/// Full index width: ceil(log2(vector_length)), at least 1.
int index_width(int vector_length);
/// Width of the per-vector u' header: ceil(log2(vector_length + 1)).
int header_width(int vector_length);
/// Largest useful k_count: ceil(log2(vector_length)) + 1.
int max_count_width(int vector_length);

/// Bits taken by one flagged delta field.
inline int delta_field_bits(uint32_t delta, int k_delta, int w_full) {
    return 1 + ((uint64_t{delta} >> k_delta) == 0 ? k_delta : w_full);
}

// Delta structure ---------------------------------------------------------

void encode_delta_stream(BitWriter& out, int32_t first_value, std::span<const uint32_t> deltas, int k_delta,
                         int w_full);

struct DeltaFields {
    int32_t first_value = 0;
    std::vector<uint32_t> deltas;  // includes dummy zeros
};

/// Reads `entries` fields (first value plus entries-1 deltas).
DeltaFields decode_delta_stream(BitReader& in, int k_delta, int w_full, size_t entries);

// Count structure ---------------------------------------------------------

struct AugmentedEntry {
    uint32_t source = 0;       // unique entry this belongs to
    uint32_t repetitions = 0;  // 1..2^k_count
    bool dummy = false;
};

/// Splits counts that overflow k_count bits into dummy continuations.
std::vector<AugmentedEntry> augment_counts(std::span<const uint32_t> counts, int k_count);

/// Emits count-1 per augmented entry and returns the augmented list the
/// delta and index encoders must follow.
std::vector<AugmentedEntry> encode_count_stream(BitWriter& out, std::span<const uint32_t> counts, int k_count);

/// Reads `entries` count fields and folds every dummy (delta 0) into the
/// preceding entry. `raw_deltas` are the entries-1 decoded deltas.
std::vector<uint32_t> decode_count_stream(BitReader& in, int k_count, size_t entries,
                                          std::span<const uint32_t> raw_deltas);

// Index structure ---------------------------------------------------------

void encode_index_stream(BitWriter& out, const std::vector<std::vector<uint32_t>>& groups, int k_index,
                         int idx_full);

std::vector<std::vector<uint32_t>> decode_index_stream(BitReader& in, int k_index, int idx_full,
                                                       std::span<const uint32_t> counts);

// Vectors and layers ------------------------------------------------------

struct VectorBits {
    size_t header = 0;
    size_t delta = 0;  // excluding header
    size_t count = 0;
    size_t index = 0;
    size_t fields = 0;  // every decoded field, header included

    size_t total() const { return header + delta + count + index; }
};

VectorBits encode_vector(BitWriter& delta, BitWriter& count, BitWriter& index, const UnifiedStream& s,
                         const EncodingParams& p, int vector_length);

/// Decodes and dummy-merges one vector. Throws CorruptionError on malformed
/// data.
UnifiedStream decode_vector(BitReader& delta, BitReader& count, BitReader& index, const EncodingParams& p,
                            int vector_length, VectorBits* bits = nullptr);

struct EncodedLayer {
    uint32_t layer_id = 0;
    EncodingParams params;
    Bitstream delta;  // u' headers live here
    Bitstream count;
    Bitstream index;

    int bit_width() const { return params.w_full; }
    size_t total_bits() const { return delta.bit_length() + count.bit_length() + index.bit_length(); }

    bool operator==(const EncodedLayer&) const = default;
};

/// Bits spent on u' headers for a layer of this plan.
size_t header_bits(const TilePlan& plan);

/// Exhaustive per-layer search. The delta and count widths are searched
/// jointly because dummy entries cost delta fields; the index width is
/// independent. Ties go to the smallest width, k_delta before k_count.
EncodingParams choose_encoding_params(std::span<const UnifiedStream> streams, int bit_width, int vector_length);

struct LayerSize {
    uint64_t header = 0;
    uint64_t delta = 0;
    uint64_t count = 0;
    uint64_t index = 0;

    uint64_t total() const { return header + delta + count + index; }
};

/// Encoded size computed from field widths without emitting bits.
LayerSize encoded_size(std::span<const UnifiedStream> streams, const EncodingParams& p, int vector_length);

EncodedLayer encode_layer(uint32_t layer_id, std::span<const UnifiedStream> streams, const EncodingParams& p,
                          int vector_length);

struct DecodedVector {
    VectorCoord coord;
    UnifiedStream stream;
    VectorBits bits;
};

/// Decodes every vector in plan order, keeping per-vector bit consumption.
/// Errors name the layer and vector coordinates.
std::vector<DecodedVector> decode_layer_detailed(const EncodedLayer& layer, const TilePlan& plan);

std::vector<UnifiedStream> decode_layer(const EncodedLayer& layer, const TilePlan& plan);

// Baseline size models ----------------------------------------------------

inline constexpr int kUcnnFieldWidth = 5;
inline constexpr int kScnnRunWidth = 4;

/// UCNN-style size: flagged deltas and indexes at a fixed width of 5 plus a
/// transition bit per index; no count structure and no headers. Indexes are
/// relative to the previous index of the vector, starting from 0.
uint64_t size_ucnn_baseline(std::span<const UnifiedStream> streams, int bit_width, int vector_length);

/// SCNN-style size: each non-zero weight stores W bits plus a 4-bit zero
/// run; runs longer than 15 insert explicit zero weights. Scans the tensor
/// in row-major order.
uint64_t size_scnn_baseline(const WeightTensor& weights, int bit_width);

}  // namespace codr::rle
