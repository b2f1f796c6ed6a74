#include "codr/rle.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <limits>
#include <string>

#include "codr/error.hpp"

namespace codr::rle {

namespace {

constexpr uint64_t low_mask(int width) { return width >= 64 ? ~uint64_t{0} : (uint64_t{1} << width) - 1; }

bool fits(uint64_t value, int width) { return (value >> width) == 0; }

/// Entries needed for a count c at width k: ceil(c / 2^k).
uint64_t entries_for(uint64_t count, int k) { return (count + low_mask(k)) >> k; }

std::string coord_string(uint32_t layer, const VectorCoord& c) {
    return "layer " + std::to_string(layer) + " vector (group " + std::to_string(c.group) + ", pu " +
           std::to_string(c.pu) + ", n " + std::to_string(c.n) + ")";
}

}  // namespace

int index_width(int vector_length) { return std::max(1, ceil_log2(static_cast<uint64_t>(vector_length))); }

int header_width(int vector_length) { return ceil_log2(static_cast<uint64_t>(vector_length) + 1); }

int max_count_width(int vector_length) { return ceil_log2(static_cast<uint64_t>(vector_length)) + 1; }

void EncodingParams::validate(int vector_length) const {
    validate_bit_width(w_full);
    if (idx_full != index_width(vector_length)) {
        throw ValidationError("idx_full " + std::to_string(idx_full) + " does not match vector length " +
                              std::to_string(vector_length));
    }
    if (k_delta < 1 || k_delta > w_full) {
        throw ValidationError("k_delta " + std::to_string(k_delta) + " outside [1, " + std::to_string(w_full) + "]");
    }
    if (k_index < 1 || k_index > idx_full) {
        throw ValidationError("k_index " + std::to_string(k_index) + " outside [1, " + std::to_string(idx_full) +
                              "]");
    }
    const int kc_max = max_count_width(vector_length);
    if (k_count < 1 || k_count > kc_max) {
        throw ValidationError("k_count " + std::to_string(k_count) + " outside [1, " + std::to_string(kc_max) + "]");
    }
}

// Delta structure ---------------------------------------------------------

void encode_delta_stream(BitWriter& out, int32_t first_value, std::span<const uint32_t> deltas, int k_delta,
                         int w_full) {
    if (first_value < min_of_width(w_full) || first_value > max_of_width(w_full)) {
        throw ValidationError("first value " + std::to_string(first_value) + " outside " + std::to_string(w_full) +
                              "-bit range");
    }
    out.put_bit(true);
    out.put(static_cast<uint64_t>(static_cast<int64_t>(first_value)) & low_mask(w_full), w_full);
    for (auto d : deltas) {
        if (!fits(d, w_full)) {
            throw ValidationError("delta " + std::to_string(d) + " does not fit in " + std::to_string(w_full) + " bits");
        }
        if (fits(d, k_delta)) {
            out.put_bit(false);
            out.put(d, k_delta);
        } else {
            out.put_bit(true);
            out.put(d, w_full);
        }
    }
}

DeltaFields decode_delta_stream(BitReader& in, int k_delta, int w_full, size_t entries) {
    DeltaFields f;
    if (entries == 0) return f;
    if (!in.get_bit()) throw CorruptionError("first value not stored at full precision");
    f.first_value = static_cast<int32_t>(sign_extend(in.get(w_full), w_full));
    f.deltas.reserve(entries - 1);
    for (size_t i = 1; i < entries; ++i) {
        const bool full = in.get_bit();
        f.deltas.push_back(static_cast<uint32_t>(in.get(full ? w_full : k_delta)));
    }
    return f;
}

// Count structure ---------------------------------------------------------

std::vector<AugmentedEntry> augment_counts(std::span<const uint32_t> counts, int k_count) {
    const uint64_t cap = uint64_t{1} << k_count;
    std::vector<AugmentedEntry> out;
    for (size_t e = 0; e < counts.size(); ++e) {
        if (counts[e] == 0) throw ValidationError("repetition count must be >= 1");
        uint64_t left = counts[e];
        bool dummy = false;
        while (left > 0) {
            const auto take = static_cast<uint32_t>(std::min(left, cap));
            out.push_back({static_cast<uint32_t>(e), take, dummy});
            left -= take;
            dummy = true;
        }
    }
    return out;
}

std::vector<AugmentedEntry> encode_count_stream(BitWriter& out, std::span<const uint32_t> counts, int k_count) {
    auto entries = augment_counts(counts, k_count);
    for (const auto& e : entries) out.put(e.repetitions - 1, k_count);
    return entries;
}

std::vector<uint32_t> decode_count_stream(BitReader& in, int k_count, size_t entries,
                                          std::span<const uint32_t> raw_deltas) {
    if (entries > 0 && raw_deltas.size() != entries - 1) {
        throw CorruptionError("count decoder given " + std::to_string(raw_deltas.size()) + " deltas for " +
                              std::to_string(entries) + " entries");
    }
    std::vector<uint32_t> merged;
    for (size_t e = 0; e < entries; ++e) {
        const auto reps = static_cast<uint32_t>(in.get(k_count) + 1);
        const bool dummy = e > 0 && raw_deltas[e - 1] == 0;
        if (dummy) {
            merged.back() += reps;
        } else {
            merged.push_back(reps);
        }
    }
    return merged;
}

// Index structure ---------------------------------------------------------

void encode_index_stream(BitWriter& out, const std::vector<std::vector<uint32_t>>& groups, int k_index,
                         int idx_full) {
    bool first = true;
    uint32_t prev = 0;
    for (const auto& group : groups) {
        for (auto idx : group) {
            if (!fits(idx, idx_full)) {
                throw ValidationError("index " + std::to_string(idx) + " does not fit in " +
                                      std::to_string(idx_full) + " bits");
            }
            const int64_t step = int64_t{idx} - prev;
            if (!first && step >= 0 && fits(static_cast<uint64_t>(step), k_index)) {
                out.put_bit(false);
                out.put(static_cast<uint64_t>(step), k_index);
            } else {
                out.put_bit(true);
                out.put(idx, idx_full);
            }
            prev = idx;
            first = false;
        }
    }
}

std::vector<std::vector<uint32_t>> decode_index_stream(BitReader& in, int k_index, int idx_full,
                                                       std::span<const uint32_t> counts) {
    std::vector<std::vector<uint32_t>> groups;
    groups.reserve(counts.size());
    bool first = true;
    uint64_t prev = 0;
    for (auto c : counts) {
        std::vector<uint32_t> group;
        group.reserve(c);
        for (uint32_t i = 0; i < c; ++i) {
            const bool absolute = in.get_bit();
            if (first && !absolute) throw CorruptionError("first index of a vector is not absolute");
            const uint64_t idx = absolute ? in.get(idx_full) : prev + in.get(k_index);
            if (!fits(idx, idx_full)) throw CorruptionError("index " + std::to_string(idx) + " overflows index width");
            group.push_back(static_cast<uint32_t>(idx));
            prev = idx;
            first = false;
        }
        groups.push_back(std::move(group));
    }
    return groups;
}

// Vectors -----------------------------------------------------------------

VectorBits encode_vector(BitWriter& delta, BitWriter& count, BitWriter& index, const UnifiedStream& s,
                         const EncodingParams& p, int vector_length) {
    if (!s.indexes.empty() && s.deltas.size() + 1 != s.indexes.size()) {
        throw ValidationError("unified stream deltas and entries disagree");
    }
    VectorBits bits;
    const size_t d0 = delta.bit_length();
    const size_t c0 = count.bit_length();
    const size_t i0 = index.bit_length();

    const auto entries = augment_counts(s.counts(), p.k_count);

    const int hw = header_width(vector_length);
    if (!fits(entries.size(), hw)) {
        throw ValidationError("vector has " + std::to_string(entries.size()) + " entries, more than its header holds");
    }
    delta.put(entries.size(), hw);
    bits.header = static_cast<size_t>(hw);
    ++bits.fields;

    if (!entries.empty()) {
        std::vector<uint32_t> raw_deltas;
        raw_deltas.reserve(entries.size() - 1);
        for (size_t e = 1; e < entries.size(); ++e) {
            raw_deltas.push_back(entries[e].dummy ? 0 : s.deltas[entries[e].source - 1]);
        }
        encode_delta_stream(delta, s.first_value, raw_deltas, p.k_delta, p.w_full);
        for (const auto& e : entries) count.put(e.repetitions - 1, p.k_count);
        encode_index_stream(index, s.indexes, p.k_index, p.idx_full);
        bits.fields += entries.size() * 2 + s.nonzero_count();
    }

    bits.delta = delta.bit_length() - d0 - bits.header;
    bits.count = count.bit_length() - c0;
    bits.index = index.bit_length() - i0;
    return bits;
}

UnifiedStream decode_vector(BitReader& delta, BitReader& count, BitReader& index, const EncodingParams& p,
                            int vector_length, VectorBits* bits) {
    const size_t d0 = delta.position();
    const size_t c0 = count.position();
    const size_t i0 = index.position();
    const int hw = header_width(vector_length);

    const auto entries = static_cast<size_t>(delta.get(hw));
    if (entries > static_cast<size_t>(vector_length)) {
        throw CorruptionError("header claims " + std::to_string(entries) + " entries in a vector of length " +
                              std::to_string(vector_length));
    }
    UnifiedStream s;
    size_t fields = 1;
    if (entries > 0) {
        const auto raw = decode_delta_stream(delta, p.k_delta, p.w_full, entries);
        if (raw.first_value == 0) throw CorruptionError("dummy or zero weight as first entry of a vector");
        const auto counts = decode_count_stream(count, p.k_count, entries, raw.deltas);

        s.first_value = raw.first_value;
        for (auto d : raw.deltas) {
            if (d != 0) s.deltas.push_back(d);
        }
        uint64_t total = 0;
        for (auto c : counts) total += c;
        if (total > static_cast<uint64_t>(vector_length)) {
            throw CorruptionError("repetition counts sum to " + std::to_string(total) + ", more than vector length " +
                                  std::to_string(vector_length));
        }
        s.indexes = decode_index_stream(index, p.k_index, p.idx_full, counts);

        int64_t value = s.first_value;
        for (auto d : s.deltas) {
            value += d;
            if (value == 0) throw CorruptionError("decoded unique value is zero");
            if (value > max_of_width(p.w_full)) throw CorruptionError("decoded unique value overflows weight width");
        }
        fields += entries * 2 + total;
    }
    if (bits) {
        bits->header = static_cast<size_t>(hw);
        bits->delta = delta.position() - d0 - bits->header;
        bits->count = count.position() - c0;
        bits->index = index.position() - i0;
        bits->fields = fields;
    }
    return s;
}

// Layers ------------------------------------------------------------------

LayerSize encoded_size(std::span<const UnifiedStream> streams, const EncodingParams& p, int vector_length) {
    LayerSize size;
    const uint64_t hw = static_cast<uint64_t>(header_width(vector_length));
    for (const auto& s : streams) {
        size.header += hw;
        if (s.indexes.empty()) continue;
        size.delta += 1 + static_cast<uint64_t>(p.w_full);
        for (auto d : s.deltas) size.delta += static_cast<uint64_t>(delta_field_bits(d, p.k_delta, p.w_full));
        bool first = true;
        uint32_t prev = 0;
        for (const auto& group : s.indexes) {
            const uint64_t n = entries_for(group.size(), p.k_count);
            size.count += n * static_cast<uint64_t>(p.k_count);
            size.delta += (n - 1) * (1 + static_cast<uint64_t>(p.k_delta));
            for (auto idx : group) {
                const int64_t step = int64_t{idx} - prev;
                const bool low = !first && step >= 0 && fits(static_cast<uint64_t>(step), p.k_index);
                size.index += 1 + static_cast<uint64_t>(low ? p.k_index : p.idx_full);
                prev = idx;
                first = false;
            }
        }
    }
    return size;
}

size_t header_bits(const TilePlan& plan) {
    return plan.vector_order().size() * static_cast<size_t>(header_width(plan.vector_length()));
}

EncodingParams choose_encoding_params(std::span<const UnifiedStream> streams, int bit_width, int vector_length) {
    validate_bit_width(bit_width);
    EncodingParams best;
    best.w_full = bit_width;
    best.idx_full = index_width(vector_length);
    const int kc_max = max_count_width(vector_length);

    // Histograms over the layer: significant bits of each delta, repetition
    // counts, and significant bits of each non-negative index step.
    std::array<uint64_t, 33> delta_hist{};
    std::array<uint64_t, 33> step_hist{};
    uint64_t absolute_indexes = 0;
    std::vector<uint64_t> count_hist(static_cast<size_t>(vector_length) + 1, 0);
    for (const auto& s : streams) {
        for (auto d : s.deltas) ++delta_hist[std::bit_width(d)];
        bool first = true;
        uint32_t prev = 0;
        for (const auto& group : s.indexes) {
            if (group.size() >= count_hist.size()) count_hist.resize(group.size() + 1, 0);
            ++count_hist[group.size()];
            for (auto idx : group) {
                const int64_t step = int64_t{idx} - prev;
                if (first || step < 0) {
                    ++absolute_indexes;
                } else {
                    ++step_hist[std::bit_width(static_cast<uint64_t>(step))];
                }
                prev = idx;
                first = false;
            }
        }
    }

    uint64_t best_dc = std::numeric_limits<uint64_t>::max();
    for (int kd = 1; kd <= bit_width; ++kd) {
        uint64_t delta_bits = 0;
        for (int b = 0; b <= 32; ++b) {
            delta_bits += delta_hist[b] * (1 + static_cast<uint64_t>(b <= kd ? kd : bit_width));
        }
        for (int kc = 1; kc <= kc_max; ++kc) {
            uint64_t count_bits = 0;
            uint64_t dummies = 0;
            for (size_t c = 1; c < count_hist.size(); ++c) {
                if (count_hist[c] == 0) continue;
                const uint64_t n = entries_for(c, kc);
                count_bits += count_hist[c] * n * static_cast<uint64_t>(kc);
                dummies += count_hist[c] * (n - 1);
            }
            const uint64_t total = delta_bits + dummies * (1 + static_cast<uint64_t>(kd)) + count_bits;
            if (total < best_dc) {
                best_dc = total;
                best.k_delta = kd;
                best.k_count = kc;
            }
        }
    }

    uint64_t best_index = std::numeric_limits<uint64_t>::max();
    for (int ki = 1; ki <= best.idx_full; ++ki) {
        uint64_t bits = absolute_indexes * (1 + static_cast<uint64_t>(best.idx_full));
        for (int b = 0; b <= 32; ++b) {
            bits += step_hist[b] * (1 + static_cast<uint64_t>(b <= ki ? ki : best.idx_full));
        }
        if (bits < best_index) {
            best_index = bits;
            best.k_index = ki;
        }
    }
    return best;
}

EncodedLayer encode_layer(uint32_t layer_id, std::span<const UnifiedStream> streams, const EncodingParams& p,
                          int vector_length) {
    p.validate(vector_length);
    BitWriter delta;
    BitWriter count;
    BitWriter index;
    EncodedLayer out;
    out.layer_id = layer_id;
    out.params = p;
    for (const auto& s : streams) {
        for (const auto& group : s.indexes) {
            for (auto idx : group) {
                if (idx >= static_cast<uint32_t>(vector_length)) {
                    throw ValidationError("index " + std::to_string(idx) + " outside vector of length " +
                                          std::to_string(vector_length));
                }
            }
        }
        encode_vector(delta, count, index, s, p, vector_length);
    }
    out.delta = delta.take();
    out.count = count.take();
    out.index = index.take();
    return out;
}

std::vector<DecodedVector> decode_layer_detailed(const EncodedLayer& layer, const TilePlan& plan) {
    const int len = plan.vector_length();
    layer.params.validate(len);
    BitReader delta(layer.delta);
    BitReader count(layer.count);
    BitReader index(layer.index);
    std::vector<DecodedVector> out;
    out.reserve(plan.vector_order().size());
    for (const auto& coord : plan.vector_order()) {
        DecodedVector v;
        v.coord = coord;
        try {
            v.stream = decode_vector(delta, count, index, layer.params, len, &v.bits);
            (void)reconstruct_weight_vector(v.stream, static_cast<size_t>(len));
        } catch (const CorruptionError& e) {
            throw CorruptionError(coord_string(layer.layer_id, coord) + ": " + e.what());
        }
        out.push_back(std::move(v));
    }
    if (delta.remaining() || count.remaining() || index.remaining()) {
        throw CorruptionError("layer " + std::to_string(layer.layer_id) +
                              ": trailing bits after the last vector (delta " + std::to_string(delta.remaining()) +
                              ", count " + std::to_string(count.remaining()) + ", index " +
                              std::to_string(index.remaining()) + ")");
    }
    return out;
}

std::vector<UnifiedStream> decode_layer(const EncodedLayer& layer, const TilePlan& plan) {
    std::vector<UnifiedStream> out;
    for (auto& v : decode_layer_detailed(layer, plan)) out.push_back(std::move(v.stream));
    return out;
}

// Baselines ---------------------------------------------------------------

uint64_t size_ucnn_baseline(std::span<const UnifiedStream> streams, int bit_width, int vector_length) {
    const int k = kUcnnFieldWidth;
    const int idx_full = index_width(vector_length);
    uint64_t bits = 0;
    for (const auto& s : streams) {
        if (s.indexes.empty()) continue;
        bits += 1 + static_cast<uint64_t>(bit_width);
        for (auto d : s.deltas) bits += static_cast<uint64_t>(delta_field_bits(d, k, bit_width));
        uint32_t prev = 0;
        for (const auto& group : s.indexes) {
            for (auto idx : group) {
                const int64_t step = int64_t{idx} - prev;
                const bool low = step >= 0 && fits(static_cast<uint64_t>(step), k);
                bits += 1 + static_cast<uint64_t>(low ? k : idx_full) + 1;
                prev = idx;
            }
        }
    }
    return bits;
}

uint64_t size_scnn_baseline(const WeightTensor& weights, int bit_width) {
    const uint64_t field = static_cast<uint64_t>(bit_width + kScnnRunWidth);
    const uint64_t max_run = (uint64_t{1} << kScnnRunWidth) - 1;
    uint64_t bits = 0;
    uint64_t run = 0;
    for (auto w : weights.values()) {
        if (w == 0) {
            ++run;
            continue;
        }
        bits += (run / (max_run + 1)) * field + field;
        run = 0;
    }
    return bits;
}

}  // namespace codr::rle
