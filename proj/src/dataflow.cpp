#include "codr/dataflow.hpp"

#include <algorithm>

#include "codr/codr_file.hpp"
#include "codr/error.hpp"

namespace codr::sim {

std::string_view level_name(Level level) {
    switch (level) {
        case Level::dram: return "dram";
        case Level::weight_sram: return "weight_sram";
        case Level::input_sram: return "input_sram";
        case Level::output_sram: return "output_sram";
        case Level::input_rf: return "input_rf";
        case Level::weight_rf: return "weight_rf";
        case Level::output_rf: return "output_rf";
    }
    return "?";
}

LevelCounter& LevelCounter::operator+=(const LevelCounter& o) {
    read_events += o.read_events;
    write_events += o.write_events;
    read_bits += o.read_bits;
    write_bits += o.write_bits;
    return *this;
}

MemoryCounter& MemoryCounter::operator+=(const MemoryCounter& o) {
    for (size_t i = 0; i < levels.size(); ++i) levels[i] += o.levels[i];
    alu_mults += o.alu_mults;
    alu_adds += o.alu_adds;
    crossbar_transfers += o.crossbar_transfers;
    return *this;
}

int bytes_per_feature(int bit_width) { return (bit_width + 7) / 8; }

InputTile load_input_tile(const FeatureMap& input, const LayerShape& shape, const TilingConfig& cfg,
                          const SpatialTile& tile, int channel_group, int bit_width, MemoryCounter& counters,
                          AccessTrace* trace) {
    InputTile t;
    t.channel_group = channel_group;
    t.planes = Volume<int32_t>(cfg.t_n, cfg.t_ri, cfg.t_ci);
    const int n0 = channel_group * cfg.t_n;
    t.valid_channels = std::min(cfg.t_n, shape.n_in - n0);

    // The full RF window anchored at the tile origin in padded coordinates.
    const int win_rows = cfg.t_ri;
    const int win_cols = cfg.t_ci;
    const int row_base = tile.row0 * shape.stride - shape.pad;
    const int col_base = tile.col0 * shape.stride - shape.pad;

    uint64_t reads = 0;
    for (int i = 0; i < t.valid_channels; ++i) {
        const int n = n0 + i;
        for (int r = 0; r < win_rows; ++r) {
            const int ir = row_base + r;
            if (ir < 0 || ir >= shape.in_rows) continue;
            for (int c = 0; c < win_cols; ++c) {
                const int ic = col_base + c;
                if (ic < 0 || ic >= shape.in_cols) continue;
                t.planes.at(i, r, c) = input.at(n, ir, ic);
                ++reads;
                if (trace) ++trace->input_reads[input.offset(n, ir, ic)];
            }
        }
    }
    counters[Level::input_sram].read(reads, reads * static_cast<uint64_t>(bit_width));
    counters[Level::input_rf].write(reads, reads * static_cast<uint64_t>(bit_width));
    return t;
}

PUState::PUState(const TilingConfig& cfg)
    : mpes(static_cast<size_t>(cfg.t_n)), ape(cfg.t_m, cfg.t_ro, cfg.t_co) {
    for (auto& m : mpes) m.accumulator.assign(static_cast<size_t>(cfg.t_ri) * cfg.t_ci, 0);
}

void PUState::clear_ape() { std::fill(ape.data().begin(), ape.data().end(), 0); }

size_t mpe_process_weight_vector(const UnifiedStream& stream, std::span<const int32_t> input_plane,
                                 const LayerShape& shape, const TilingConfig& cfg, int valid_lanes,
                                 MpeState& mpe, AccumulatorMap& ape, MemoryCounter& counters) {
    const size_t tile_area = static_cast<size_t>(cfg.t_ri) * cfg.t_ci;
    const size_t window = static_cast<size_t>(cfg.t_ro) * cfg.t_co;
    const int area = shape.kernel_area();
    const auto limit = static_cast<uint32_t>(valid_lanes * area);

    std::fill(mpe.accumulator.begin(), mpe.accumulator.end(), 0);
    mpe.running_weight = 0;

    for (size_t e = 0; e < stream.unique_count(); ++e) {
        const int64_t scalar = e == 0 ? int64_t{stream.first_value} : int64_t{stream.deltas[e - 1]};
        mpe.running_weight += scalar;
        // w_{j+1} * x = delta_j * x + w_j * x
        for (size_t x = 0; x < tile_area; ++x) mpe.accumulator[x] += scalar * input_plane[x];
        counters.alu_mults += tile_area;
        counters.alu_adds += tile_area;

        for (auto idx : stream.indexes[e]) {
            if (idx >= limit) {
                throw CorruptionError("index " + std::to_string(idx) + " outside the " + std::to_string(valid_lanes) +
                                      " valid lanes of this vector");
            }
            const int lane = static_cast<int>(idx) / area;
            const int kr = (static_cast<int>(idx) % area) / shape.k_cols;
            const int kc = static_cast<int>(idx) % shape.k_cols;
            for (int r = 0; r < cfg.t_ro; ++r) {
                const int64_t* row = mpe.accumulator.data() +
                                     static_cast<size_t>(kr + shape.stride * r) * cfg.t_ci + kc;
                for (int c = 0; c < cfg.t_co; ++c) ape.at(lane, r, c) += row[shape.stride * c];
            }
            ++counters.crossbar_transfers;
            counters.alu_adds += window;
            counters[Level::output_rf].read(window, window * kAccumulatorBits);
            counters[Level::output_rf].write(window, window * kAccumulatorBits);
        }
    }
    return stream.unique_count();
}

void ape_post_process(const AccumulatorMap& ape, int lane, int m, const SpatialTile& tile, int32_t bias,
                      Activation activation, int bit_width, SimReport& report) {
    const int64_t lo = min_of_width(bit_width);
    const int64_t hi = max_of_width(bit_width);
    auto& counters = report.counters;
    for (int r = 0; r < tile.rows; ++r) {
        for (int c = 0; c < tile.cols; ++c) {
            int64_t v = ape.at(lane, r, c) + bias;
            if (activation == Activation::relu && v < 0) v = 0;
            const int64_t clamped = std::clamp(v, lo, hi);
            if (clamped != v) ++report.saturated_outputs;
            const int orow = tile.row0 + r;
            const int ocol = tile.col0 + c;
            report.accumulators.at(m, orow, ocol) = v;
            report.output.at(m, orow, ocol) = static_cast<int32_t>(clamped);
            if (report.trace) ++report.trace->output_writes[report.output.offset(m, orow, ocol)];
        }
    }
    const auto n = static_cast<uint64_t>(tile.rows) * tile.cols;
    counters.alu_adds += n;
    counters[Level::output_rf].read(n, n * kAccumulatorBits);
    counters[Level::output_sram].write(n, n * static_cast<uint64_t>(bit_width));
}

DramTraffic drain_outputs(SimReport& report, uint64_t weight_bytes, const LayerShape& shape, int bit_width) {
    const auto bpf = static_cast<uint64_t>(bytes_per_feature(bit_width));
    DramTraffic t;
    t.weight_bytes = weight_bytes;
    t.input_bytes = static_cast<uint64_t>(shape.n_in) * shape.in_rows * shape.in_cols * bpf;
    t.output_bytes = static_cast<uint64_t>(shape.m_out) * shape.out_rows() * shape.out_cols() * bpf;
    auto& dram = report.counters[Level::dram];
    dram.read(t.weight_bytes + t.input_bytes, 8 * (t.weight_bytes + t.input_bytes));
    dram.write(t.output_bytes, 8 * t.output_bytes);
    report.dram = t;
    return t;
}

SimReport run_layer(const rle::EncodedLayer& encoded, const FeatureMap& input, std::span<const int32_t> bias,
                    const LayerShape& shape, const TilingConfig& cfg, const SimOptions& options) {
    const TilePlan plan(shape, cfg);
    const int bits = encoded.bit_width();
    validate_bit_width(bits);
    if (input.channels() != shape.n_in || input.rows() != shape.in_rows || input.cols() != shape.in_cols) {
        throw ValidationError("layer " + std::to_string(encoded.layer_id) + ": input does not match " +
                              to_string(shape));
    }
    check_range(input.data(), bits, "input features");
    if (bias.size() != static_cast<size_t>(shape.m_out)) {
        throw ValidationError("layer " + std::to_string(encoded.layer_id) + ": bias has " +
                              std::to_string(bias.size()) + " entries, expected " + std::to_string(shape.m_out));
    }
    if (encoded.params.idx_full != rle::index_width(plan.vector_length())) {
        throw ValidationError("layer " + std::to_string(encoded.layer_id) +
                              ": encoded index width does not match the layer shape and tiling");
    }
    if (options.multipliers_per_pu < 1) throw ValidationError("multipliers_per_pu must be >= 1");

    const auto decoded = rle::decode_layer_detailed(encoded, plan);

    SimReport report;
    report.layer_id = encoded.layer_id;
    report.accumulators = AccumulatorMap(shape.m_out, shape.out_rows(), shape.out_cols());
    report.output = FeatureMap(shape.m_out, shape.out_rows(), shape.out_cols());
    if (options.trace) {
        report.trace = AccessTrace{std::vector<uint32_t>(input.size(), 0),
                                   std::vector<uint32_t>(report.output.size(), 0)};
    }
    auto& counters = report.counters;
    AccessTrace* trace = report.trace ? &*report.trace : nullptr;

    const auto tile_area = static_cast<uint64_t>(cfg.t_ri) * cfg.t_ci;
    const uint64_t passes_per_entry =
        (tile_area + static_cast<uint64_t>(options.multipliers_per_pu) - 1) / options.multipliers_per_pu;
    std::vector<PUState> pus(static_cast<size_t>(cfg.t_pu), PUState(cfg));

    for (const auto& tile : plan.spatial_tiles()) {
        for (int g = 0; g < plan.channel_groups(); ++g) {
            const int populated = plan.populated_pus(g);
            for (int p = 0; p < populated; ++p) pus[p].clear_ape();
            ++report.iterations;

            for (int ng = 0; ng < plan.input_groups(); ++ng) {
                ++report.cycles;
                const auto rf = load_input_tile(input, shape, cfg, tile, ng, bits, counters, trace);
                for (int p = 0; p < populated; ++p) {
                    const int lanes = plan.valid_lanes(g, p);
                    for (int i = 0; i < rf.valid_channels; ++i) {
                        const VectorCoord coord{g, p, ng * cfg.t_n + i};
                        const auto& vec = decoded[plan.vector_position(coord)];
                        const auto& vb = vec.bits;
                        counters[Level::weight_sram].read(vb.fields, vb.total());
                        counters[Level::weight_rf].write(vb.fields, vb.total());
                        counters[Level::weight_rf].read(vb.fields, vb.total());
                        if (vec.stream.unique_count() == 0) continue;

                        // MPE i latches input plane i of the shared RF.
                        counters[Level::input_rf].read(tile_area, tile_area * static_cast<uint64_t>(bits));
                        const auto plane = rf.planes.data().subspan(static_cast<size_t>(i) * tile_area, tile_area);
                        size_t u = 0;
                        try {
                            u = mpe_process_weight_vector(vec.stream, plane, shape, cfg, lanes, pus[p].mpes[i],
                                                          pus[p].ape, counters);
                        } catch (const CorruptionError& e) {
                            throw CorruptionError("layer " + std::to_string(encoded.layer_id) + " vector (group " +
                                                  std::to_string(g) + ", pu " + std::to_string(p) + ", n " +
                                                  std::to_string(coord.n) + "): " + e.what());
                        }
                        report.unique_entries += u;
                        report.multiplier_passes += u * passes_per_entry;
                    }
                }
            }

            for (int p = 0; p < populated; ++p) {
                const int m0 = plan.first_channel(g, p);
                for (int lane = 0; lane < plan.valid_lanes(g, p); ++lane) {
                    ape_post_process(pus[p].ape, lane, m0 + lane, tile, bias[m0 + lane], options.activation, bits,
                                     report);
                }
            }
        }
    }

    drain_outputs(report, serialized_size(encoded), shape, bits);
    return report;
}

}  // namespace codr::sim
