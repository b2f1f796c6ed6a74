#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "codr/conv.hpp"
#include "codr/reuse.hpp"
#include "codr/rle.hpp"

namespace codr::sim {

enum class Level { dram, weight_sram, input_sram, output_sram, input_rf, weight_rf, output_rf };

inline constexpr std::array<Level, 7> kLevels = {Level::dram,     Level::weight_sram, Level::input_sram,
                                                 Level::output_sram, Level::input_rf, Level::weight_rf,
                                                 Level::output_rf};

std::string_view level_name(Level level);

/// Width of one APE (output RF) accumulator entry.
inline constexpr int kAccumulatorBits = 32;

struct LevelCounter {
    uint64_t read_events = 0;
    uint64_t write_events = 0;
    uint64_t read_bits = 0;
    uint64_t write_bits = 0;

    void read(uint64_t events, uint64_t bits) {
        read_events += events;
        read_bits += bits;
    }
    void write(uint64_t events, uint64_t bits) {
        write_events += events;
        write_bits += bits;
    }

    LevelCounter& operator+=(const LevelCounter& o);
    bool operator==(const LevelCounter&) const = default;
};

struct MemoryCounter {
    std::array<LevelCounter, kLevels.size()> levels{};
    uint64_t alu_mults = 0;
    uint64_t alu_adds = 0;
    uint64_t crossbar_transfers = 0;

    LevelCounter& operator[](Level l) { return levels[static_cast<size_t>(l)]; }
    const LevelCounter& operator[](Level l) const { return levels[static_cast<size_t>(l)]; }

    MemoryCounter& operator+=(const MemoryCounter& o);
    bool operator==(const MemoryCounter&) const = default;
};

/// Per-address access counts, filled when SimOptions::trace is set.
struct AccessTrace {
    std::vector<uint32_t> input_reads;    // indexed like the input FeatureMap
    std::vector<uint32_t> output_writes;  // indexed like the output FeatureMap
};

struct DramTraffic {
    uint64_t weight_bytes = 0;
    uint64_t input_bytes = 0;
    uint64_t output_bytes = 0;

    uint64_t total() const { return weight_bytes + input_bytes + output_bytes; }
};

struct SimOptions {
    Activation activation = Activation::none;
    bool trace = false;
    int multipliers_per_pu = 64;
};

struct SimReport {
    uint32_t layer_id = 0;
    AccumulatorMap accumulators;  // bias + activation, before saturation
    FeatureMap output;            // saturated to W bits
    MemoryCounter counters;
    DramTraffic dram;
    uint64_t iterations = 0;
    uint64_t cycles = 0;
    uint64_t unique_entries = 0;     // sum of u over every processed vector
    uint64_t multiplier_passes = 0;  // ceil(t_ri*t_ci / multipliers_per_pu) per unique entry
    uint64_t saturated_outputs = 0;
    std::optional<AccessTrace> trace;
};

/// Shared Input RF: t_n planes of t_ri x t_ci features.
struct InputTile {
    int channel_group = 0;
    int valid_channels = 0;
    Volume<int32_t> planes;
};

/// Copies the t_ri x t_ci window anchored at `tile` for every channel of
/// `channel_group`. Pad cells and cells past the input edge are zero; only
/// real input features are read from Input SRAM.
InputTile load_input_tile(const FeatureMap& input, const LayerShape& shape, const TilingConfig& cfg,
                          const SpatialTile& tile, int channel_group, int bit_width, MemoryCounter& counters,
                          AccessTrace* trace = nullptr);

/// Differential scalar-matrix multiplier of one MPE.
struct MpeState {
    std::vector<int64_t> accumulator;  // t_ri x t_ci, holds value_j * tile after entry j
    int64_t running_weight = 0;
};

/// One PU: T_N MPEs feeding T_M APE output buffers.
struct PUState {
    explicit PUState(const TilingConfig& cfg);

    std::vector<MpeState> mpes;
    AccumulatorMap ape;  // t_m x t_ro x t_co

    void clear_ape();
};

/// Runs one weight vector through an MPE: multiplies each unique entry's
/// delta (or the first absolute value) by the whole tile, accumulates, and
/// routes the selected t_ro x t_co window of every index to its APE.
/// Returns the number of unique entries processed.
size_t mpe_process_weight_vector(const UnifiedStream& stream, std::span<const int32_t> input_plane,
                                 const LayerShape& shape, const TilingConfig& cfg, int valid_lanes,
                                 MpeState& mpe, AccumulatorMap& ape, MemoryCounter& counters);

/// Adds bias, applies the activation, saturates, and writes one APE buffer's
/// valid outputs to Output SRAM.
void ape_post_process(const AccumulatorMap& ape, int lane, int m, const SpatialTile& tile, int32_t bias,
                      Activation activation, int bit_width, SimReport& report);

/// DRAM traffic: compressed weights and input read once, output written once.
DramTraffic drain_outputs(SimReport& report, uint64_t weight_bytes, const LayerShape& shape, int bit_width);

/// Simulates one layer through the input/output stationary loop nest:
/// spatial tiles, then output-channel groups (Iterations), then input-channel
/// groups (Cycles).
SimReport run_layer(const rle::EncodedLayer& encoded, const FeatureMap& input, std::span<const int32_t> bias,
                    const LayerShape& shape, const TilingConfig& cfg, const SimOptions& options = {});

int bytes_per_feature(int bit_width);

}  // namespace codr::sim
