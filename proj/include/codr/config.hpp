#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "codr/conv.hpp"
#include "codr/reuse.hpp"

namespace codr {

struct LayerConfig {
    uint32_t id = 0;
    std::string name;
    LayerShape shape;
    Activation activation = Activation::none;
    int bit_width = 8;

    std::string label() const;
};

/// On-chip capacities every Iteration must fit.
inline constexpr uint64_t kFeatureSramBytes = 250 * 1024;
inline constexpr uint64_t kWeightSramBytes = 200 * 1024;

/// Accepts {"layers": [...]} or a bare array. Layer fields mirror LayerShape
/// plus id, name, activation, bit_width; ids default to the array position.
std::vector<LayerConfig> parse_layers(const nlohmann::json& j);
std::vector<LayerConfig> load_layers(const std::filesystem::path& path);

TilingConfig parse_tiling(const nlohmann::json& j);
TilingConfig load_tiling(const std::filesystem::path& path);

nlohmann::ordered_json to_json(const LayerConfig& layer);
nlohmann::ordered_json to_json(const TilingConfig& cfg);

/// Checks every layer against the tiling (halo fit, feature SRAM capacity)
/// and for duplicate ids. Errors name the offending layer.
void validate_run(const std::vector<LayerConfig>& layers, const TilingConfig& cfg);

}  // namespace codr
