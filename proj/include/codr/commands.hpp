#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace codr {

/// Options shared by the CLI subcommands. When --weights or --input is
/// absent the tensors are generated from density, unique count and seed.
struct CommandOptions {
    std::filesystem::path layers;
    std::optional<std::filesystem::path> tiling;
    std::optional<std::filesystem::path> weights;  // file (single layer) or directory
    std::optional<std::filesystem::path> input;    // file (single layer) or directory
    std::optional<std::filesystem::path> costs;
    std::optional<std::filesystem::path> codr;
    std::vector<double> density{1.0};
    std::vector<int> unique{256};
    uint64_t seed = 42;
    std::filesystem::path out = "out";
    std::string format = "json";
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitMismatch = 1;
inline constexpr int kExitInvalid = 2;

// Each command validates every input before creating anything under
// options.out and throws ValidationError on failure.

/// layer_<id>.weights.tnsr, layer_<id>.bias.tnsr, layer_<id>.input.tnsr
int cmd_gen_weights(const CommandOptions& options, std::ostream& log);
/// model.codr and compression.{json,csv}
int cmd_encode(const CommandOptions& options, std::ostream& log);
/// sim_report.json, energy.{json,csv}, layer_<id>.output.tnsr
int cmd_simulate(const CommandOptions& options, std::ostream& log);
/// Runs the pipeline against direct_conv; kExitMismatch on any difference.
int cmd_verify(const CommandOptions& options, std::ostream& log);
/// sweep.csv with one row per (layer, density, unique count, design)
int cmd_sweep(const CommandOptions& options, std::ostream& log);

}  // namespace codr
