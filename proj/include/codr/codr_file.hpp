#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "codr/rle.hpp"

namespace codr {

// .codr layout: magic "CODRRLE1", then per layer
//   layer id u32 LE | W u8 | k_delta u8 | k_count u8 | k_index u8 | idx_full u8 |
//   delta bits u64 LE | count bits u64 LE | index bits u64 LE |
//   delta bytes | count bytes | index bytes
// Each payload is ceil(bits / 8) bytes, LSB-first, zero padded.

inline constexpr size_t kCodrMagicBytes = 8;
inline constexpr size_t kCodrLayerHeaderBytes = 4 + 1 + 4 + 3 * 8;

/// Bytes one layer record occupies in a .codr file.
size_t serialized_size(const rle::EncodedLayer& layer);

void write_codr(std::ostream& os, const std::vector<rle::EncodedLayer>& layers);
std::vector<rle::EncodedLayer> read_codr(std::istream& is);

std::vector<uint8_t> to_codr_bytes(const std::vector<rle::EncodedLayer>& layers);
std::vector<rle::EncodedLayer> from_codr_bytes(const std::vector<uint8_t>& bytes);

void save_codr(const std::filesystem::path& path, const std::vector<rle::EncodedLayer>& layers);
std::vector<rle::EncodedLayer> load_codr(const std::filesystem::path& path);

}  // namespace codr
