#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "codr/conv.hpp"

namespace codr {

// CODRTNSR layout: 8-byte magic, version u16 LE, dtype u8, rank u8,
// dims u32 LE each, row-major little-endian payload.

enum class DType : uint8_t { int8 = 1, int16 = 2, float32 = 3 };

inline constexpr uint16_t kTensorFileVersion = 1;

struct TensorFile {
    DType dtype = DType::int8;
    std::vector<uint32_t> dims;
    std::vector<int32_t> ints;   // int8 / int16 payload
    std::vector<float> floats;   // float32 payload

    size_t element_count() const;
    bool is_float() const { return dtype == DType::float32; }
};

DType dtype_for_width(int bit_width);

void write_tensor(std::ostream& os, const TensorFile& t);
TensorFile read_tensor(std::istream& is);

void save_tensor(const std::filesystem::path& path, const TensorFile& t);
TensorFile load_tensor(const std::filesystem::path& path);

TensorFile make_int_tensor(std::vector<uint32_t> dims, std::vector<int32_t> values, int bit_width);
TensorFile from_feature_map(const FeatureMap& fm, int bit_width);

/// Rank-3 integer tensor to FeatureMap. Float payloads are quantized to
/// `bit_width` first.
FeatureMap to_feature_map(const TensorFile& t, int bit_width);

}  // namespace codr
