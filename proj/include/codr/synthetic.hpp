#pragma once

#include <cstdint>

#include "codr/conv.hpp"

namespace codr {

/// Controls density and unique-value count of generated weights.
struct SyntheticSpec {
    double density = 1.0;    // in (0, 1]
    int unique_count = 256;  // power of two in [2, 2^W]
    uint64_t seed = 42;
    int bit_width = 8;

    void validate() const;
    /// Low bits cleared in every weight: W - log2(U).
    int masked_bits() const;
};

/// Zeroes the low `bits` of a two's complement value.
int32_t mask_low_bits(int32_t value, int bits);

/// Every element draws a uniform W-bit value and a uniform keep test, so a
/// lower density or unique count at the same seed only zeroes or coarsens
/// weights that a higher setting kept. Bias is drawn uniformly and is
/// unaffected by density and unique count.
WeightTensor gen_synthetic_weights(const LayerShape& shape, const SyntheticSpec& spec, uint32_t layer_id = 0);

/// Uniform W-bit input features, seeded per layer.
FeatureMap gen_synthetic_input(const LayerShape& shape, int bit_width, uint64_t seed, uint32_t layer_id = 0);

}  // namespace codr
