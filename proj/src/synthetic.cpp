#include "codr/synthetic.hpp"

#include <bit>
#include <cmath>
#include <random>

#include "codr/bitstream.hpp"
#include "codr/error.hpp"

namespace codr {

namespace {

uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// mt19937_64 output is fixed by the standard; the distributions are not, so
// values are derived from raw draws.
std::mt19937_64 make_engine(uint64_t seed, uint32_t layer_id, uint64_t salt) {
    return std::mt19937_64(splitmix64(seed ^ splitmix64((uint64_t{layer_id} << 8) ^ salt)));
}

int32_t draw_value(std::mt19937_64& rng, int bits) {
    return static_cast<int32_t>(sign_extend(rng() >> (64 - bits), bits));
}

double draw_unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

void SyntheticSpec::validate() const {
    validate_bit_width(bit_width);
    if (!(density > 0.0 && density <= 1.0)) {
        throw ValidationError("density must be in (0, 1], got " + std::to_string(density));
    }
    if (unique_count < 2 || unique_count > (1 << bit_width) || !std::has_single_bit(static_cast<unsigned>(unique_count))) {
        throw ValidationError("unique count must be a power of two in [2, 2^" + std::to_string(bit_width) +
                              "], got " + std::to_string(unique_count));
    }
}

int SyntheticSpec::masked_bits() const {
    return bit_width - std::countr_zero(static_cast<unsigned>(unique_count));
}

int32_t mask_low_bits(int32_t value, int bits) {
    if (bits <= 0) return value;
    return static_cast<int32_t>(static_cast<uint32_t>(value) & ~((uint32_t{1} << bits) - 1));
}

WeightTensor gen_synthetic_weights(const LayerShape& shape, const SyntheticSpec& spec, uint32_t layer_id) {
    shape.validate();
    spec.validate();
    WeightTensor w(shape.m_out, shape.n_in, shape.k_rows, shape.k_cols);
    auto rng = make_engine(spec.seed, layer_id, 1);
    const int masked = spec.masked_bits();
    for (auto& v : w.values()) {
        const int32_t value = draw_value(rng, spec.bit_width);
        const bool keep = draw_unit(rng) < spec.density;
        v = keep ? mask_low_bits(value, masked) : 0;
    }
    for (auto& b : w.bias()) b = draw_value(rng, spec.bit_width);
    return w;
}

FeatureMap gen_synthetic_input(const LayerShape& shape, int bit_width, uint64_t seed, uint32_t layer_id) {
    shape.validate();
    validate_bit_width(bit_width);
    FeatureMap fm(shape.n_in, shape.in_rows, shape.in_cols);
    auto rng = make_engine(seed, layer_id, 2);
    for (auto& v : fm.data()) v = draw_value(rng, bit_width);
    return fm;
}

}  // namespace codr
