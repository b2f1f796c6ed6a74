#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace codr {

/// Geometry of one convolutional layer. Output extents are derived.
struct LayerShape {
    int n_in = 1;
    int m_out = 1;
    int k_rows = 1;
    int k_cols = 1;
    int in_rows = 1;
    int in_cols = 1;
    int stride = 1;
    int pad = 0;

    int out_rows() const { return (in_rows + 2 * pad - k_rows) / stride + 1; }
    int out_cols() const { return (in_cols + 2 * pad - k_cols) / stride + 1; }
    int kernel_area() const { return k_rows * k_cols; }

    /// Throws ValidationError unless every extent is positive and the output
    /// extent divides exactly.
    void validate() const;

    bool operator==(const LayerShape&) const = default;
};

std::string to_string(const LayerShape& shape);

/// Inclusive range of a W-bit two's complement integer.
constexpr int64_t min_of_width(int bits) { return -(int64_t{1} << (bits - 1)); }
constexpr int64_t max_of_width(int bits) { return (int64_t{1} << (bits - 1)) - 1; }

void validate_bit_width(int bits);

/// Dense channels x rows x cols array.
template <typename T>
class Volume {
public:
    Volume() = default;
    Volume(int channels, int rows, int cols, T fill = T{})
        : channels_(channels), rows_(rows), cols_(cols),
          data_(static_cast<size_t>(channels) * rows * cols, fill) {}

    int channels() const { return channels_; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }
    size_t size() const { return data_.size(); }

    size_t offset(int c, int r, int k) const {
        return (static_cast<size_t>(c) * rows_ + r) * cols_ + k;
    }
    T& at(int c, int r, int k) { return data_[offset(c, r, k)]; }
    const T& at(int c, int r, int k) const { return data_[offset(c, r, k)]; }

    std::span<T> data() { return data_; }
    std::span<const T> data() const { return data_; }

    bool operator==(const Volume&) const = default;

private:
    int channels_ = 0;
    int rows_ = 0;
    int cols_ = 0;
    std::vector<T> data_;
};

/// Features as W-bit values held in 32-bit storage.
using FeatureMap = Volume<int32_t>;
/// Wide accumulators for partial and final sums before saturation.
using AccumulatorMap = Volume<int64_t>;

/// m_out x n_in x k_rows x k_cols weights plus one bias per output channel.
class WeightTensor {
public:
    WeightTensor() = default;
    WeightTensor(int m_out, int n_in, int k_rows, int k_cols);

    int m_out() const { return m_out_; }
    int n_in() const { return n_in_; }
    int k_rows() const { return k_rows_; }
    int k_cols() const { return k_cols_; }

    int32_t& at(int m, int n, int kr, int kc) { return values_[offset(m, n, kr, kc)]; }
    int32_t at(int m, int n, int kr, int kc) const { return values_[offset(m, n, kr, kc)]; }

    std::span<int32_t> values() { return values_; }
    std::span<const int32_t> values() const { return values_; }
    std::vector<int32_t>& bias() { return bias_; }
    const std::vector<int32_t>& bias() const { return bias_; }

    bool matches(const LayerShape& shape) const;

    bool operator==(const WeightTensor&) const = default;

private:
    size_t offset(int m, int n, int kr, int kc) const {
        return ((static_cast<size_t>(m) * n_in_ + n) * k_rows_ + kr) * k_cols_ + kc;
    }

    int m_out_ = 0;
    int n_in_ = 0;
    int k_rows_ = 0;
    int k_cols_ = 0;
    std::vector<int32_t> values_;
    std::vector<int32_t> bias_;
};

struct QuantParams {
    int bit_width = 8;
    double scale = 1.0;  // symmetric, zero point 0
};

struct QuantizedTensor {
    std::vector<int32_t> values;
    QuantParams params;
};

/// Symmetric per-tensor quantization with round-half-away-from-zero.
QuantizedTensor quantize_tensor(std::span<const float> values, int bit_width);

/// Quantizes with a caller-chosen scale, clamping to the W-bit range.
std::vector<int32_t> quantize_with_scale(std::span<const float> values, double scale, int bit_width);

/// Throws ValidationError if any value falls outside the W-bit range.
void check_range(std::span<const int32_t> values, int bit_width, const char* what);

enum class Activation { none, relu };

Activation parse_activation(const std::string& name);
std::string to_string(Activation act);

/// Ground truth: per-output-feature 3D dot product, bias first.
AccumulatorMap direct_conv(const FeatureMap& input, const WeightTensor& weights, const LayerShape& shape);

/// Every non-zero weight scales its shifted input region; the partial
/// matrices of one filter are summed.
AccumulatorMap scalar_matrix_conv(const FeatureMap& input, const WeightTensor& weights, const LayerShape& shape);

template <typename T>
Volume<T> apply_activation(Volume<T> features, Activation mode) {
    if (mode == Activation::relu) {
        for (auto& v : features.data()) {
            if (v < 0) v = 0;
        }
    }
    return features;
}

/// Clamps to the W-bit range. `saturated`, when given, receives the number of
/// clamped elements.
FeatureMap saturate(const AccumulatorMap& acc, int bit_width, uint64_t* saturated = nullptr);

}  // namespace codr
