#include "codr/conv.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "codr/error.hpp"

namespace codr {

void LayerShape::validate() const {
    if (n_in < 1 || m_out < 1 || k_rows < 1 || k_cols < 1 || in_rows < 1 || in_cols < 1) {
        throw ValidationError("layer extents must be >= 1: " + to_string(*this));
    }
    if (stride < 1) throw ValidationError("stride must be >= 1: " + to_string(*this));
    if (pad < 0) throw ValidationError("pad must be >= 0: " + to_string(*this));
    const int span_r = in_rows + 2 * pad - k_rows;
    const int span_c = in_cols + 2 * pad - k_cols;
    if (span_r < 0 || span_c < 0) {
        throw ValidationError("kernel larger than padded input: " + to_string(*this));
    }
    if (span_r % stride != 0) {
        throw ValidationError("rows: (in_rows + 2*pad - k_rows) not divisible by stride: " + to_string(*this));
    }
    if (span_c % stride != 0) {
        throw ValidationError("cols: (in_cols + 2*pad - k_cols) not divisible by stride: " + to_string(*this));
    }
}

std::string to_string(const LayerShape& s) {
    std::ostringstream os;
    os << "N=" << s.n_in << " M=" << s.m_out << " K=" << s.k_rows << "x" << s.k_cols << " I=" << s.in_rows
       << "x" << s.in_cols << " stride=" << s.stride << " pad=" << s.pad;
    return os.str();
}

void validate_bit_width(int bits) {
    if (bits != 8 && bits != 16) {
        throw ValidationError("bit width must be 8 or 16, got " + std::to_string(bits));
    }
}

WeightTensor::WeightTensor(int m_out, int n_in, int k_rows, int k_cols)
    : m_out_(m_out), n_in_(n_in), k_rows_(k_rows), k_cols_(k_cols),
      values_(static_cast<size_t>(m_out) * n_in * k_rows * k_cols, 0),
      bias_(static_cast<size_t>(m_out), 0) {}

bool WeightTensor::matches(const LayerShape& shape) const {
    return m_out_ == shape.m_out && n_in_ == shape.n_in && k_rows_ == shape.k_rows && k_cols_ == shape.k_cols &&
           bias_.size() == static_cast<size_t>(shape.m_out);
}

namespace {

int64_t round_half_away(double v) { return static_cast<int64_t>(std::round(v)); }

int32_t clamp_to_width(int64_t v, int bits) {
    return static_cast<int32_t>(std::clamp(v, min_of_width(bits), max_of_width(bits)));
}

void check_conv_args(const FeatureMap& input, const WeightTensor& weights, const LayerShape& shape) {
    shape.validate();
    if (input.channels() != shape.n_in || input.rows() != shape.in_rows || input.cols() != shape.in_cols) {
        throw ValidationError("input feature map does not match layer shape " + to_string(shape));
    }
    if (!weights.matches(shape)) {
        throw ValidationError("weight tensor does not match layer shape " + to_string(shape));
    }
}

}  // namespace

QuantizedTensor quantize_tensor(std::span<const float> values, int bit_width) {
    validate_bit_width(bit_width);
    if (values.empty()) throw ValidationError("cannot quantize an empty tensor");
    double max_abs = 0.0;
    for (size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw ValidationError("non-finite value at element " + std::to_string(i));
        }
        max_abs = std::max(max_abs, std::abs(static_cast<double>(values[i])));
    }
    QuantizedTensor out;
    out.params.bit_width = bit_width;
    out.params.scale = max_abs == 0.0 ? 1.0 : max_abs / static_cast<double>(max_of_width(bit_width));
    out.values = quantize_with_scale(values, out.params.scale, bit_width);
    return out;
}

std::vector<int32_t> quantize_with_scale(std::span<const float> values, double scale, int bit_width) {
    if (!(scale > 0.0)) throw ValidationError("quantization scale must be positive");
    std::vector<int32_t> out;
    out.reserve(values.size());
    for (size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw ValidationError("non-finite value at element " + std::to_string(i));
        }
        out.push_back(clamp_to_width(round_half_away(values[i] / scale), bit_width));
    }
    return out;
}

void check_range(std::span<const int32_t> values, int bit_width, const char* what) {
    const int64_t lo = min_of_width(bit_width);
    const int64_t hi = max_of_width(bit_width);
    for (size_t i = 0; i < values.size(); ++i) {
        if (values[i] < lo || values[i] > hi) {
            throw ValidationError(std::string(what) + ": element " + std::to_string(i) + " value " +
                                  std::to_string(values[i]) + " outside " + std::to_string(bit_width) +
                                  "-bit range");
        }
    }
}

Activation parse_activation(const std::string& name) {
    if (name == "none" || name.empty()) return Activation::none;
    if (name == "relu") return Activation::relu;
    throw ValidationError("unknown activation '" + name + "'");
}

std::string to_string(Activation act) { return act == Activation::relu ? "relu" : "none"; }

AccumulatorMap direct_conv(const FeatureMap& input, const WeightTensor& weights, const LayerShape& shape) {
    check_conv_args(input, weights, shape);
    const int ro = shape.out_rows();
    const int co = shape.out_cols();
    AccumulatorMap out(shape.m_out, ro, co);
    for (int m = 0; m < shape.m_out; ++m) {
        for (int r = 0; r < ro; ++r) {
            for (int c = 0; c < co; ++c) {
                int64_t sum = weights.bias()[m];
                for (int n = 0; n < shape.n_in; ++n) {
                    for (int kr = 0; kr < shape.k_rows; ++kr) {
                        const int ir = r * shape.stride + kr - shape.pad;
                        if (ir < 0 || ir >= shape.in_rows) continue;
                        for (int kc = 0; kc < shape.k_cols; ++kc) {
                            const int ic = c * shape.stride + kc - shape.pad;
                            if (ic < 0 || ic >= shape.in_cols) continue;
                            sum += int64_t{weights.at(m, n, kr, kc)} * input.at(n, ir, ic);
                        }
                    }
                }
                out.at(m, r, c) = sum;
            }
        }
    }
    return out;
}

AccumulatorMap scalar_matrix_conv(const FeatureMap& input, const WeightTensor& weights, const LayerShape& shape) {
    check_conv_args(input, weights, shape);
    const int ro = shape.out_rows();
    const int co = shape.out_cols();
    AccumulatorMap out(shape.m_out, ro, co);
    for (int m = 0; m < shape.m_out; ++m) {
        for (int r = 0; r < ro; ++r) {
            for (int c = 0; c < co; ++c) out.at(m, r, c) = weights.bias()[m];
        }
        for (int n = 0; n < shape.n_in; ++n) {
            for (int kr = 0; kr < shape.k_rows; ++kr) {
                for (int kc = 0; kc < shape.k_cols; ++kc) {
                    const int64_t w = weights.at(m, n, kr, kc);
                    if (w == 0) continue;
                    // region of the padded input starting at (kr, kc), stepped by stride
                    for (int r = 0; r < ro; ++r) {
                        const int ir = r * shape.stride + kr - shape.pad;
                        if (ir < 0 || ir >= shape.in_rows) continue;
                        for (int c = 0; c < co; ++c) {
                            const int ic = c * shape.stride + kc - shape.pad;
                            if (ic < 0 || ic >= shape.in_cols) continue;
                            out.at(m, r, c) += w * input.at(n, ir, ic);
                        }
                    }
                }
            }
        }
    }
    return out;
}

FeatureMap saturate(const AccumulatorMap& acc, int bit_width, uint64_t* saturated) {
    FeatureMap out(acc.channels(), acc.rows(), acc.cols());
    uint64_t clamped = 0;
    const int64_t lo = min_of_width(bit_width);
    const int64_t hi = max_of_width(bit_width);
    auto src = acc.data();
    auto dst = out.data();
    for (size_t i = 0; i < src.size(); ++i) {
        if (src[i] < lo || src[i] > hi) ++clamped;
        dst[i] = static_cast<int32_t>(std::clamp(src[i], lo, hi));
    }
    if (saturated) *saturated = clamped;
    return out;
}

}  // namespace codr
