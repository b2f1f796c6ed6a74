#include "codr/tensor_file.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "codr/error.hpp"

namespace codr {

namespace {

constexpr std::array<char, 8> kMagic = {'C', 'O', 'D', 'R', 'T', 'N', 'S', 'R'};

template <typename T>
void put_le(std::ostream& os, T v) {
    using U = std::make_unsigned_t<T>;
    U u = static_cast<U>(v);
    for (size_t i = 0; i < sizeof(T); ++i) {
        os.put(static_cast<char>(u & 0xFF));
        u = static_cast<U>(u >> 8);
    }
}

template <typename T>
T get_le(std::istream& is) {
    using U = std::make_unsigned_t<T>;
    U u = 0;
    for (size_t i = 0; i < sizeof(T); ++i) {
        const int c = is.get();
        if (c == std::char_traits<char>::eof()) throw CorruptionError("tensor file truncated");
        u |= static_cast<U>(static_cast<U>(static_cast<uint8_t>(c)) << (8 * i));
    }
    return static_cast<T>(u);
}

}  // namespace

size_t TensorFile::element_count() const {
    size_t n = 1;
    for (auto d : dims) n *= d;
    return n;
}

DType dtype_for_width(int bit_width) {
    validate_bit_width(bit_width);
    return bit_width == 8 ? DType::int8 : DType::int16;
}

void write_tensor(std::ostream& os, const TensorFile& t) {
    const size_t count = t.element_count();
    if ((t.is_float() ? t.floats.size() : t.ints.size()) != count) {
        throw ValidationError("tensor payload size does not match dims");
    }
    os.write(kMagic.data(), kMagic.size());
    put_le<uint16_t>(os, kTensorFileVersion);
    put_le<uint8_t>(os, static_cast<uint8_t>(t.dtype));
    put_le<uint8_t>(os, static_cast<uint8_t>(t.dims.size()));
    for (auto d : t.dims) put_le<uint32_t>(os, d);
    switch (t.dtype) {
        case DType::int8:
            check_range(t.ints, 8, "int8 tensor");
            for (auto v : t.ints) put_le<int8_t>(os, static_cast<int8_t>(v));
            break;
        case DType::int16:
            check_range(t.ints, 16, "int16 tensor");
            for (auto v : t.ints) put_le<int16_t>(os, static_cast<int16_t>(v));
            break;
        case DType::float32:
            for (float f : t.floats) {
                uint32_t bits;
                std::memcpy(&bits, &f, sizeof bits);
                put_le<uint32_t>(os, bits);
            }
            break;
    }
}

TensorFile read_tensor(std::istream& is) {
    std::array<char, 8> magic{};
    is.read(magic.data(), magic.size());
    if (!is || magic != kMagic) throw CorruptionError("not a CODRTNSR tensor file");
    const auto version = get_le<uint16_t>(is);
    if (version != kTensorFileVersion) {
        throw CorruptionError("unsupported tensor file version " + std::to_string(version));
    }
    TensorFile t;
    const auto code = get_le<uint8_t>(is);
    if (code < 1 || code > 3) throw CorruptionError("unknown dtype code " + std::to_string(code));
    t.dtype = static_cast<DType>(code);
    const auto rank = get_le<uint8_t>(is);
    for (int i = 0; i < rank; ++i) t.dims.push_back(get_le<uint32_t>(is));
    const size_t count = t.element_count();
    if (t.is_float()) {
        t.floats.reserve(count);
        for (size_t i = 0; i < count; ++i) {
            const auto bits = get_le<uint32_t>(is);
            float f;
            std::memcpy(&f, &bits, sizeof f);
            t.floats.push_back(f);
        }
    } else {
        t.ints.reserve(count);
        for (size_t i = 0; i < count; ++i) {
            t.ints.push_back(t.dtype == DType::int8 ? get_le<int8_t>(is) : get_le<int16_t>(is));
        }
    }
    return t;
}

void save_tensor(const std::filesystem::path& path, const TensorFile& t) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_tensor(os, t);
}

TensorFile load_tensor(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ValidationError("cannot open tensor file " + path.string());
    return read_tensor(is);
}

TensorFile make_int_tensor(std::vector<uint32_t> dims, std::vector<int32_t> values, int bit_width) {
    TensorFile t;
    t.dtype = dtype_for_width(bit_width);
    t.dims = std::move(dims);
    t.ints = std::move(values);
    if (t.ints.size() != t.element_count()) {
        throw ValidationError("tensor has " + std::to_string(t.ints.size()) + " values for " +
                              std::to_string(t.element_count()) + " elements");
    }
    return t;
}

TensorFile from_feature_map(const FeatureMap& fm, int bit_width) {
    auto data = fm.data();
    return make_int_tensor({static_cast<uint32_t>(fm.channels()), static_cast<uint32_t>(fm.rows()),
                            static_cast<uint32_t>(fm.cols())},
                           std::vector<int32_t>(data.begin(), data.end()), bit_width);
}

FeatureMap to_feature_map(const TensorFile& t, int bit_width) {
    if (t.dims.size() != 3) throw ValidationError("feature tensor must have rank 3");
    FeatureMap fm(static_cast<int>(t.dims[0]), static_cast<int>(t.dims[1]), static_cast<int>(t.dims[2]));
    std::vector<int32_t> values;
    if (t.is_float()) {
        values = quantize_tensor(t.floats, bit_width).values;
    } else {
        if (t.dtype == DType::int16 && bit_width == 8) {
            throw ValidationError("int16 feature tensor given to an 8-bit layer");
        }
        values = t.ints;
        check_range(values, bit_width, "feature tensor");
    }
    std::copy(values.begin(), values.end(), fm.data().begin());
    return fm;
}

}  // namespace codr
