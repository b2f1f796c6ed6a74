#include "codr/codr_file.hpp"

#include <array>
#include <fstream>
#include <sstream>

#include "codr/error.hpp"

namespace codr {

namespace {

constexpr std::array<char, kCodrMagicBytes> kMagic = {'C', 'O', 'D', 'R', 'R', 'L', 'E', '1'};

template <typename T>
void put_le(std::ostream& os, T v) {
    for (size_t i = 0; i < sizeof(T); ++i) {
        os.put(static_cast<char>(v & 0xFF));
        v = static_cast<T>(v >> 8);
    }
}

template <typename T>
T get_le(std::istream& is, const char* what) {
    T v = 0;
    for (size_t i = 0; i < sizeof(T); ++i) {
        const int c = is.get();
        if (c == std::char_traits<char>::eof()) throw CorruptionError(std::string(".codr truncated in ") + what);
        v |= static_cast<T>(static_cast<T>(static_cast<uint8_t>(c)) << (8 * i));
    }
    return v;
}

void put_stream(std::ostream& os, const Bitstream& s) {
    const auto bytes = s.bytes();
    os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

Bitstream get_stream(std::istream& is, uint64_t bits, const char* what) {
    const uint64_t nbytes = (bits + 7) / 8;
    std::vector<uint8_t> bytes(nbytes);
    is.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(nbytes));
    if (static_cast<uint64_t>(is.gcount()) != nbytes) {
        throw CorruptionError(std::string(".codr truncated in ") + what + " payload");
    }
    return Bitstream(std::move(bytes), bits);
}

}  // namespace

size_t serialized_size(const rle::EncodedLayer& layer) {
    return kCodrLayerHeaderBytes + layer.delta.byte_length() + layer.count.byte_length() + layer.index.byte_length();
}

void write_codr(std::ostream& os, const std::vector<rle::EncodedLayer>& layers) {
    os.write(kMagic.data(), kMagic.size());
    for (const auto& l : layers) {
        put_le<uint32_t>(os, l.layer_id);
        put_le<uint8_t>(os, static_cast<uint8_t>(l.params.w_full));
        put_le<uint8_t>(os, static_cast<uint8_t>(l.params.k_delta));
        put_le<uint8_t>(os, static_cast<uint8_t>(l.params.k_count));
        put_le<uint8_t>(os, static_cast<uint8_t>(l.params.k_index));
        put_le<uint8_t>(os, static_cast<uint8_t>(l.params.idx_full));
        put_le<uint64_t>(os, l.delta.bit_length());
        put_le<uint64_t>(os, l.count.bit_length());
        put_le<uint64_t>(os, l.index.bit_length());
        put_stream(os, l.delta);
        put_stream(os, l.count);
        put_stream(os, l.index);
    }
}

std::vector<rle::EncodedLayer> read_codr(std::istream& is) {
    std::array<char, kCodrMagicBytes> magic{};
    is.read(magic.data(), magic.size());
    if (!is || magic != kMagic) throw CorruptionError("not a .codr file (bad magic)");
    std::vector<rle::EncodedLayer> layers;
    while (is.peek() != std::char_traits<char>::eof()) {
        rle::EncodedLayer l;
        l.layer_id = get_le<uint32_t>(is, "layer id");
        l.params.w_full = get_le<uint8_t>(is, "bit width");
        l.params.k_delta = get_le<uint8_t>(is, "k_delta");
        l.params.k_count = get_le<uint8_t>(is, "k_count");
        l.params.k_index = get_le<uint8_t>(is, "k_index");
        l.params.idx_full = get_le<uint8_t>(is, "idx_full");
        const auto delta_bits = get_le<uint64_t>(is, "delta length");
        const auto count_bits = get_le<uint64_t>(is, "count length");
        const auto index_bits = get_le<uint64_t>(is, "index length");
        l.delta = get_stream(is, delta_bits, "delta");
        l.count = get_stream(is, count_bits, "count");
        l.index = get_stream(is, index_bits, "index");
        layers.push_back(std::move(l));
    }
    return layers;
}

std::vector<uint8_t> to_codr_bytes(const std::vector<rle::EncodedLayer>& layers) {
    std::ostringstream os(std::ios::binary);
    write_codr(os, layers);
    const std::string s = os.str();
    return {s.begin(), s.end()};
}

std::vector<rle::EncodedLayer> from_codr_bytes(const std::vector<uint8_t>& bytes) {
    std::istringstream is(std::string(bytes.begin(), bytes.end()), std::ios::binary);
    return read_codr(is);
}

void save_codr(const std::filesystem::path& path, const std::vector<rle::EncodedLayer>& layers) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_codr(os, layers);
}

std::vector<rle::EncodedLayer> load_codr(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ValidationError("cannot open .codr file " + path.string());
    return read_codr(is);
}

}  // namespace codr
