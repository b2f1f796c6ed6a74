#include "codr/bitstream.hpp"

#include <bit>

#include "codr/error.hpp"

namespace codr {

Bitstream::Bitstream(std::vector<uint8_t> bytes, size_t bit_length) : bytes_(std::move(bytes)), bits_(bit_length) {
    if ((bits_ + 7) / 8 != bytes_.size()) {
        throw CorruptionError("bitstream of " + std::to_string(bits_) + " bits cannot occupy " +
                              std::to_string(bytes_.size()) + " bytes");
    }
}

void BitWriter::put(uint64_t value, int width) {
    for (int i = 0; i < width; ++i) {
        const size_t bit = stream_.bits_;
        if (bit % 8 == 0) stream_.bytes_.push_back(0);
        if ((value >> i) & 1U) stream_.bytes_.back() |= static_cast<uint8_t>(1U << (bit % 8));
        ++stream_.bits_;
    }
}

uint64_t BitReader::get(int width) {
    if (static_cast<size_t>(width) > remaining()) {
        throw CorruptionError("bitstream truncated at bit " + std::to_string(cursor_) + " (wanted " +
                              std::to_string(width) + " bits, " + std::to_string(remaining()) + " left)");
    }
    uint64_t value = 0;
    const auto bytes = stream_->bytes();
    for (int i = 0; i < width; ++i, ++cursor_) {
        const uint64_t bit = (bytes[cursor_ / 8] >> (cursor_ % 8)) & 1U;
        value |= bit << i;
    }
    return value;
}

int ceil_log2(uint64_t x) { return x <= 1 ? 0 : static_cast<int>(std::bit_width(x - 1)); }

int64_t sign_extend(uint64_t raw, int width) {
    const uint64_t sign = uint64_t{1} << (width - 1);
    raw &= (width == 64) ? ~uint64_t{0} : ((uint64_t{1} << width) - 1);
    return static_cast<int64_t>((raw ^ sign) - sign);
}

}  // namespace codr
