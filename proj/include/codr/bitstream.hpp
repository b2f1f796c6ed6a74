#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace codr {

/// Bit buffer packed LSB-first within each byte. Bits past `bit_length()` in
/// the last byte are zero.
class Bitstream {
public:
    Bitstream() = default;
    Bitstream(std::vector<uint8_t> bytes, size_t bit_length);

    size_t bit_length() const { return bits_; }
    size_t byte_length() const { return bytes_.size(); }
    std::span<const uint8_t> bytes() const { return bytes_; }

    bool operator==(const Bitstream&) const = default;

private:
    friend class BitWriter;
    std::vector<uint8_t> bytes_;
    size_t bits_ = 0;
};

class BitWriter {
public:
    /// Appends the low `width` bits of `value`, least significant first.
    void put(uint64_t value, int width);
    void put_bit(bool bit) { put(bit ? 1 : 0, 1); }

    size_t bit_length() const { return stream_.bits_; }
    const Bitstream& stream() const { return stream_; }
    Bitstream take() { return std::move(stream_); }

private:
    Bitstream stream_;
};

class BitReader {
public:
    explicit BitReader(const Bitstream& stream) : stream_(&stream) {}

    /// Throws CorruptionError when fewer than `width` bits remain.
    uint64_t get(int width);
    bool get_bit() { return get(1) != 0; }

    size_t position() const { return cursor_; }
    size_t remaining() const { return stream_->bit_length() - cursor_; }

private:
    const Bitstream* stream_;
    size_t cursor_ = 0;
};

/// Smallest b with 2^b >= x; 0 for x <= 1.
int ceil_log2(uint64_t x);

/// Sign-extends the low `width` bits of `raw`.
int64_t sign_extend(uint64_t raw, int width);

}  // namespace codr
