#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace mpad {

/// Fixed-length bit string packed into 64-bit words.
///
/// Bit i lives in word i / 64 at position i % 64, which serializes to byte i / 8 at position
/// i % 8 (least-significant bit first). Bits past size() are always zero.
class BitVector {
public:
    BitVector() = default;
    explicit BitVector(std::size_t size);

    /// Reads the first `bits` bits of `bytes`. Pad bits in the final byte are ignored.
    static BitVector from_bytes(std::span<const std::uint8_t> bytes, std::size_t bits);
    /// ceil(size / 8) bytes, pad bits zero.
    std::vector<std::uint8_t> to_bytes() const;

    std::size_t size() const noexcept { return m_size; }
    bool empty() const noexcept { return m_size == 0; }

    bool test(std::size_t i) const;
    void set(std::size_t i, bool value = true);
    void flip(std::size_t i);

    std::size_t count() const noexcept;

    /// Up to 64 bits starting at `pos`, returned in the low bits. Caller guarantees pos + count <= size().
    std::uint64_t read(std::size_t pos, unsigned count) const noexcept;
    /// XORs the low `count` bits of `value` into positions [pos, pos + count).
    void xor_at(std::size_t pos, std::uint64_t value, unsigned count) noexcept;

    BitVector& operator^=(const BitVector& other);
    friend BitVector operator^(BitVector lhs, const BitVector& rhs) {
        lhs ^= rhs;
        return lhs;
    }

    friend bool operator==(const BitVector&, const BitVector&) = default;

    std::span<const std::uint64_t> words() const noexcept { return m_words; }

private:
    std::size_t m_size = 0;
    std::vector<std::uint64_t> m_words;
};

std::size_t hamming_distance(const BitVector& a, const BitVector& b);

}  // namespace mpad
