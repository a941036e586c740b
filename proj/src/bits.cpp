#include <mpad/bits.hpp>

#include <mpad/error.hpp>

#include <bit>
#include <string>

namespace mpad {

namespace {

constexpr std::size_t word_count(std::size_t bits) {
    return (bits + 63) / 64;
}

constexpr std::uint64_t low_mask(unsigned count) {
    return count >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << count) - 1);
}

}  // namespace

BitVector::BitVector(std::size_t size) : m_size(size), m_words(word_count(size), 0) {}

BitVector BitVector::from_bytes(std::span<const std::uint8_t> bytes, std::size_t bits) {
    if(bytes.size() < (bits + 7) / 8) {
        throw FormatError("bit payload truncated: need " + std::to_string((bits + 7) / 8) + " bytes, have " +
                          std::to_string(bytes.size()));
    }
    BitVector out(bits);
    for(std::size_t b = 0; b < (bits + 7) / 8; ++b) {
        out.m_words[b / 8] |= std::uint64_t{bytes[b]} << (8 * (b % 8));
    }
    if(bits % 64 != 0) {
        out.m_words.back() &= low_mask(bits % 64);
    }
    return out;
}

std::vector<std::uint8_t> BitVector::to_bytes() const {
    std::vector<std::uint8_t> out((m_size + 7) / 8);
    for(std::size_t b = 0; b < out.size(); ++b) {
        out[b] = static_cast<std::uint8_t>(m_words[b / 8] >> (8 * (b % 8)));
    }
    return out;
}

bool BitVector::test(std::size_t i) const {
    if(i >= m_size) {
        throw IndexOutOfRange("bit index " + std::to_string(i) + " out of range " + std::to_string(m_size));
    }
    return (m_words[i / 64] >> (i % 64)) & 1;
}

void BitVector::set(std::size_t i, bool value) {
    if(i >= m_size) {
        throw IndexOutOfRange("bit index " + std::to_string(i) + " out of range " + std::to_string(m_size));
    }
    const std::uint64_t mask = std::uint64_t{1} << (i % 64);
    if(value) {
        m_words[i / 64] |= mask;
    } else {
        m_words[i / 64] &= ~mask;
    }
}

void BitVector::flip(std::size_t i) {
    if(i >= m_size) {
        throw IndexOutOfRange("bit index " + std::to_string(i) + " out of range " + std::to_string(m_size));
    }
    m_words[i / 64] ^= std::uint64_t{1} << (i % 64);
}

std::size_t BitVector::count() const noexcept {
    std::size_t total = 0;
    for(const auto w : m_words) {
        total += static_cast<std::size_t>(std::popcount(w));
    }
    return total;
}

std::uint64_t BitVector::read(std::size_t pos, unsigned count) const noexcept {
    const std::size_t w = pos / 64;
    const unsigned off = pos % 64;
    std::uint64_t v = m_words[w] >> off;
    if(off + count > 64) {
        v |= m_words[w + 1] << (64 - off);
    }
    return v & low_mask(count);
}

void BitVector::xor_at(std::size_t pos, std::uint64_t value, unsigned count) noexcept {
    value &= low_mask(count);
    const std::size_t w = pos / 64;
    const unsigned off = pos % 64;
    m_words[w] ^= value << off;
    if(off + count > 64) {
        m_words[w + 1] ^= value >> (64 - off);
    }
}

BitVector& BitVector::operator^=(const BitVector& other) {
    if(other.m_size != m_size) {
        throw DimensionMismatch("xor of bit vectors with lengths " + std::to_string(m_size) + " and " +
                                std::to_string(other.m_size));
    }
    for(std::size_t i = 0; i < m_words.size(); ++i) {
        m_words[i] ^= other.m_words[i];
    }
    return *this;
}

std::size_t hamming_distance(const BitVector& a, const BitVector& b) {
    if(a.size() != b.size()) {
        throw DimensionMismatch("hamming distance of unequal lengths");
    }
    std::size_t total = 0;
    const auto wa = a.words();
    const auto wb = b.words();
    for(std::size_t i = 0; i < wa.size(); ++i) {
        total += static_cast<std::size_t>(std::popcount(wa[i] ^ wb[i]));
    }
    return total;
}

}  // namespace mpad
