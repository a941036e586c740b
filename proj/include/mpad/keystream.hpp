#pragma once

#include <mpad/bits.hpp>
#include <mpad/key.hpp>

#include <cstdint>

namespace mpad {

class RandomMatrix;

/// The m-bit pad for one (pair, slot, window).
struct Keystream {
    DevicePair pair;
    SlotId slot = 0;
    std::uint64_t eta = 1;
    BitVector bits;
};

/// Bit i (1-based) is the XOR over rows r of matrix[r][(key_r + m*(eta - 1) + i - 1) mod n].
///
/// Throws DimensionMismatch when the key's (n, k) differ from the matrix and IndexOutOfRange
/// for eta == 0. Parameter-regime checks belong to the caller.
Keystream derive_keystream(const RandomMatrix& matrix, const PairwiseKey& key, std::uint64_t m, std::uint64_t eta);

/// Bits only; same contract as derive_keystream.
BitVector keystream_bits(const RandomMatrix& matrix, const PairwiseKey& key, std::uint64_t m, std::uint64_t eta);

/// Up to 64 bits of `row` starting at column `start`, wrapping around the row end as often as needed.
std::uint64_t read_circular(const BitVector& row, std::uint64_t start, unsigned count) noexcept;

}  // namespace mpad
