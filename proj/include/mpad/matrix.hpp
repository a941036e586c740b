#pragma once

#include <mpad/bits.hpp>
#include <mpad/params.hpp>

#include <cstdint>
#include <span>
#include <vector>

namespace mpad {

class RandomSource;

/// The shared k x n binary matrix every device in a fleet holds. Immutable once built.
class RandomMatrix {
public:
    /// Rebuilds a matrix from the row-major, LSB-first packing of all k*n bits.
    static RandomMatrix from_packed(const MatrixSpec& spec, std::span<const std::uint8_t> packed);
    /// Takes ownership of k rows of n bits each.
    static RandomMatrix from_rows(const MatrixSpec& spec, std::vector<BitVector> rows);

    const MatrixSpec& spec() const noexcept { return m_spec; }
    std::uint64_t k() const noexcept { return m_spec.k; }
    std::uint64_t n() const noexcept { return m_spec.n; }

    bool bit(std::uint64_t row, std::uint64_t col) const { return m_rows.at(row).test(col); }
    const BitVector& row(std::uint64_t r) const { return m_rows.at(r); }

    std::uint64_t popcount() const noexcept;

    /// ceil(k*n / 8) bytes; bit r*n + c is row r, column c.
    std::vector<std::uint8_t> packed() const;

    friend bool operator==(const RandomMatrix&, const RandomMatrix&) = default;

private:
    RandomMatrix(const MatrixSpec& spec, std::vector<BitVector> rows);

    MatrixSpec m_spec;
    std::vector<BitVector> m_rows;
};

/// Draws k*n independent bits, each 1 with probability spec.bias.
RandomMatrix generate_matrix(const MatrixSpec& spec, RandomSource& rng);

}  // namespace mpad
