#include <mpad/matrix.hpp>

#include <mpad/error.hpp>
#include <mpad/random.hpp>

#include <string>

namespace mpad {

RandomMatrix::RandomMatrix(const MatrixSpec& spec, std::vector<BitVector> rows) :
        m_spec(spec), m_rows(std::move(rows)) {}

RandomMatrix RandomMatrix::from_rows(const MatrixSpec& spec, std::vector<BitVector> rows) {
    spec.check();
    if(rows.size() != spec.k) {
        throw DimensionMismatch("expected " + std::to_string(spec.k) + " matrix rows, got " +
                                std::to_string(rows.size()));
    }
    for(const auto& r : rows) {
        if(r.size() != spec.n) {
            throw DimensionMismatch("matrix row has " + std::to_string(r.size()) + " bits, expected " +
                                    std::to_string(spec.n));
        }
    }
    return RandomMatrix(spec, std::move(rows));
}

RandomMatrix RandomMatrix::from_packed(const MatrixSpec& spec, std::span<const std::uint8_t> packed) {
    spec.check();
    const auto total = static_cast<unsigned __int128>(spec.k) * spec.n;
    if(packed.size() * static_cast<unsigned __int128>(8) < total) {
        throw FormatError("packed matrix truncated");
    }
    const BitVector all = BitVector::from_bytes(packed, static_cast<std::size_t>(total));
    std::vector<BitVector> rows;
    rows.reserve(spec.k);
    for(std::uint64_t r = 0; r < spec.k; ++r) {
        BitVector row(spec.n);
        const std::size_t base = r * spec.n;
        for(std::size_t pos = 0; pos < spec.n; pos += 64) {
            const unsigned chunk = spec.n - pos >= 64 ? 64u : static_cast<unsigned>(spec.n - pos);
            row.xor_at(pos, all.read(base + pos, chunk), chunk);
        }
        rows.push_back(std::move(row));
    }
    return RandomMatrix(spec, std::move(rows));
}

std::uint64_t RandomMatrix::popcount() const noexcept {
    std::uint64_t total = 0;
    for(const auto& r : m_rows) {
        total += r.count();
    }
    return total;
}

std::vector<std::uint8_t> RandomMatrix::packed() const {
    BitVector all(static_cast<std::size_t>(m_spec.k * m_spec.n));
    for(std::uint64_t r = 0; r < m_spec.k; ++r) {
        const std::size_t base = r * m_spec.n;
        for(std::size_t pos = 0; pos < m_spec.n; pos += 64) {
            const unsigned chunk = m_spec.n - pos >= 64 ? 64u : static_cast<unsigned>(m_spec.n - pos);
            all.xor_at(base + pos, m_rows[r].read(pos, chunk), chunk);
        }
    }
    return all.to_bytes();
}

RandomMatrix generate_matrix(const MatrixSpec& spec, RandomSource& rng) {
    spec.check();
    std::vector<BitVector> rows;
    rows.reserve(spec.k);
    for(std::uint64_t r = 0; r < spec.k; ++r) {
        BitVector row(spec.n);
        rng.fill(row, spec.bias);
        rows.push_back(std::move(row));
    }
    return RandomMatrix::from_rows(spec, std::move(rows));
}

}  // namespace mpad
