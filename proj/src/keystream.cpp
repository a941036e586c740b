#include <mpad/keystream.hpp>

#include <mpad/error.hpp>
#include <mpad/matrix.hpp>

#include <algorithm>
#include <string>

namespace mpad {

namespace {

// XORs row[start], row[start + 1], ... (indices mod n) into out[0 .. out.size()).
void xor_circular(const BitVector& row, std::uint64_t start, BitVector& out) {
    const std::uint64_t n = row.size();
    const std::uint64_t m = out.size();
    std::uint64_t written = 0;
    std::uint64_t col = start;
    while(written < m) {
        const std::uint64_t seg = std::min(m - written, n - col);
        for(std::uint64_t off = 0; off < seg; off += 64) {
            const auto chunk = static_cast<unsigned>(std::min<std::uint64_t>(64, seg - off));
            out.xor_at(written + off, row.read(col + off, chunk), chunk);
        }
        written += seg;
        col = 0;
    }
}

}  // namespace

BitVector keystream_bits(const RandomMatrix& matrix, const PairwiseKey& key, std::uint64_t m, std::uint64_t eta) {
    if(key.n() != matrix.n() || key.k() != matrix.k()) {
        throw DimensionMismatch("key over Z_" + std::to_string(key.n()) + "^" + std::to_string(key.k()) +
                                " does not fit a " + std::to_string(matrix.k()) + "x" +
                                std::to_string(matrix.n()) + " matrix");
    }
    if(eta < 1) {
        throw IndexOutOfRange("window index must be >= 1");
    }
    const std::uint64_t n = matrix.n();
    const std::uint64_t offset = window_offset(n, m, eta);
    BitVector out(m);
    for(std::uint64_t r = 0; r < matrix.k(); ++r) {
        xor_circular(matrix.row(r), add_mod(key[r], offset, n), out);
    }
    return out;
}

std::uint64_t read_circular(const BitVector& row, std::uint64_t start, unsigned count) noexcept {
    const std::uint64_t n = row.size();
    std::uint64_t out = 0;
    unsigned got = 0;
    std::uint64_t col = start;
    while(got < count) {
        const auto take = static_cast<unsigned>(std::min<std::uint64_t>(count - got, n - col));
        out |= row.read(col, take) << got;
        got += take;
        col = 0;
    }
    return out;
}

Keystream derive_keystream(const RandomMatrix& matrix, const PairwiseKey& key, std::uint64_t m, std::uint64_t eta) {
    return Keystream{key.pair(), key.slot(), eta, keystream_bits(matrix, key, m, eta)};
}

}  // namespace mpad
