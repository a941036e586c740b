#pragma once

#include <mpad/bits.hpp>
#include <mpad/key.hpp>

#include <cstdint>

namespace mpad {

class RandomMatrix;

using Message = BitVector;

/// Encrypted message plus the header a receiver needs to pick the key and window.
///
/// Header fields travel in the clear. `checksum` is the CRC-32 of the serialized frame
/// (header and payload); it detects corruption and gives no authenticity.
struct Ciphertext {
    DevicePair pair;
    SlotId slot = 0;
    std::uint64_t eta = 1;
    BitVector payload;
    std::uint32_t checksum = 0;

    std::uint64_t m() const noexcept { return payload.size(); }
    bool checksum_ok() const;

    friend bool operator==(const Ciphertext&, const Ciphertext&) = default;
};

/// message XOR keystream(key, m, eta), after checking (n, k, m, eta_max) and eta <= eta_max.
Ciphertext encrypt(const RandomMatrix& matrix, const PairwiseKey& key, const Message& message, std::uint64_t eta,
                   std::uint64_t eta_max);

/// Single-budget form: eta_max = eta.
inline Ciphertext encrypt(const RandomMatrix& matrix, const PairwiseKey& key, const Message& message,
                          std::uint64_t eta) {
    return encrypt(matrix, key, message, eta, eta);
}

/// The same XOR with no parameter-regime check. For attack-lab experiments on weak parameters.
Ciphertext seal_unchecked(const RandomMatrix& matrix, const PairwiseKey& key, const Message& message,
                          std::uint64_t eta);

/// Throws HeaderMismatch when the header's (pair, slot) differ from the key and
/// ChecksumMismatch when the frame CRC does not verify.
Message decrypt(const RandomMatrix& matrix, const PairwiseKey& key, const Ciphertext& ciphertext);

}  // namespace mpad
