#include <mpad/cipher.hpp>

#include <mpad/error.hpp>
#include <mpad/keystream.hpp>
#include <mpad/matrix.hpp>
#include <mpad/wire.hpp>

#include <string>

namespace mpad {

bool Ciphertext::checksum_ok() const {
    return frame_checksum(*this) == checksum;
}

Ciphertext seal_unchecked(const RandomMatrix& matrix, const PairwiseKey& key, const Message& message,
                          std::uint64_t eta) {
    Ciphertext out;
    out.pair = key.pair();
    out.slot = key.slot();
    out.eta = eta;
    out.payload = keystream_bits(matrix, key, message.size(), eta);
    out.payload ^= message;
    out.checksum = frame_checksum(out);
    return out;
}

Ciphertext encrypt(const RandomMatrix& matrix, const PairwiseKey& key, const Message& message, std::uint64_t eta,
                   std::uint64_t eta_max) {
    require_valid_params(matrix.n(), matrix.k(), message.size(), eta_max);
    if(eta < 1 || eta > eta_max) {
        throw InvalidParams("window " + std::to_string(eta) + " outside budget [1, " + std::to_string(eta_max) +
                            "]");
    }
    return seal_unchecked(matrix, key, message, eta);
}

Message decrypt(const RandomMatrix& matrix, const PairwiseKey& key, const Ciphertext& ciphertext) {
    if(ciphertext.pair != key.pair() || ciphertext.slot != key.slot()) {
        throw HeaderMismatch("frame for pair (" + std::to_string(ciphertext.pair.low) + "," +
                             std::to_string(ciphertext.pair.high) + ") slot " + std::to_string(ciphertext.slot) +
                             " offered key for pair (" + std::to_string(key.pair().low) + "," +
                             std::to_string(key.pair().high) + ") slot " + std::to_string(key.slot()));
    }
    if(!ciphertext.checksum_ok()) {
        throw ChecksumMismatch("frame checksum does not verify");
    }
    Message out = keystream_bits(matrix, key, ciphertext.m(), ciphertext.eta);
    out ^= ciphertext.payload;
    return out;
}

}  // namespace mpad
