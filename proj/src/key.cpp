#include <mpad/key.hpp>

#include <mpad/error.hpp>
#include <mpad/random.hpp>

#include <bit>
#include <cmath>
#include <string>

namespace mpad {

DevicePair DevicePair::of(DeviceId a, DeviceId b) {
    if(a == b) {
        throw InvalidParams("a device pair needs two distinct devices, got " + std::to_string(a) + " twice");
    }
    return a < b ? DevicePair{a, b} : DevicePair{b, a};
}

PairwiseKey::PairwiseKey(DevicePair pair, SlotId slot, std::uint64_t n, std::vector<std::uint64_t> values) :
        m_pair(pair), m_slot(slot), m_n(n), m_values(std::move(values)) {
    if(m_pair.low >= m_pair.high) {
        throw InvalidParams("key pair must be ordered low < high");
    }
    if(m_n == 0) {
        throw InvalidParams("key group order must be positive");
    }
    if(m_values.empty()) {
        throw InvalidParams("key needs at least one component");
    }
    for(const auto v : m_values) {
        if(v >= m_n) {
            throw InvalidParams("key component " + std::to_string(v) + " outside Z_" + std::to_string(m_n));
        }
    }
}

double PairwiseKey::information_bits() const {
    return static_cast<double>(k()) * std::log2(static_cast<double>(m_n));
}

std::uint64_t PairwiseKey::packed_bits() const noexcept {
    return k() * bits_per_component(m_n);
}

unsigned bits_per_component(std::uint64_t n) noexcept {
    return n <= 1 ? 0u : static_cast<unsigned>(std::bit_width(n - 1));
}

PairwiseKey generate_pairwise_key(const MatrixSpec& spec, DevicePair pair, SlotId slot, RandomSource& rng) {
    spec.check();
    std::vector<std::uint64_t> values(spec.k);
    for(auto& v : values) {
        v = rng.uniform_below(spec.n);
    }
    return PairwiseKey(pair, slot, spec.n, std::move(values));
}

SubKey subkey(const PairwiseKey& key, std::uint64_t m, std::uint64_t eta, std::uint64_t i) {
    if(i < 1 || i > m) {
        throw IndexOutOfRange("bit index " + std::to_string(i) + " outside [1, " + std::to_string(m) + "]");
    }
    if(eta < 1) {
        throw IndexOutOfRange("window index must be >= 1");
    }
    const std::uint64_t n = key.n();
    const std::uint64_t shift = add_mod(window_offset(n, m, eta), (i - 1) % n, n);
    SubKey out;
    out.values.reserve(key.k());
    for(const auto z : key.values()) {
        out.values.push_back(add_mod(z, shift, n));
    }
    return out;
}

}  // namespace mpad
