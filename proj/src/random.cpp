#include <mpad/random.hpp>

#include <mpad/bits.hpp>
#include <mpad/error.hpp>

#include <exception>

namespace mpad {

RandomSource::RandomSource(Kind kind, std::uint64_t seed) : m_kind(kind), m_seed(seed), m_engine(seed) {
    if(kind == Kind::os_entropy) {
        try {
            m_device = std::make_unique<std::random_device>();
        } catch(const std::exception& e) {
            throw EntropyFailure(std::string("cannot open OS entropy source: ") + e.what());
        }
    }
}

RandomSource RandomSource::os_entropy() {
    return RandomSource(Kind::os_entropy, 0);
}

RandomSource RandomSource::seeded(std::uint64_t seed) {
    return RandomSource(Kind::seeded, seed);
}

RandomSource::RandomSource(RandomSource&&) noexcept = default;
RandomSource& RandomSource::operator=(RandomSource&&) noexcept = default;
RandomSource::~RandomSource() = default;

std::optional<std::uint64_t> RandomSource::seed() const noexcept {
    if(m_kind == Kind::seeded) {
        return m_seed;
    }
    return std::nullopt;
}

std::uint64_t RandomSource::next_u64() {
    if(m_kind == Kind::seeded) {
        return m_engine();
    }
    try {
        const std::uint64_t hi = (*m_device)();
        const std::uint64_t lo = (*m_device)();
        return (hi << 32) | (lo & 0xffffffffu);
    } catch(const std::exception& e) {
        throw EntropyFailure(std::string("OS entropy read failed: ") + e.what());
    }
}

std::uint64_t RandomSource::uniform_below(std::uint64_t bound) {
    if(bound == 0) {
        throw InvalidParams("uniform_below requires a nonzero bound");
    }
    // Lemire's multiply-shift with rejection; exact uniformity.
    unsigned __int128 product = static_cast<unsigned __int128>(next_u64()) * bound;
    auto low = static_cast<std::uint64_t>(product);
    if(low < bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        while(low < threshold) {
            product = static_cast<unsigned __int128>(next_u64()) * bound;
            low = static_cast<std::uint64_t>(product);
        }
    }
    return static_cast<std::uint64_t>(product >> 64);
}

bool RandomSource::bernoulli(double p) {
    if(p <= 0.0) {
        return false;
    }
    if(p >= 1.0) {
        return true;
    }
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53 < p;
}

void RandomSource::fill(BitVector& bits, double p) {
    const std::size_t size = bits.size();
    if(p == 0.5) {
        for(std::size_t pos = 0; pos < size; pos += 64) {
            const unsigned chunk = size - pos >= 64 ? 64u : static_cast<unsigned>(size - pos);
            bits.xor_at(pos, next_u64() ^ bits.read(pos, chunk), chunk);
        }
        return;
    }
    for(std::size_t i = 0; i < size; ++i) {
        bits.set(i, bernoulli(p));
    }
}

}  // namespace mpad
