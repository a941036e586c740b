#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>

namespace mpad {

class BitVector;

/// Source of randomness for matrices, keys and experiments.
///
/// Seeded mode runs std::mt19937_64, whose output sequence is fixed by the C++ standard, and
/// every derived draw below uses integer arithmetic only, so a seed reproduces bit-identical
/// artifacts on any conforming platform. OS mode reads std::random_device.
///
/// Not thread-safe. Give each worker its own source (see for_worker()).
class RandomSource {
public:
    enum class Kind { os_entropy, seeded };

    static RandomSource os_entropy();
    static RandomSource seeded(std::uint64_t seed);

    RandomSource(RandomSource&&) noexcept;
    RandomSource& operator=(RandomSource&&) noexcept;
    ~RandomSource();

    Kind kind() const noexcept { return m_kind; }
    std::optional<std::uint64_t> seed() const noexcept;

    std::uint64_t next_u64();
    /// Uniform on [0, bound). bound must be nonzero.
    std::uint64_t uniform_below(std::uint64_t bound);
    /// 1 with probability p, using a 53-bit uniform comparison.
    bool bernoulli(double p);
    /// Fills every bit independently with P(1) = p.
    void fill(BitVector& bits, double p);

    /// Worker-private source for parallel trials: seeded(master ^ index).
    static RandomSource for_worker(std::uint64_t master, std::uint64_t index) {
        return seeded(master ^ index);
    }

private:
    RandomSource(Kind kind, std::uint64_t seed);

    Kind m_kind;
    std::uint64_t m_seed;
    std::mt19937_64 m_engine;
    std::unique_ptr<std::random_device> m_device;
};

}  // namespace mpad
