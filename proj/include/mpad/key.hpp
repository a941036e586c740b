#pragma once

#include <mpad/params.hpp>

#include <compare>
#include <cstdint>
#include <vector>

namespace mpad {

class RandomSource;

using DeviceId = std::uint32_t;
using SlotId = std::uint16_t;

/// Unordered pair of distinct devices, stored as (low, high).
struct DevicePair {
    DeviceId low = 0;
    DeviceId high = 1;

    /// Normalizes the order. Throws InvalidParams when a == b.
    static DevicePair of(DeviceId a, DeviceId b);

    bool contains(DeviceId id) const noexcept { return id == low || id == high; }
    DeviceId peer_of(DeviceId id) const noexcept { return id == low ? high : low; }

    friend auto operator<=>(const DevicePair&, const DevicePair&) = default;
};

/// k offsets into Z_n, one starting column per matrix row.
class PairwiseKey {
public:
    /// Throws InvalidParams on an empty tuple, n == 0, or any component >= n.
    PairwiseKey(DevicePair pair, SlotId slot, std::uint64_t n, std::vector<std::uint64_t> values);

    DevicePair pair() const noexcept { return m_pair; }
    SlotId slot() const noexcept { return m_slot; }
    std::uint64_t n() const noexcept { return m_n; }
    std::uint64_t k() const noexcept { return m_values.size(); }
    const std::vector<std::uint64_t>& values() const noexcept { return m_values; }
    std::uint64_t operator[](std::size_t j) const { return m_values.at(j); }

    /// k * log2(n): the entropy of a uniform key.
    double information_bits() const;
    /// k * ceil(log2 n): the tightest whole-bit packing.
    std::uint64_t packed_bits() const noexcept;

    /// Same key material under another (pair, slot) label.
    PairwiseKey relabeled(DevicePair pair, SlotId slot) const { return {pair, slot, m_n, m_values}; }

    friend bool operator==(const PairwiseKey&, const PairwiseKey&) = default;

private:
    DevicePair m_pair;
    SlotId m_slot;
    std::uint64_t m_n;
    std::vector<std::uint64_t> m_values;
};

/// The k column positions that produce one keystream bit.
struct SubKey {
    std::vector<std::uint64_t> values;

    friend bool operator==(const SubKey&, const SubKey&) = default;
};

/// ceil(log2 n), with 0 for n == 1.
unsigned bits_per_component(std::uint64_t n) noexcept;

/// k independent components uniform on [0, n - 1].
PairwiseKey generate_pairwise_key(const MatrixSpec& spec, DevicePair pair, SlotId slot, RandomSource& rng);

/// Component j of the result is (key_j + m*(eta - 1) + i - 1) mod n, with i 1-based in [1, m].
SubKey subkey(const PairwiseKey& key, std::uint64_t m, std::uint64_t eta, std::uint64_t i);

}  // namespace mpad
