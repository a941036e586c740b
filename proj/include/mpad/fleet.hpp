#pragma once

#include <mpad/analytics.hpp>
#include <mpad/bits.hpp>
#include <mpad/cipher.hpp>
#include <mpad/key.hpp>
#include <mpad/matrix.hpp>
#include <mpad/random.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mpad {

struct TranscriptEntry {
    DeviceId sender = 0;
    DeviceId receiver = 0;
    std::vector<std::uint8_t> frame;
    std::uint64_t timestamp = 0;
};

/// Everything a passive eavesdropper sees: frames in send order, never modified.
class Transcript {
public:
    const std::vector<TranscriptEntry>& entries() const noexcept { return m_entries; }
    std::size_t size() const noexcept { return m_entries.size(); }
    bool empty() const noexcept { return m_entries.empty(); }

    /// All frames concatenated exactly as sent; parse_frames() splits it back.
    std::vector<std::uint8_t> dump() const;

private:
    friend class Fleet;
    void append(TranscriptEntry entry) { m_entries.push_back(std::move(entry)); }

    std::vector<TranscriptEntry> m_entries;
};

/// Number of frames whose (pair, slot, eta) already appeared earlier in the transcript.
std::size_t duplicate_windows(const Transcript& transcript);

struct DeliveryRecord {
    DeviceId sender = 0;
    DeviceId receiver = 0;
    SlotId slot = 0;
    std::uint64_t eta = 0;
    std::uint64_t timestamp = 0;
    /// What the receiver recovered from the frame.
    Message plaintext;
};

/// Window budget of one key: next_eta runs from 1 to eta_max + 1.
struct PairBudget {
    DevicePair pair;
    SlotId slot = 0;
    std::uint64_t next_eta = 1;
    std::uint64_t eta_max = 1;

    bool exhausted() const noexcept { return next_eta > eta_max; }
};

struct FleetOptions {
    DeviceId distributor = 0;
    /// Keys held back at provisioning for devices admitted later.
    std::size_t reserve = 4;
};

/// A provisioned fleet: one shared matrix, lambda keys per pair, per-key window budgets,
/// a key distributor and the eavesdropper's transcript. Single-owner state machine.
///
/// Provisioned keys live once in a packed store indexed by pair; each device's view of them is
/// implied by membership in the pair. Keys minted later are installed separately in the keyring
/// of each receiving device.
class Fleet {
public:
    /// Throws InvalidParams for invalid parameters or a distributor outside the fleet.
    static Fleet provision(const SystemParams& params, RandomSource rng, FleetOptions options = {});

    Fleet(Fleet&&) noexcept;
    Fleet& operator=(Fleet&&) noexcept;
    ~Fleet();

    const SystemParams& params() const noexcept { return m_params; }
    const RandomMatrix& matrix() const noexcept { return m_matrix; }
    std::uint64_t device_count() const noexcept { return m_devices; }
    DeviceId distributor() const noexcept { return m_options.distributor; }
    std::size_t reserve_left() const noexcept { return m_reserve.size(); }

    /// Keys currently held by the fleet, counting each shared key once.
    std::uint64_t key_count() const;

    /// The key `device` holds for (device, peer, slot), if any.
    std::optional<PairwiseKey> key_of(DeviceId device, DeviceId peer, SlotId slot) const;
    /// Slots `device` holds towards `peer`, ascending.
    std::vector<SlotId> slots(DeviceId device, DeviceId peer) const;
    /// Throws UnknownPair when the pair shares no such slot.
    PairBudget budget(DevicePair pair, SlotId slot) const;

    /// Encrypts under the lowest slot with budget left, appends the frame and has `receiver`
    /// decrypt it. Throws BudgetExhausted, UnknownPair, UnknownDevice, or DimensionMismatch when
    /// the payload is not m bits.
    DeliveryRecord send_message(DeviceId sender, DeviceId receiver, const Message& payload);

    const Transcript& eavesdrop() const noexcept { return m_transcript; }

    /// The distributor mints a key for (q, l) and sends it to each of them that is not the
    /// distributor, split into ceil(64k / m) zero-padded chunks. Both install it under the
    /// pair's next free slot, which is returned. If a grant fails, frames already sent stay in
    /// the transcript and nobody installs the key.
    SlotId request_dynamic_key(DeviceId q, DeviceId l);

    /// New device with id device_count(). It gets the matrix and the next reserved key as slot 0
    /// towards the distributor. Throws ReserveExhausted.
    DeviceId admit_device();

    /// Parameters for analytics, with every key minted after provisioning counted in the
    /// per-pair key counts.
    SystemParams analytics_params() const;

private:
    struct State;

    Fleet(SystemParams params, RandomSource rng, FleetOptions options, RandomMatrix matrix);

    void require_device(DeviceId device) const;
    std::vector<std::uint64_t> provisioned_values(std::uint64_t index) const;
    void install(DeviceId device, DeviceId peer, SlotId slot, std::vector<std::uint64_t> values);

    SystemParams m_params;
    RandomSource m_rng;
    FleetOptions m_options;
    RandomMatrix m_matrix;
    std::uint64_t m_devices;
    std::uint64_t m_clock = 0;
    Transcript m_transcript;
    std::vector<std::vector<std::uint64_t>> m_reserve;
    std::unique_ptr<State> m_state;
};

/// Outcome of a scenario run.
struct ScenarioReport {
    std::vector<DeliveryRecord> deliveries;
    /// Payload each delivery was sent with, index-aligned with deliveries.
    std::vector<Message> sent;
    std::size_t commands = 0;
    std::size_t expected_errors = 0;
    std::vector<std::filesystem::path> dumps;
    std::optional<Fleet> fleet;
};

/// Runs a line-oriented scenario:
///
///   provision U=<int> n=<int> k=<int> m=<int> eta_max=<int> lambda=<int> seed=<int>
///             [distributor=<int>] [reserve=<int>]
///   send <q> <l> <hex-payload>
///   dynkey <q> <l>
///   admit
///   eavesdrop-dump <path>
///
/// Blank lines and lines starting with '#' are skipped. Prefixing a command with
/// `expect <error-kind>` asserts that it fails with that kind (see error_kind()). Relative dump
/// paths resolve against `base`. Throws FormatError on malformed lines (with the line number)
/// and ScenarioFailure when an expectation is not met.
ScenarioReport run_scenario(std::string_view text, const std::filesystem::path& base = {});

}  // namespace mpad
