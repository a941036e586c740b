#include <mpad/fleet.hpp>

#include <mpad/error.hpp>
#include <mpad/wire.hpp>

#include <algorithm>
#include <set>
#include <tuple>

namespace mpad {

std::vector<std::uint8_t> Transcript::dump() const {
    std::vector<std::uint8_t> out;
    for(const auto& e : m_entries) {
        out.insert(out.end(), e.frame.begin(), e.frame.end());
    }
    return out;
}

std::size_t duplicate_windows(const Transcript& transcript) {
    std::set<std::tuple<DevicePair, SlotId, std::uint64_t>> seen;
    std::size_t duplicates = 0;
    for(const auto& e : transcript.entries()) {
        const Ciphertext ct = parse_frame(e.frame);
        duplicates += !seen.emplace(ct.pair, ct.slot, ct.eta).second;
    }
    return duplicates;
}

struct Fleet::State {
    // Provisioned keys of pair p occupy indices [offset[p], offset[p + 1]).
    std::uint64_t original_devices = 0;
    std::vector<std::uint64_t> offset;
    unsigned width = 0;
    BitVector packed;
    std::vector<std::uint64_t> next_eta;

    // Keys minted after provisioning, one copy per holder, keyed by (peer, slot).
    std::vector<std::map<std::pair<DeviceId, SlotId>, PairwiseKey>> keyrings;
    std::map<std::pair<DevicePair, SlotId>, std::uint64_t> minted_next_eta;

    std::uint64_t pair_index(DevicePair pair) const {
        const std::uint64_t q = pair.low;
        const std::uint64_t l = pair.high;
        return q * original_devices - q * (q + 1) / 2 + (l - q - 1);
    }

    bool provisioned(DevicePair pair) const { return pair.high < original_devices; }

    std::uint64_t provisioned_slots(DevicePair pair) const {
        if(!provisioned(pair)) {
            return 0;
        }
        const std::uint64_t p = pair_index(pair);
        return offset[p + 1] - offset[p];
    }
};

Fleet::Fleet(SystemParams params, RandomSource rng, FleetOptions options, RandomMatrix matrix) :
        m_params(std::move(params)),
        m_rng(std::move(rng)),
        m_options(options),
        m_matrix(std::move(matrix)),
        m_devices(m_params.devices),
        m_state(std::make_unique<State>()) {}

Fleet::Fleet(Fleet&&) noexcept = default;
Fleet& Fleet::operator=(Fleet&&) noexcept = default;
Fleet::~Fleet() = default;

Fleet Fleet::provision(const SystemParams& params, RandomSource rng, FleetOptions options) {
    params.require_valid();
    if(options.distributor >= params.devices) {
        throw InvalidParams("distributor " + std::to_string(options.distributor) + " is not in the fleet");
    }
    if(params.devices > std::uint64_t{1} << 31) {
        throw InvalidParams("too many devices");
    }
    const MatrixSpec spec{params.k, params.n, 0.5};
    RandomMatrix matrix = generate_matrix(spec, rng);
    Fleet fleet(params, std::move(rng), options, std::move(matrix));
    State& st = *fleet.m_state;

    const std::uint64_t u = params.devices;
    st.original_devices = u;
    st.offset.reserve(u * (u - 1) / 2 + 1);
    st.offset.push_back(0);
    for(std::uint64_t q = 0; q < u; ++q) {
        for(std::uint64_t l = q + 1; l < u; ++l) {
            const std::uint64_t lambda = params.lambda_of(DevicePair{static_cast<DeviceId>(q), static_cast<DeviceId>(l)});
            if(lambda > 65536) {
                throw InvalidParams("at most 65536 keys per pair");
            }
            st.offset.push_back(st.offset.back() + lambda);
        }
    }
    const std::uint64_t keys = st.offset.back();
    st.width = static_cast<unsigned>(bits_per_component(params.n));
    st.packed = BitVector(static_cast<std::size_t>(keys * params.k * st.width));
    st.next_eta.assign(keys, 1);
    for(std::uint64_t i = 0; i < keys * params.k; ++i) {
        st.packed.xor_at(i * st.width, fleet.m_rng.uniform_below(params.n), st.width);
    }
    for(std::size_t r = 0; r < options.reserve; ++r) {
        std::vector<std::uint64_t> values(params.k);
        for(auto& v : values) {
            v = fleet.m_rng.uniform_below(params.n);
        }
        fleet.m_reserve.push_back(std::move(values));
    }
    std::reverse(fleet.m_reserve.begin(), fleet.m_reserve.end());
    st.keyrings.resize(u);
    return fleet;
}

void Fleet::require_device(DeviceId device) const {
    if(device >= m_devices) {
        throw UnknownDevice("device " + std::to_string(device) + " is not in a fleet of " + std::to_string(m_devices));
    }
}

std::vector<std::uint64_t> Fleet::provisioned_values(std::uint64_t index) const {
    const State& st = *m_state;
    std::vector<std::uint64_t> values(m_params.k);
    for(std::uint64_t j = 0; j < m_params.k; ++j) {
        values[j] = st.width ? st.packed.read((index * m_params.k + j) * st.width, st.width) : 0;
    }
    return values;
}

void Fleet::install(DeviceId device, DeviceId peer, SlotId slot, std::vector<std::uint64_t> values) {
    m_state->keyrings[device].insert_or_assign(std::pair{peer, slot},
                                               PairwiseKey(DevicePair::of(device, peer), slot, m_params.n, std::move(values)));
}

std::uint64_t Fleet::key_count() const {
    return m_state->offset.back() + m_state->minted_next_eta.size();
}

std::optional<PairwiseKey> Fleet::key_of(DeviceId device, DeviceId peer, SlotId slot) const {
    require_device(device);
    require_device(peer);
    const DevicePair pair = DevicePair::of(device, peer);
    const State& st = *m_state;
    if(slot < st.provisioned_slots(pair)) {
        return PairwiseKey(pair, slot, m_params.n, provisioned_values(st.offset[st.pair_index(pair)] + slot));
    }
    const auto& ring = st.keyrings[device];
    const auto it = ring.find({peer, slot});
    if(it == ring.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::vector<SlotId> Fleet::slots(DeviceId device, DeviceId peer) const {
    require_device(device);
    require_device(peer);
    const DevicePair pair = DevicePair::of(device, peer);
    const State& st = *m_state;
    std::vector<SlotId> out;
    for(std::uint64_t s = 0; s < st.provisioned_slots(pair); ++s) {
        out.push_back(static_cast<SlotId>(s));
    }
    const auto& ring = st.keyrings[device];
    for(auto it = ring.lower_bound({peer, 0}); it != ring.end() && it->first.first == peer; ++it) {
        out.push_back(it->first.second);
    }
    return out;
}

PairBudget Fleet::budget(DevicePair pair, SlotId slot) const {
    require_device(pair.high);
    const State& st = *m_state;
    PairBudget out{pair, slot, 1, m_params.eta_max};
    if(slot < st.provisioned_slots(pair)) {
        out.next_eta = st.next_eta[st.offset[st.pair_index(pair)] + slot];
        return out;
    }
    const auto it = st.minted_next_eta.find({pair, slot});
    if(it == st.minted_next_eta.end()) {
        throw UnknownPair("pair (" + std::to_string(pair.low) + "," + std::to_string(pair.high) + ") has no slot " +
                          std::to_string(slot));
    }
    out.next_eta = it->second;
    return out;
}

DeliveryRecord Fleet::send_message(DeviceId sender, DeviceId receiver, const Message& payload) {
    require_device(sender);
    require_device(receiver);
    const DevicePair pair = DevicePair::of(sender, receiver);
    if(payload.size() != m_params.m) {
        throw DimensionMismatch("payload has " + std::to_string(payload.size()) + " bits, the fleet sends " +
                                std::to_string(m_params.m));
    }
    State& st = *m_state;
    const auto held = slots(sender, receiver);
    if(held.empty()) {
        throw UnknownPair("devices " + std::to_string(sender) + " and " + std::to_string(receiver) +
                          " share no key");
    }

    std::uint64_t* counter = nullptr;
    SlotId slot = 0;
    for(const SlotId s : held) {
        std::uint64_t* c = s < st.provisioned_slots(pair) ? &st.next_eta[st.offset[st.pair_index(pair)] + s]
                                                          : &st.minted_next_eta.at({pair, s});
        if(*c <= m_params.eta_max) {
            counter = c;
            slot = s;
            break;
        }
    }
    if(!counter) {
        throw BudgetExhausted("pair (" + std::to_string(pair.low) + "," + std::to_string(pair.high) +
                              ") has used every window of its " + std::to_string(held.size()) + " keys");
    }

    const std::uint64_t eta = *counter;
    const Ciphertext ct = encrypt(m_matrix, *key_of(sender, receiver, slot), payload, eta, m_params.eta_max);
    ++*counter;
    TranscriptEntry entry{sender, receiver, serialize(ct), ++m_clock};
    m_transcript.append(entry);

    // Receiver side: everything it needs comes from the frame header and its own keyring.
    const Ciphertext received = parse_frame(entry.frame);
    const auto key = key_of(receiver, received.pair.peer_of(receiver), received.slot);
    if(!key) {
        throw UnknownPair("receiver holds no key for slot " + std::to_string(received.slot));
    }
    return DeliveryRecord{sender, receiver, received.slot, received.eta, entry.timestamp,
                          decrypt(m_matrix, *key, received)};
}

SlotId Fleet::request_dynamic_key(DeviceId q, DeviceId l) {
    require_device(q);
    require_device(l);
    const DevicePair pair = DevicePair::of(q, l);
    const DeviceId dist = m_options.distributor;

    std::uint64_t next_slot = 0;
    for(const auto side : {q, l}) {
        for(const SlotId s : slots(side, pair.peer_of(side))) {
            next_slot = std::max<std::uint64_t>(next_slot, std::uint64_t{s} + 1);
        }
    }
    if(next_slot > 65535) {
        throw InvalidParams("pair has no free key slot");
    }
    const auto slot = static_cast<SlotId>(next_slot);
    const MatrixSpec spec{m_params.k, m_params.n, 0.5};
    const PairwiseKey minted = generate_pairwise_key(spec, pair, slot, m_rng);

    std::vector<std::uint8_t> bytes;
    bytes.reserve(8 * m_params.k);
    for(const auto v : minted.values()) {
        for(int b = 0; b < 8; ++b) {
            bytes.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
        }
    }
    const BitVector material = BitVector::from_bytes(bytes, bytes.size() * 8);
    const std::uint64_t m = m_params.m;
    const std::uint64_t chunks = (material.size() + m - 1) / m;

    // Each recipient reassembles the key from what it decrypted.
    std::vector<std::pair<DeviceId, std::vector<std::uint64_t>>> received;
    for(const auto target : {q, l}) {
        if(target == dist) {
            continue;
        }
        BitVector assembled(chunks * m);
        for(std::uint64_t c = 0; c < chunks; ++c) {
            Message chunk(m);
            for(std::uint64_t i = 0; i < m && c * m + i < material.size(); ++i) {
                chunk.set(i, material.test(c * m + i));
            }
            const DeliveryRecord rec = send_message(dist, target, chunk);
            for(std::uint64_t i = 0; i < m; ++i) {
                if(rec.plaintext.test(i)) {
                    assembled.set(c * m + i);
                }
            }
        }
        const auto raw = assembled.to_bytes();
        std::vector<std::uint64_t> values(m_params.k);
        for(std::uint64_t j = 0; j < m_params.k; ++j) {
            for(int b = 0; b < 8; ++b) {
                values[j] |= std::uint64_t{raw[8 * j + b]} << (8 * b);
            }
        }
        received.emplace_back(target, std::move(values));
    }

    for(auto& [device, values] : received) {
        install(device, pair.peer_of(device), slot, std::move(values));
    }
    if(pair.contains(dist)) {
        install(dist, pair.peer_of(dist), slot, minted.values());
    }
    m_state->minted_next_eta[{pair, slot}] = 1;
    return slot;
}

DeviceId Fleet::admit_device() {
    if(m_reserve.empty()) {
        throw ReserveExhausted("the distributor has no reserved keys left");
    }
    const auto id = static_cast<DeviceId>(m_devices);
    ++m_devices;
    m_state->keyrings.emplace_back();
    std::vector<std::uint64_t> values = std::move(m_reserve.back());
    m_reserve.pop_back();
    const DeviceId dist = m_options.distributor;
    install(id, dist, 0, values);
    install(dist, id, 0, std::move(values));
    m_state->minted_next_eta[{DevicePair::of(dist, id), 0}] = 1;
    return id;
}

SystemParams Fleet::analytics_params() const {
    SystemParams out = m_params;
    out.devices = m_devices;
    std::map<DevicePair, std::uint64_t> minted;
    for(const auto& [key, eta] : m_state->minted_next_eta) {
        ++minted[key.first];
    }
    for(const auto& [pair, count] : minted) {
        out.lambda_overrides[pair] = (m_state->provisioned(pair) ? m_params.lambda_of(pair) : 0) + count;
    }
    return out;
}

}  // namespace mpad
