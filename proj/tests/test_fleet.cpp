#include <mpad/error.hpp>
#include <mpad/fleet.hpp>
#include <mpad/wire.hpp>

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <set>

using namespace mpad;

namespace {

SystemParams fleet_params(std::uint64_t u, std::uint64_t n, std::uint64_t k, std::uint64_t m, std::uint64_t eta,
                    std::uint64_t lambda) {
    SystemParams p;
    p.devices = u;
    p.n = n;
    p.k = k;
    p.m = m;
    p.eta_max = eta;
    p.lambda = lambda;
    return p;
}

Message payload(RandomSource& rng, std::uint64_t m) {
    Message out(m);
    rng.fill(out, 0.5);
    return out;
}

// Count of 16-byte windows of `needle` that occur anywhere in `hay`.
std::size_t shared_windows(const std::vector<std::uint8_t>& hay, const std::vector<std::uint8_t>& needle) {
    std::size_t hits = 0;
    for(std::size_t i = 0; i + 16 <= needle.size(); ++i) {
        const auto first = needle.begin() + static_cast<std::ptrdiff_t>(i);
        hits += std::search(hay.begin(), hay.end(), first, first + 16) != hay.end();
    }
    return hits;
}

}  // namespace

TEST_SUITE("fleet") {
    TEST_CASE("provisioning counts") {
        CHECK(Fleet::provision(fleet_params(2, 1024, 4, 16, 2, 1), RandomSource::seeded(1)).key_count() == 1);
        const Fleet f = Fleet::provision(fleet_params(4, 1024, 4, 16, 2, 2), RandomSource::seeded(1));
        CHECK(f.key_count() == 12);
        CHECK(f.slots(1, 3) == std::vector<SlotId>{0, 1});
        CHECK(f.key_of(1, 3, 1) == f.key_of(3, 1, 1));
        CHECK_FALSE(f.key_of(1, 3, 2).has_value());
        CHECK(f.eavesdrop().empty());
    }

    TEST_CASE("invalid provisioning is refused") {
        CHECK_THROWS_AS(Fleet::provision(fleet_params(4, 8, 2, 2, 1, 1), RandomSource::seeded(1)), InvalidParams);
        CHECK_THROWS_AS(Fleet::provision(fleet_params(1, 1024, 4, 16, 1, 1), RandomSource::seeded(1)), InvalidParams);
        FleetOptions options;
        options.distributor = 9;
        CHECK_THROWS_AS(Fleet::provision(fleet_params(4, 1024, 4, 16, 1, 1), RandomSource::seeded(1), options),
                        InvalidParams);
    }

    TEST_CASE("example one at n=2^20") {
        const SystemParams p = fleet_params(256, std::uint64_t{1} << 20, 46, 1024, 1 << 7, 128);
        const Fleet f = Fleet::provision(p, RandomSource::seeded(2));
        CHECK(f.key_count() == 32640u * 128u);
        const auto key = f.key_of(200, 17, 127);
        REQUIRE(key.has_value());
        CHECK(key->k() == 46);
        CHECK(key->pair() == DevicePair{17, 200});
    }

    TEST_CASE("budget and slot rollover") {
        RandomSource rng = RandomSource::seeded(3);
        {
            Fleet f = Fleet::provision(fleet_params(3, 1024, 4, 16, 2, 1), RandomSource::seeded(4));
            const DeliveryRecord first = f.send_message(0, 2, payload(rng, 16));
            CHECK(first.eta == 1);
            CHECK(first.slot == 0);
            CHECK(f.send_message(2, 0, payload(rng, 16)).eta == 2);
            CHECK(f.budget(DevicePair{0, 2}, 0).exhausted());
            CHECK_THROWS_AS(f.send_message(0, 2, payload(rng, 16)), BudgetExhausted);
            CHECK(f.eavesdrop().size() == 2);
        }
        {
            Fleet f = Fleet::provision(fleet_params(3, 1024, 4, 16, 1, 2), RandomSource::seeded(4));
            f.send_message(1, 2, payload(rng, 16));
            const DeliveryRecord second = f.send_message(1, 2, payload(rng, 16));
            CHECK(second.slot == 1);
            CHECK(second.eta == 1);
            CHECK(f.budget(DevicePair{1, 2}, 0).next_eta == 2);
            CHECK(f.budget(DevicePair{1, 2}, 1).exhausted());
        }
    }

    TEST_CASE("send errors") {
        RandomSource rng = RandomSource::seeded(5);
        Fleet f = Fleet::provision(fleet_params(3, 1024, 4, 16, 2, 1), RandomSource::seeded(6));
        CHECK_THROWS_AS(f.send_message(0, 3, payload(rng, 16)), UnknownDevice);
        CHECK_THROWS_AS(f.send_message(1, 1, payload(rng, 16)), InvalidParams);
        CHECK_THROWS_AS(f.send_message(0, 1, payload(rng, 15)), DimensionMismatch);
        CHECK_THROWS_AS(f.budget(DevicePair{0, 1}, 4), UnknownPair);
        CHECK(f.eavesdrop().empty());
    }

    TEST_CASE("transcript holds exactly what encrypt produced") {
        RandomSource rng = RandomSource::seeded(7);
        const SystemParams p = fleet_params(4, 4096, 5, 40, 4, 1);
        Fleet f = Fleet::provision(p, RandomSource::seeded(8));
        std::vector<Message> sent;
        const std::vector<std::pair<DeviceId, DeviceId>> route = {{0, 1}, {3, 2}, {1, 0}};
        for(const auto& [a, b] : route) {
            sent.push_back(payload(rng, 40));
            const DeliveryRecord d = f.send_message(a, b, sent.back());
            CHECK(d.plaintext == sent.back());
        }
        REQUIRE(f.eavesdrop().size() == 3);
        for(std::size_t i = 0; i < 3; ++i) {
            const TranscriptEntry& e = f.eavesdrop().entries()[i];
            CHECK(e.sender == route[i].first);
            CHECK(e.receiver == route[i].second);
            const Ciphertext ct = parse_frame(e.frame);
            const auto key = f.key_of(e.sender, e.receiver, ct.slot);
            REQUIRE(key.has_value());
            CHECK(serialize(encrypt(f.matrix(), *key, sent[i], ct.eta, p.eta_max)) == e.frame);
        }
        CHECK(parse_frames(f.eavesdrop().dump()).size() == 3);
        CHECK(duplicate_windows(f.eavesdrop()) == 0);
    }

    TEST_CASE("dynamic key request") {
        RandomSource rng = RandomSource::seeded(9);
        // 64k <= m, so each grant is a single frame.
        Fleet f = Fleet::provision(fleet_params(4, 1 << 14, 3, 256, 4, 1), RandomSource::seeded(10));
        const std::size_t before = f.eavesdrop().size();
        const SlotId slot = f.request_dynamic_key(2, 3);
        CHECK(slot == 1);
        CHECK(f.eavesdrop().size() == before + 2);
        for(std::size_t i = before; i < f.eavesdrop().size(); ++i) {
            CHECK(f.eavesdrop().entries()[i].sender == 0);
        }
        CHECK(f.key_of(2, 3, 1) == f.key_of(3, 2, 1));
        CHECK(f.key_of(2, 3, 1) != f.key_of(2, 3, 0));

        // Slot 0 first, then the minted slot.
        for(int i = 0; i < 4; ++i) {
            CHECK(f.send_message(2, 3, payload(rng, 256)).slot == 0);
        }
        const Message msg = payload(rng, 256);
        const DeliveryRecord d = f.send_message(3, 2, msg);
        CHECK(d.slot == 1);
        CHECK(d.plaintext == msg);

        CHECK(f.analytics_params().total_keys() == 7);
        CHECK(f.request_dynamic_key(0, 1) == 1);
        CHECK(f.analytics_params().total_keys() == 8);
        CHECK(duplicate_windows(f.eavesdrop()) == 0);
    }

    TEST_CASE("long keys travel in several chunks") {
        Fleet f = Fleet::provision(fleet_params(3, 1 << 12, 3, 100, 8, 1), RandomSource::seeded(11));
        f.request_dynamic_key(1, 2);
        // 192 key bits over 100-bit messages: two chunks to each side.
        CHECK(f.eavesdrop().size() == 4);
        CHECK(f.budget(DevicePair{0, 1}, 0).next_eta == 3);
        CHECK(f.key_of(1, 2, 1).has_value());
    }

    TEST_CASE("failed grant installs nothing") {
        RandomSource rng = RandomSource::seeded(12);
        Fleet f = Fleet::provision(fleet_params(3, 1 << 12, 2, 128, 1, 1), RandomSource::seeded(13));
        f.send_message(0, 2, payload(rng, 128));
        CHECK_THROWS_AS(f.request_dynamic_key(1, 2), BudgetExhausted);
        CHECK(f.eavesdrop().size() == 2);
        CHECK(f.slots(1, 2) == std::vector<SlotId>{0});
        CHECK(f.slots(2, 1) == std::vector<SlotId>{0});
        CHECK(f.analytics_params().total_keys() == 3);
    }

    TEST_CASE("admission") {
        RandomSource rng = RandomSource::seeded(14);
        FleetOptions options;
        options.reserve = 1;
        Fleet f = Fleet::provision(fleet_params(3, 1 << 14, 3, 256, 8, 1), RandomSource::seeded(15), options);
        CHECK(f.admit_device() == 3);
        CHECK(f.device_count() == 4);
        CHECK(f.slots(3, 0) == std::vector<SlotId>{0});
        CHECK_THROWS_AS(f.send_message(3, 1, payload(rng, 256)), UnknownPair);

        f.request_dynamic_key(3, 1);
        const Message msg = payload(rng, 256);
        CHECK(f.send_message(3, 1, msg).plaintext == msg);
        CHECK(f.send_message(0, 3, msg).plaintext == msg);
        CHECK_THROWS_AS(f.admit_device(), ReserveExhausted);
        CHECK(f.analytics_params().devices == 4);
        CHECK(duplicate_windows(f.eavesdrop()) == 0);
    }

    TEST_CASE("key material never appears in the transcript") {
        RandomSource rng = RandomSource::seeded(16);
        Fleet f = Fleet::provision(fleet_params(4, std::uint64_t{1} << 30, 4, 512, 8, 2), RandomSource::seeded(17));
        for(int i = 0; i < 20; ++i) {
            const auto a = static_cast<DeviceId>(rng.uniform_below(4));
            const auto b = static_cast<DeviceId>((a + 1 + rng.uniform_below(3)) % 4);
            f.send_message(a, b, payload(rng, 512));
        }
        f.request_dynamic_key(1, 2);
        f.request_dynamic_key(2, 3);
        const auto dump = f.eavesdrop().dump();
        std::size_t hits = 0;
        for(DeviceId a = 0; a < 4; ++a) {
            for(DeviceId b = a + 1; b < 4; ++b) {
                for(const SlotId s : f.slots(a, b)) {
                    hits += shared_windows(dump, serialize(*f.key_of(a, b, s)));
                }
            }
        }
        CHECK(hits == 0);
    }

    TEST_CASE("minted keys never repeat over 10^4 requests") {
        Fleet f = Fleet::provision(fleet_params(3, std::uint64_t{1} << 22, 2, 128, 10000, 1), RandomSource::seeded(18));
        std::set<std::vector<std::uint64_t>> seen;
        for(int i = 0; i < 10000; ++i) {
            const SlotId slot = f.request_dynamic_key(1, 2);
            seen.insert(f.key_of(1, 2, slot)->values());
        }
        CHECK(seen.size() == 10000);
        CHECK(duplicate_windows(f.eavesdrop()) == 0);
    }

    TEST_CASE("seeded fleets are identical") {
        auto run = [] {
            RandomSource rng = RandomSource::seeded(19);
            Fleet f = Fleet::provision(fleet_params(4, 1 << 12, 3, 64, 4, 1), RandomSource::seeded(20));
            f.send_message(0, 1, payload(rng, 64));
            f.request_dynamic_key(2, 3);
            return f.eavesdrop().dump();
        };
        CHECK(run() == run());
    }
}

TEST_SUITE("scenario") {
    TEST_CASE("full script") {
        const auto dir = std::filesystem::temp_directory_path() / "mpad-scenario-test";
        std::filesystem::create_directories(dir);
        const std::string script = R"(# four devices, two windows per key
provision U=4 n=4096 k=3 m=208 eta_max=2 lambda=1 seed=5 reserve=1
send 0 1 00112233445566778899aabbccddeeff00112233445566778899
send 1 0 ffeeddccbbaa99887766554433221100ffeeddccbbaa99887766
expect budget-exhausted send 0 1 0000000000000000000000000000000000000000000000000000

dynkey 2 3
admit
expect unknown-pair send 4 2 0000000000000000000000000000000000000000000000000000
eavesdrop-dump out.bin
)";
        const ScenarioReport r = run_scenario(script, dir);
        CHECK(r.commands == 8);
        CHECK(r.expected_errors == 2);
        REQUIRE(r.deliveries.size() == 2);
        for(std::size_t i = 0; i < r.deliveries.size(); ++i) {
            CHECK(r.deliveries[i].plaintext == r.sent[i]);
        }
        REQUIRE(r.fleet.has_value());
        CHECK(r.fleet->device_count() == 5);
        REQUIRE(r.dumps.size() == 1);
        const auto bytes = read_file(r.dumps[0]);
        CHECK(bytes == r.fleet->eavesdrop().dump());
        CHECK(parse_frames(bytes).size() == r.fleet->eavesdrop().size());
        std::filesystem::remove_all(dir);
    }

    TEST_CASE("errors") {
        const std::string head = "provision U=3 n=1024 k=2 m=8 eta_max=1 lambda=1 seed=1\n";
        CHECK_THROWS_AS(run_scenario("send 0 1 00\n"), FormatError);
        CHECK_THROWS_AS(run_scenario(head + "launch\n"), FormatError);
        CHECK_THROWS_AS(run_scenario(head + "send 0 1 0\n"), FormatError);
        CHECK_THROWS_AS(run_scenario(head + "send 0 1 0000\n"), FormatError);
        CHECK_THROWS_AS(run_scenario(head + "provision U=3 n=1024 k=2 m=8 seed=1\n"), FormatError);
        CHECK_THROWS_AS(run_scenario(head + "expect unknown-pair send 0 1 00\n"), ScenarioFailure);
        CHECK_THROWS_AS(run_scenario(head + "send 0 1 00\nsend 0 1 00\n"), ScenarioFailure);
        CHECK_NOTHROW(run_scenario(head + "send 0 1 00\nexpect budget-exhausted send 0 1 00\n"));
        CHECK_NOTHROW(run_scenario(head + "expect format-error send 0 1 zz\n"));
        try {
            run_scenario(head + "\nsend 0 9 00\n");
            FAIL("expected failure");
        } catch(const ScenarioFailure& e) {
            CHECK(std::string(e.what()).find("line 3") != std::string::npos);
        }
    }
}
