#include <mpad/analytics.hpp>
#include <mpad/error.hpp>

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace mpad;

namespace {

// Straight-line rational oracle, written from the closed forms with uniform lambda.
struct Oracle {
    BigInt n, k, m, u, eta, lambda;

    BigInt pairs() const { return u * (u - 1) / 2; }

    Rational bound(bool multi) const {
        const BigInt e = multi ? eta : BigInt(1);
        const unsigned kk = k.convert_to<unsigned>();
        BigInt two_m = 1;
        for(BigInt i = 0; i < m; ++i) {
            two_m *= 2;
        }
        BigInt num = 1;
        BigInt den = 1;
        for(unsigned i = 0; i < kk; ++i) {
            num *= 2 * e * m - 1;
            den *= n;
        }
        return Rational(2 * pairs() * lambda) * (Rational(num, den) + Rational(e, two_m));
    }

    Rational gain(const BigInt& keys, unsigned log_n) const {
        return Rational(keys * m * eta, keys * k * log_n + k * n);
    }
};

SystemParams params(std::uint64_t n, std::uint64_t k, std::uint64_t m, std::uint64_t u, std::uint64_t eta,
                    std::uint64_t lambda) {
    SystemParams p;
    p.n = n;
    p.k = k;
    p.m = m;
    p.devices = u;
    p.eta_max = eta;
    p.lambda = lambda;
    return p;
}

double to_double(const Real& r) {
    return r.convert_to<double>();
}

}  // namespace

TEST_SUITE("analytics") {
    TEST_CASE("example one") {
        const SystemParams p = params(std::uint64_t{1} << 33, 46, 1024, 256, std::uint64_t{1} << 20, 128);
        REQUIRE(p.validate().valid);

        const BoundReport b = advantage_bound(p, true);
        CHECK(to_double(b.log2_bound) <= -69.0);
        CHECK(to_double(b.log2_bound) == doctest::Approx(-69.0).epsilon(0.5 / 69));
        CHECK_FALSE(b.vacuous);
        CHECK(b.effective_W == BigInt(32640) * 128);

        CHECK(to_double(device_secrecy_gain(p, 0).gain) == doctest::Approx(88.6845).epsilon(0.005));
        CHECK(to_double(system_secrecy_gain(p).gain) == doctest::Approx(1.1174e4).epsilon(0.005));
        CHECK(pair_capacity_bits(p) == BigInt("137438953472"));
        CHECK(pair_capacity_bits(p) / 8 == BigInt("17179869184"));
        CHECK(key_recovery_cost(p.n, p.k, p.m).expected_trials_log2 == Real(1517));
        CHECK(max_eta(p.n, p.m) == (std::uint64_t{1} << 22));
    }

    TEST_CASE("rational oracle, n=2^10 k=8 m=32 U=4 eta_max=4") {
        const SystemParams p = params(1024, 8, 32, 4, 4, 1);
        const Oracle o{1024, 8, 32, 4, 4, 1};
        CHECK(advantage_bound_exact(p, true) == o.bound(true));
        CHECK(advantage_bound_exact(p, false) == o.bound(false));

        const BoundReport b = advantage_bound(p, true);
        REQUIRE(b.exact.has_value());
        CHECK(*b.exact == o.bound(true));
        CHECK(to_double(b.bound) == doctest::Approx(static_cast<double>(o.bound(true))).epsilon(1e-12));

        const GainReport g = device_secrecy_gain(p, 2);
        REQUIRE(g.exact.has_value());
        CHECK(*g.exact == o.gain(3, 10));
        CHECK(*g.exact == Rational(384, 8432));
        CHECK(*system_secrecy_gain(p).exact == Rational(768, 8672));
    }

    TEST_CASE("rational oracle, n=2^6 k=4 m=8 U=3 eta_max=4 lambda=2") {
        const SystemParams p = params(64, 4, 8, 3, 4, 2);
        REQUIRE(p.validate().valid);
        const Oracle o{64, 4, 8, 3, 4, 2};
        CHECK(advantage_bound_exact(p, true) == o.bound(true));
        CHECK(advantage_bound(p, true).vacuous);
        CHECK(*device_secrecy_gain(p, 1).exact == o.gain(4, 6));
        CHECK(*system_secrecy_gain(p).exact == o.gain(6, 6));
        CHECK(pair_capacity_bits(p) == 64);
    }

    TEST_CASE("single-window bound never exceeds the multi-window one") {
        for(std::uint64_t eta : {1u, 2u, 8u, 64u}) {
            const SystemParams p = params(1 << 16, 6, 100, 10, eta, 3);
            REQUIRE(p.validate().valid);
            CHECK(advantage_bound_exact(p, false) <= advantage_bound_exact(p, true));
        }
    }

    TEST_CASE("bound decays exponentially in k") {
        Real previous = 0;
        for(std::uint64_t k = 4; k <= 40; k += 4) {
            const Real now = advantage_bound(params(1 << 20, k, 1000, 8, 16, 1), true).log2_bound;
            if(k > 4) {
                CHECK(now < previous);
            }
            previous = now;
        }
    }

    TEST_CASE("non power of two n") {
        const SystemParams p = params(1000, 3, 10, 3, 5, 1);
        const GainReport g = device_secrecy_gain(p, 0);
        CHECK_FALSE(g.exact.has_value());
        const double expected = 2.0 * 10 * 5 / (2.0 * 3 * std::log2(1000.0) + 3000);
        CHECK(to_double(g.gain) == doctest::Approx(expected).epsilon(1e-12));
    }

    TEST_CASE("per-pair overrides feed W and gains") {
        SystemParams p = params(1 << 12, 4, 16, 3, 2, 1);
        p.lambda_overrides[DevicePair{0, 2}] = 3;
        CHECK(p.total_keys() == 5);
        CHECK(p.keys_of(0) == 4);
        CHECK(p.keys_of(1) == 2);
        CHECK(advantage_bound(p, true).effective_W == 5);
        CHECK(pair_capacity_bits(p, DevicePair{0, 2}) == 3 * 16 * 2);
        CHECK(pair_capacity_bits(p, DevicePair{0, 1}) == 16 * 2);
        const Oracle o{1 << 12, 4, 16, 3, 2, 1};
        CHECK(*device_secrecy_gain(p, 0).exact == o.gain(4, 12));

        p.lambda_overrides[DevicePair{1, 5}] = 1;
        CHECK_FALSE(p.validate().valid);
    }

    TEST_CASE("invalid parameters are refused") {
        CHECK_THROWS_AS(advantage_bound(params(8, 2, 2, 3, 1, 1), true), InvalidParams);
        CHECK_THROWS_AS(system_secrecy_gain(params(64, 3, 5, 3, 7, 1)), InvalidParams);
        CHECK_THROWS_AS(device_secrecy_gain(params(64, 3, 5, 3, 6, 1), 3), UnknownDevice);
        CHECK_FALSE(params(64, 3, 5, 1, 6, 1).validate().valid);
        CHECK_FALSE(params(64, 3, 5, 3, 6, 0).validate().valid);
    }

    TEST_CASE("key recovery cost") {
        const RecoveryCost c = key_recovery_cost(16, 2, 24);
        CHECK(c.keyspace_log2 == Real(8));
        CHECK(c.expected_trials_log2 == Real(7));
        CHECK(to_double(key_recovery_cost(1000, 3, 10).keyspace_log2) == doctest::Approx(3 * std::log2(1000.0)));
    }

    TEST_CASE("precision control") {
        const unsigned saved = precision_bits();
        set_precision_bits(10);
        CHECK(precision_bits() == 64);
        const Real low = advantage_bound(params(std::uint64_t{1} << 33, 46, 1024, 256, 1 << 20, 128), true).log2_bound;
        set_precision_bits(512);
        const Real high = advantage_bound(params(std::uint64_t{1} << 33, 46, 1024, 256, 1 << 20, 128), true).log2_bound;
        set_precision_bits(saved);
        CHECK(to_double(low) == doctest::Approx(to_double(high)).epsilon(1e-12));
    }

    TEST_CASE("sweep and csv") {
        SweepRange range;
        range.n = {1 << 10, 1 << 12};
        range.k = {8};
        range.m = {32, 600};
        range.devices = {4};
        range.eta_max = {4};
        range.lambda = {1};
        const auto rows = sweep(range, Metric::advantage_multi);
        REQUIRE(rows.size() == 4);
        CHECK(rows[0].params.n == 1024);
        CHECK(rows[0].params.m == 32);
        CHECK(rows[0].valid);
        CHECK_FALSE(rows[1].valid);
        CHECK(rows[3].params.n == 4096);

        std::ostringstream out;
        write_sweep_csv(out, rows, Metric::advantage_multi);
        std::istringstream in(out.str());
        std::string line;
        std::getline(in, line);
        CHECK(line == "n,k,m,U,eta_max,lambda,advantage_bound_log2,status");
        std::getline(in, line);
        CHECK(line.rfind("1024,8,32,4,4,1,-", 0) == 0);
        CHECK(line.substr(line.size() - 3) == ",ok");
        std::getline(in, line);
        CHECK(line.rfind("1024,8,600,4,4,1,,\"invalid: ", 0) == 0);

        CHECK(parse_metric("device-gain") == Metric::device_gain);
        CHECK(parse_metric("pair_capacity_bits") == Metric::pair_capacity);
        CHECK_FALSE(parse_metric("nonsense").has_value());
    }
}
