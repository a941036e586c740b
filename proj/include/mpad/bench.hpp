#pragma once

#include <mpad/random.hpp>

#include <cstdint>
#include <ostream>
#include <vector>

namespace mpad {

struct AvalancheParams {
    std::uint64_t n = std::uint64_t{1} << 25;
    std::uint64_t k = 30;
    std::uint64_t m = 1000000;
};

struct AvalancheRow {
    double zero_fraction = 0;
    /// Both encryptions under the same key and window: always exactly 1/m.
    double same_window = 0;
    /// Every same-window trial differed in exactly one ciphertext bit.
    bool same_window_exact = true;
    /// Second encryption under the next window of a fresh key per trial.
    double fresh_window_mean = 0;
    double fresh_window_variance = 0;
    /// 1 / (4m), the binomial variance of the flip fraction.
    double expected_variance = 0;
    /// (variance - expected) / (expected * sqrt(2 / (trials - 1)))
    double variance_z = 0;
};

struct AvalancheReport {
    std::uint64_t trials = 0;
    double mean_flip_fraction = 0;  // over all fresh-window trials
    std::vector<AvalancheRow> rows;
};

/// For each zero fraction f: plaintext bits are 0 with probability f, bit 1 of the plaintext is
/// flipped, and the fraction of ciphertext bits that change is recorded for both variants.
/// Requires m >= 10^4 and parameters that admit two windows.
AvalancheReport avalanche_bench(const AvalancheParams& params, const std::vector<double>& zero_fractions,
                                std::uint64_t trials, RandomSource& rng);

void write_avalanche_csv(std::ostream& out, const AvalancheReport& report);

struct RuntimeRow {
    std::uint64_t m = 0;
    std::uint64_t k = 0;
    double encrypt_seconds = 0;
    double decrypt_seconds = 0;
    double throughput_bits_per_second = 0;  // m / encrypt_seconds
};

struct LinearFit {
    double slope = 0;
    double intercept = 0;
    double r2 = 0;
};

struct RuntimeReport {
    std::vector<RuntimeRow> rows;
    /// encrypt time against m * k over every row.
    LinearFit fit_mk;
    /// encrypt time against m at the smallest k, and against k at the smallest m.
    LinearFit fit_m;
    LinearFit fit_k;
};

struct RuntimeGrid {
    std::vector<std::uint64_t> m = {5000, 10000};
    std::vector<std::uint64_t> k = {10, 13};
    std::uint64_t n = std::uint64_t{1} << 20;
};

/// Median per-message encrypt and decrypt times over `repetitions` samples, after one discarded
/// warm-up sample. Each sample times a batch long enough (about 2 ms) for the clock, and encrypt
/// and decrypt samples alternate. Repetitions run sequentially.
RuntimeReport runtime_bench(const RuntimeGrid& grid, std::uint64_t repetitions, RandomSource& rng);

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

void write_runtime_csv(std::ostream& out, const RuntimeReport& report);

}  // namespace mpad
