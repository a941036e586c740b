// Acceptance suite: one PASS/FAIL line per criterion, tolerances fixed below. Exit status is the
// number of failed criteria (capped at 125).

#include "cli.hpp"

#include <mpad/analytics.hpp>
#include <mpad/attack.hpp>
#include <mpad/bench.hpp>
#include <mpad/fleet.hpp>
#include <mpad/key.hpp>
#include <mpad/wire.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <algorithm>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace mpad;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void criterion(const char* name, const std::function<Outcome()>& body) {
    const auto start = Clock::now();
    Outcome out;
    try {
        out = body();
    } catch(const std::exception& e) {
        out = {false, std::string("threw ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    std::printf("%s %s | %s | %.2fs\n", out.pass ? "PASS" : "FAIL", name, out.detail.c_str(), seconds);
    std::fflush(stdout);
    failures += !out.pass;
}

void note(const std::string& text) {
    std::printf("NOTE %s\n", text.c_str());
    std::fflush(stdout);
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

LabParams lab(std::uint64_t n, std::uint64_t k, std::uint64_t m, std::uint64_t eta, std::uint64_t devices) {
    LabParams p;
    p.n = n;
    p.k = k;
    p.m = m;
    p.eta_max = eta;
    p.devices = devices;
    return p;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while(std::getline(in, cell, sep)) {
        out.push_back(cell);
    }
    return out;
}

// ---------------------------------------------------------------------------------------------

Outcome example_one() {
    const auto start = Clock::now();
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run({"analyze", "--n", "2^33", "--k", "46", "--m", "2^10", "--devices", "256", "--eta-max",
                               "2^20", "--lambda", "128"},
                              out, err);
    const double elapsed = seconds_since(start);
    std::istringstream lines(out.str());
    std::string header;
    std::string row;
    std::getline(lines, header);
    std::getline(lines, row);
    const auto names = split(header, ',');
    const auto cells = split(row, ',');
    if(code != 0 || names.size() != cells.size()) {
        return {false, "analyze failed: " + err.str()};
    }
    auto cell = [&](const std::string& name) {
        for(std::size_t i = 0; i < names.size(); ++i) {
            if(names[i] == name) {
                return cells[i];
            }
        }
        return std::string();
    };
    const double log2_bound = std::stod(cell("advantage_bound_log2"));
    const double device_gain = std::stod(cell("device_gain"));
    const double system_gain = std::stod(cell("system_gain"));
    const std::string bytes = cell("pair_capacity_bytes");

    const bool ok = log2_bound <= -69.0 && std::abs(log2_bound + 69.0) <= 0.5 &&
                    std::abs(device_gain / 88.6845 - 1) <= 0.005 && std::abs(system_gain / 1.1174e4 - 1) <= 0.005 &&
                    bytes == "17179869184" && elapsed < 1.0;
    return {ok, fmt("log2 bound %.6f, device gain %.6f, system gain %.3f, capacity %s bytes, analyze %.3fs",
                    log2_bound, device_gain, system_gain, bytes.c_str(), elapsed)};
}

Outcome recovery_cost() {
    const RecoveryCost c = key_recovery_cost(std::uint64_t{1} << 33, 46, 1024);
    const bool ok = c.expected_trials_log2 == Real(1517);
    return {ok, "expected_trials_log2 = " + format_real(c.expected_trials_log2, 20)};
}

Outcome brute_force() {
    const auto start = Clock::now();
    RandomSource rng = RandomSource::seeded(20240601);
    const BruteForceStudy s = brute_force_study(lab(16, 2, 24, 1, 2), 1000, rng);
    const double elapsed = seconds_since(start);
    const bool ok = s.recovered == s.instances && s.false_candidates == 0 && std::abs(s.mean_trials - 128) <= 12.8 &&
                    elapsed < 60;
    return {ok, fmt("%llu instances, true key recovered %llu, false candidates %llu in %llu instances, mean trials "
                    "%.2f (target 128 +-12.8)",
                    static_cast<unsigned long long>(s.instances), static_cast<unsigned long long>(s.recovered),
                    static_cast<unsigned long long>(s.false_candidates),
                    static_cast<unsigned long long>(s.instances_with_false), s.mean_trials)};
}

Outcome collision_exactness() {
    const auto start = Clock::now();
    const Rational one = collision_probability_exact(lab(8, 1, 2, 1, 2), false).value();
    const Rational two = collision_probability_exact(lab(8, 2, 2, 1, 2), false).value();
    RandomSource rng = RandomSource::seeded(7);
    const CollisionEstimate mc1 = collision_probability_mc(lab(8, 1, 2, 1, 2), 100000, rng, false);
    const CollisionEstimate mc2 = collision_probability_mc(lab(8, 2, 2, 1, 2), 100000, rng, false);
    const double elapsed = seconds_since(start);
    const bool ok = one == Rational(24, 64) && two == Rational(576, 4096) && std::abs(mc1.z_score) <= 3 &&
                    std::abs(mc2.z_score) <= 3 && elapsed < 60;
    return {ok, "exact " + one.str() + " and " + two.str() +
                    fmt(", MC %.5f (z %.2f) and %.5f (z %.2f) at 1e5 trials", mc1.estimate, mc1.z_score, mc2.estimate,
                        mc2.z_score)};
}

Outcome otp_failure() {
    const LabParams p = lab(16, 1, 2, 1, 3);
    const OtpFailureExact exact = one_time_pad_failure_exact(p);
    const Rational bound = otp_union_bound(p);
    RandomSource rng = RandomSource::seeded(11);
    const OtpFailureReport mc = one_time_pad_failure_mc(p, 100000, rng);
    const double e = static_cast<double>(exact.failure);
    const double sigma = std::sqrt(e * (1 - e) / 100000);
    const double z = (mc.estimate.estimate - e) / sigma;
    const bool ok = exact.failure <= bound && std::abs(z) <= 3;
    return {ok, fmt("exact failure %.6f <= union bound %.6f, MC %.6f (z %.2f vs exact)", e, static_cast<double>(bound),
                    mc.estimate.estimate, z)};
}

Outcome micro_game() {
    const auto start = Clock::now();
    std::set<std::string> seen;
    int qualifying = 0;
    int violations = 0;
    int layouts = 0;
    double bound = 0;
    double max_advantage = 0;
    for(std::uint64_t seed = 1; seen.size() < 20 && seed <= 200; ++seed) {
        RandomSource rng = RandomSource::seeded(seed);
        const MicroLayout layout = random_layout(lab(8, 1, 2, 1, 3), rng);
        std::string id = std::to_string(layout.target) + ":" + to_hex(layout.zero.to_bytes()) + to_hex(layout.one.to_bytes());
        for(const auto& pair : layout.known) {
            for(const auto& msg : pair) {
                id += to_hex(msg.to_bytes());
            }
        }
        if(!seen.insert(id).second) {
            continue;
        }
        ++layouts;
        const GameResult g = exact_bayes_advantage(layout);
        bound = g.bound ? static_cast<double>(*g.bound) : NAN;
        max_advantage = std::max(max_advantage, g.advantage);
        if(g.bound_below_one) {
            ++qualifying;
            violations += !g.dominated;
        }
    }
    const double elapsed = seconds_since(start);
    const bool ok = qualifying >= 20 && violations == 0 && elapsed < 300;
    return {ok, fmt("%d distinct layouts, bound %.4f, %d with bound < 1 (need 20), %d dominance violations, max "
                    "advantage %.4f",
                    layouts, bound, qualifying, violations, max_advantage)};
}

void micro_game_supplement() {
    RandomSource rng = RandomSource::seeded(99);
    int dominated = 0;
    const int layouts = 20;
    double bound = 0;
    double max_advantage = 0;
    for(int i = 0; i < layouts; ++i) {
        const GameResult g = exact_bayes_advantage(random_layout(lab(128, 1, 4, 1, 3), rng));
        bound = g.bound ? static_cast<double>(*g.bound) : NAN;
        max_advantage = std::max(max_advantage, g.advantage);
        dominated += g.bound_below_one && g.dominated;
    }
    note(fmt("micro-game at n=128 k=1 m=4 U=3: %d/%d layouts dominated, bound %.6f, max advantage %.6f", dominated,
             layouts, bound, max_advantage));
}

Outcome keystream_statistics() {
    RandomSource rng = RandomSource::seeded(5);
    std::string detail;
    bool ok = true;
    for(std::uint64_t k : {1u, 8u, 46u}) {
        const FrequencyReport r = keystream_frequency_test({k, std::uint64_t{1} << 21, 0.5}, 1000000, rng);
        ok = ok && r.verdict == Verdict::pass;
        detail += fmt("k=%llu f=%.5f z=%.2f; ", static_cast<unsigned long long>(k), r.frequency, r.z_score);
    }
    for(double p : {0.1, 0.3}) {
        for(std::uint64_t k : {3u, 8u}) {
            const FrequencyReport r = keystream_frequency_test({k, std::uint64_t{1} << 21, p}, 1000000, rng);
            ok = ok && std::abs(r.z_score) <= 3;
            detail += fmt("p=%.1f k=%llu f=%.5f pred=%.5f z=%.2f; ", p, static_cast<unsigned long long>(k), r.frequency,
                          r.predicted, r.z_score);
        }
    }
    return {ok, detail};
}

Outcome window_disjointness() {
    const std::uint64_t n = 64, k = 3, m = 5, eta_max = 6;
    RandomSource rng = RandomSource::seeded(64);
    int clean = 0;
    for(int t = 0; t < 100; ++t) {
        const PairwiseKey key = generate_pairwise_key({k, n, 0.5}, {0, 1}, 0, rng);
        std::vector<std::set<std::uint64_t>> rows(k);
        for(std::uint64_t eta = 1; eta <= eta_max; ++eta) {
            for(std::uint64_t i = 1; i <= m; ++i) {
                const SubKey s = subkey(key, m, eta, i);
                for(std::uint64_t r = 0; r < k; ++r) {
                    rows[r].insert(s.values[r]);
                }
            }
        }
        bool distinct = true;
        for(const auto& row : rows) {
            distinct = distinct && row.size() == m * eta_max;
        }
        clean += distinct;
    }
    return {clean == 100, fmt("%d/100 keys with all %llu positions per row distinct", clean,
                              static_cast<unsigned long long>(m * eta_max))};
}

Outcome avalanche() {
    const auto start = Clock::now();
    RandomSource rng = RandomSource::seeded(2);
    const AvalancheReport r = avalanche_bench(AvalancheParams{}, {0.01, 0.5, 0.99}, 10, rng);
    const double elapsed = seconds_since(start);
    bool ok = elapsed < 120;
    std::string detail;
    for(const auto& row : r.rows) {
        ok = ok && std::abs(row.fresh_window_mean - 0.5) <= 0.003 && row.same_window_exact;
        detail += fmt("zeros %.2f: fresh %.6f, same %s; ", row.zero_fraction, row.fresh_window_mean,
                      row.same_window_exact ? "1/m" : "not 1/m");
    }
    return {ok, detail + fmt("m=1e6, %llu trials per row", static_cast<unsigned long long>(r.trials))};
}

Outcome runtime_scaling() {
    RandomSource rng = RandomSource::seeded(3);
    const RuntimeReport r = runtime_bench(RuntimeGrid{}, 21, rng);
    bool ok = true;
    std::string detail;
    auto at = [&](std::uint64_t m, std::uint64_t k) -> const RuntimeRow& {
        for(const auto& row : r.rows) {
            if(row.m == m && row.k == k) {
                return row;
            }
        }
        throw std::runtime_error("missing grid point");
    };
    for(std::uint64_t k : {10u, 13u}) {
        const double ratio = at(10000, k).encrypt_seconds / at(5000, k).encrypt_seconds;
        ok = ok && ratio >= 1.8 && ratio <= 2.2;
        detail += fmt("k=%llu m 5000->10000 ratio %.3f; ", static_cast<unsigned long long>(k), ratio);
    }
    double worst = 0;
    for(const auto& row : r.rows) {
        worst = std::max(worst, std::abs(row.decrypt_seconds / row.encrypt_seconds - 1));
    }
    ok = ok && worst < 0.05;
    detail += fmt("max encrypt/decrypt gap %.2f%%", 100 * worst);
    for(std::uint64_t m : {5000u, 10000u}) {
        note(fmt("runtime k 10->13 at m=%llu: ratio %.3f", static_cast<unsigned long long>(m),
                 at(m, 13).encrypt_seconds / at(m, 10).encrypt_seconds));
    }
    note(fmt("runtime fit time ~ a*m*k + b: a=%.4g s, b=%.4g s, R^2=%.4f", r.fit_mk.slope, r.fit_mk.intercept,
             r.fit_mk.r2));
    return {ok, detail};
}

Outcome fleet_end_to_end() {
    const std::string script = R"(provision U=4 n=2^16 k=3 m=256 eta_max=2 lambda=1 seed=42 distributor=0 reserve=1
send 1 2 1111111111111111111111111111111111111111111111111111111111111111
send 2 1 2222222222222222222222222222222222222222222222222222222222222222
expect budget-exhausted send 1 2 3333333333333333333333333333333333333333333333333333333333333333
dynkey 1 2
send 1 2 4444444444444444444444444444444444444444444444444444444444444444
send 3 0 5555555555555555555555555555555555555555555555555555555555555555
admit
expect unknown-pair send 4 2 6666666666666666666666666666666666666666666666666666666666666666
dynkey 4 2
send 4 2 7777777777777777777777777777777777777777777777777777777777777777
send 2 4 8888888888888888888888888888888888888888888888888888888888888888
send 4 0 9999999999999999999999999999999999999999999999999999999999999999
expect reserve-exhausted admit
)";
    const ScenarioReport r = run_scenario(script);
    std::size_t matching = 0;
    for(std::size_t i = 0; i < r.deliveries.size(); ++i) {
        matching += r.deliveries[i].plaintext == r.sent[i];
    }
    const std::size_t frames = r.fleet ? r.fleet->eavesdrop().size() : 0;
    const std::size_t duplicates = r.fleet ? duplicate_windows(r.fleet->eavesdrop()) : 1;
    const bool ok = r.fleet && matching == r.deliveries.size() && duplicates == 0 && r.expected_errors == 3 &&
                    r.fleet->device_count() == 5;
    return {ok, fmt("%zu commands, %zu/%zu deliveries match, %zu expected errors, %zu frames, %zu duplicate "
                    "(pair, slot, eta) triples",
                    r.commands, matching, r.deliveries.size(), r.expected_errors, frames, duplicates)};
}

}  // namespace

int main() {
    criterion("example-one-analytics", example_one);
    criterion("key-recovery-cost", recovery_cost);
    criterion("brute-force-desk-scale", brute_force);
    criterion("collision-event-exactness", collision_exactness);
    criterion("one-time-pad-failure-bound", otp_failure);
    criterion("micro-game-dominance", micro_game);
    micro_game_supplement();
    criterion("keystream-statistics", keystream_statistics);
    criterion("window-disjointness", window_disjointness);
    criterion("avalanche", avalanche);
    criterion("runtime-scaling", runtime_scaling);
    criterion("fleet-end-to-end", fleet_end_to_end);
    std::printf("%d criteria failed\n", failures);
    return std::min(failures, 125);
}
