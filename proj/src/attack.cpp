#include <mpad/attack.hpp>

#include <mpad/error.hpp>
#include <mpad/keystream.hpp>

#include "parallel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <utility>

namespace mpad {

namespace {

// base^exp if it does not exceed limit.
std::optional<std::uint64_t> checked_pow(std::uint64_t base, std::uint64_t exp, std::uint64_t limit) {
    std::uint64_t out = 1;
    for(std::uint64_t i = 0; i < exp; ++i) {
        if(base != 0 && out > limit / base) {
            return std::nullopt;
        }
        out *= base;
    }
    if(out > limit) {
        return std::nullopt;
    }
    return out;
}

// Advances a base-n counter whose last digit moves fastest. Returns the index of the leftmost
// digit that changed, or digits.size() after wrapping around to all zeros.
std::size_t advance(std::vector<std::uint64_t>& digits, std::uint64_t n) {
    for(std::size_t j = digits.size(); j-- > 0;) {
        if(++digits[j] < n) {
            return j;
        }
        digits[j] = 0;
    }
    return digits.size();
}

std::vector<DevicePair> all_pairs(std::uint64_t devices) {
    std::vector<DevicePair> out;
    for(std::uint64_t q = 0; q < devices; ++q) {
        for(std::uint64_t l = q + 1; l < devices; ++l) {
            out.push_back(DevicePair{static_cast<DeviceId>(q), static_cast<DeviceId>(l)});
        }
    }
    return out;
}

double to_double(const Rational& r) {
    return static_cast<double>(r);
}

BitVector random_message(RandomSource& rng, std::uint64_t m) {
    BitVector out(m);
    rng.fill(out, 0.5);
    return out;
}

struct FrequencyCounts {
    std::uint64_t bits = 0;
    std::uint64_t ones = 0;
};

}  // namespace

void LabParams::check() const {
    if(n == 0 || k == 0 || m == 0 || eta_max == 0) {
        throw InvalidParams("lab parameters need positive n, k, m and eta_max");
    }
    if(devices < 2) {
        throw InvalidParams("lab parameters need at least two devices");
    }
}

std::string LabParams::describe() const {
    return "n=" + std::to_string(n) + " k=" + std::to_string(k) + " m=" + std::to_string(m) +
           " eta_max=" + std::to_string(eta_max) + " U=" + std::to_string(devices);
}

Verdict verdict_for(double z) {
    const double a = std::fabs(z);
    if(a <= 3.0) {
        return Verdict::pass;
    }
    if(a <= 4.0) {
        return Verdict::warn;
    }
    return Verdict::fail;
}

std::string_view to_string(Verdict verdict) {
    switch(verdict) {
    case Verdict::pass:
        return "pass";
    case Verdict::warn:
        return "warn";
    case Verdict::fail:
        return "fail";
    }
    return "fail";
}

double z_score(double estimate, double analytic, std::uint64_t trials) {
    if(trials == 0) {
        return 0;
    }
    if(analytic <= 0.0 || analytic >= 1.0) {
        return estimate == analytic ? 0.0 : std::numeric_limits<double>::infinity();
    }
    return (estimate - analytic) / std::sqrt(analytic * (1 - analytic) / static_cast<double>(trials));
}

CollisionEstimate make_estimate(std::uint64_t trials, std::uint64_t hits, double analytic) {
    CollisionEstimate out;
    out.trials = trials;
    out.hits = hits;
    out.estimate = trials ? static_cast<double>(hits) / static_cast<double>(trials) : 0.0;
    out.analytic = analytic;
    out.z_score = z_score(out.estimate, analytic, trials);
    out.verdict = verdict_for(out.z_score);
    return out;
}

CandidateSet brute_force_recover(const RandomMatrix& matrix, const KnownPlaintextPair& evidence,
                                 std::uint64_t search_budget) {
    const Ciphertext& ct = evidence.ciphertext;
    const std::uint64_t m = ct.payload.size();
    if(evidence.message.size() != m) {
        throw DimensionMismatch("known plaintext and ciphertext lengths differ");
    }
    if(ct.eta < 1) {
        throw IndexOutOfRange("window index must be >= 1");
    }
    const std::uint64_t n = matrix.n();
    const std::uint64_t k = matrix.k();
    const auto space = checked_pow(n, k, search_budget);
    if(!space) {
        throw SearchBudgetExceeded("keyspace " + std::to_string(n) + "^" + std::to_string(k) +
                                   " exceeds the search budget of " + std::to_string(search_budget));
    }

    const BitVector target = evidence.message ^ ct.payload;
    const auto prefix_len = static_cast<unsigned>(std::min<std::uint64_t>(m, 64));
    const std::uint64_t want = prefix_len ? target.read(0, prefix_len) : 0;
    const std::uint64_t offset = window_offset(n, m, ct.eta);

    // 64-bit keystream prefix contributed by row r when its key component is c.
    std::vector<std::uint64_t> table;
    const bool tabulate = k * n <= (std::uint64_t{1} << 22);
    if(tabulate) {
        table.resize(k * n);
        for(std::uint64_t r = 0; r < k; ++r) {
            for(std::uint64_t c = 0; c < n; ++c) {
                table[r * n + c] = read_circular(matrix.row(r), add_mod(c, offset, n), prefix_len);
            }
        }
    }
    auto prefix_at = [&](std::uint64_t r, std::uint64_t c) {
        return tabulate ? table[r * n + c] : read_circular(matrix.row(r), add_mod(c, offset, n), prefix_len);
    };

    CandidateSet out;
    std::vector<std::uint64_t> z(k, 0);
    std::vector<std::uint64_t> acc(k);
    auto refresh = [&](std::size_t from) {
        for(std::size_t r = from; r < k; ++r) {
            acc[r] = (r ? acc[r - 1] : 0) ^ prefix_at(r, z[r]);
        }
    };
    refresh(0);
    for(std::uint64_t index = 0; index < *space; ++index) {
        if(acc[k - 1] == want) {
            PairwiseKey key(ct.pair, ct.slot, n, z);
            if(keystream_bits(matrix, key, m, ct.eta) == target) {
                if(out.keys.empty()) {
                    out.trials_tested = index + 1;
                }
                out.keys.push_back(std::move(key));
            }
        }
        const std::size_t changed = advance(z, n);
        if(changed == z.size()) {
            break;
        }
        refresh(changed);
    }
    out.keys_examined = *space;
    if(out.keys.empty()) {
        out.trials_tested = *space;
    }
    return out;
}

BruteForceStudy brute_force_study(const LabParams& params, std::uint64_t instances, RandomSource& rng) {
    params.check();
    const MatrixSpec spec{params.k, params.n, 0.5};
    BruteForceStudy out;
    out.instances = instances;
    double rank_sum = 0;
    for(std::uint64_t i = 0; i < instances; ++i) {
        const RandomMatrix matrix = generate_matrix(spec, rng);
        const PairwiseKey key = generate_pairwise_key(spec, DevicePair{0, 1}, 0, rng);
        KnownPlaintextPair evidence{random_message(rng, params.m), {}};
        evidence.ciphertext = seal_unchecked(matrix, key, evidence.message, 1);
        const CandidateSet found = brute_force_recover(matrix, evidence);

        const bool hit = std::find(found.keys.begin(), found.keys.end(), key) != found.keys.end();
        out.recovered += hit;
        const std::uint64_t extra = found.keys.size() - (hit ? 1 : 0);
        out.false_candidates += extra;
        out.instances_with_false += extra > 0;
        double rank = 0;
        for(const auto c : key.values()) {
            rank = rank * static_cast<double>(params.n) + static_cast<double>(c);
        }
        rank_sum += rank + 1;
    }
    out.mean_trials = instances ? rank_sum / static_cast<double>(instances) : 0.0;
    out.expected_trials = (std::pow(static_cast<double>(params.n), static_cast<double>(params.k)) + 1) / 2;
    return out;
}

bool window_event(std::span<const std::uint64_t> key, std::span<const std::uint64_t> other, std::uint64_t n,
                  std::uint64_t m, std::uint64_t windows) {
    const unsigned __int128 reach = static_cast<unsigned __int128>(windows) * m - 1;
    if(2 * reach + 1 >= n) {
        return true;
    }
    const auto w = static_cast<std::uint64_t>(reach);
    for(std::size_t j = 0; j < key.size(); ++j) {
        const std::uint64_t d = other[j] >= key[j] ? other[j] - key[j] : n - (key[j] - other[j]);
        if(d > w && d < n - w) {
            return false;
        }
    }
    return true;
}

Rational collision_probability_analytic(const LabParams& params, bool multi) {
    params.check();
    const BigInt windows(multi ? params.eta_max : 1);
    BigInt span = 2 * windows * BigInt(params.m) - 1;
    if(span > BigInt(params.n)) {
        span = BigInt(params.n);
    }
    const auto k = static_cast<unsigned>(params.k);
    return Rational(boost::multiprecision::pow(span, k), boost::multiprecision::pow(BigInt(params.n), k));
}

ExactProbability collision_probability_exact(const LabParams& params, bool multi) {
    params.check();
    const auto total = checked_pow(params.n, 2 * params.k, std::uint64_t{1} << 32);
    if(!total) {
        throw SearchBudgetExceeded("exhaustive pair enumeration over " + params.describe() + " is too large");
    }
    const std::uint64_t windows = multi ? params.eta_max : 1;
    std::vector<std::uint64_t> digits(2 * params.k, 0);
    const std::span<const std::uint64_t> all(digits);
    std::uint64_t hits = 0;
    for(std::uint64_t i = 0; i < *total; ++i) {
        hits += window_event(all.first(params.k), all.subspan(params.k), params.n, params.m, windows);
        advance(digits, params.n);
    }
    return ExactProbability{BigInt(hits), BigInt(*total)};
}

CollisionEstimate collision_probability_mc(const LabParams& params, std::uint64_t trials, RandomSource& rng,
                                           bool multi) {
    params.check();
    const double analytic = to_double(collision_probability_analytic(params, multi));
    if(trials < 10000) {
        throw EstimatorRefused("collision estimate needs at least 10^4 trials");
    }
    if(analytic < 10.0 / static_cast<double>(trials)) {
        throw EstimatorRefused("analytic probability " + std::to_string(analytic) + " is below 10/trials");
    }
    const std::uint64_t windows = multi ? params.eta_max : 1;
    const auto hits = detail::run_trials<std::uint64_t>(trials, rng, [&](RandomSource& source, std::uint64_t count) {
        std::vector<std::uint64_t> z(params.k);
        std::vector<std::uint64_t> other(params.k);
        std::uint64_t local = 0;
        for(std::uint64_t t = 0; t < count; ++t) {
            for(auto& v : z) {
                v = source.uniform_below(params.n);
            }
            for(auto& v : other) {
                v = source.uniform_below(params.n);
            }
            local += window_event(z, other, params.n, params.m, windows);
        }
        return local;
    });
    return make_estimate(trials, hits, analytic);
}

namespace {

struct OtpFlags {
    bool window = false;  // target pair involved
    bool any_window = false;
    bool cross = false;
    bool same = false;
    bool system_cross = false;
};

// Window events among the pairs whose keys sit back to back in `keys`; pair 0 is the target.
void window_flags(std::span<const std::uint64_t> keys, std::size_t pairs, const LabParams& p, OtpFlags& flags) {
    for(std::size_t a = 0; a < pairs; ++a) {
        for(std::size_t b = a + 1; b < pairs; ++b) {
            if(window_event(keys.subspan(a * p.k, p.k), keys.subspan(b * p.k, p.k), p.n, p.m, p.eta_max)) {
                flags.any_window = true;
                flags.window = flags.window || a == 0;
            }
        }
    }
}

// Keystream coincidences. Stream s belongs to pair s / windows; pair 0 is the target.
template <typename Stream>
void stream_flags(const std::vector<Stream>& streams, std::uint64_t windows, OtpFlags& flags) {
    for(std::size_t x = 0; x < streams.size(); ++x) {
        for(std::size_t y = x + 1; y < streams.size(); ++y) {
            if(!(streams[x] == streams[y])) {
                continue;
            }
            const bool target = x / windows == 0;
            if(x / windows == y / windows) {
                flags.same = flags.same || target;
            } else {
                flags.system_cross = true;
                flags.cross = flags.cross || target;
            }
        }
    }
}

void tally(const OtpFlags& f, OtpFailureCounts& c) {
    ++c.trials;
    c.window += f.window;
    c.cross_key += f.cross;
    c.same_key += f.same;
    c.failure += f.window || f.cross;
    c.failure_with_same_key += f.window || f.cross || f.same;
    c.system_failure += f.any_window || f.system_cross;
}

}  // namespace

OtpFailureCounts& OtpFailureCounts::operator+=(const OtpFailureCounts& other) {
    trials += other.trials;
    window += other.window;
    cross_key += other.cross_key;
    same_key += other.same_key;
    failure += other.failure;
    failure_with_same_key += other.failure_with_same_key;
    system_failure += other.system_failure;
    return *this;
}

Rational otp_union_bound(const LabParams& params) {
    params.check();
    const BigInt u(params.devices);
    const BigInt pairs = u * (u - 1) / 2;
    const BigInt windows(params.eta_max);
    const auto k = static_cast<unsigned>(params.k);
    const Rational collision(boost::multiprecision::pow(2 * windows * BigInt(params.m) - 1, k),
                             boost::multiprecision::pow(BigInt(params.n), k));
    BigInt two_m(1);
    two_m <<= static_cast<unsigned>(params.m);
    return Rational(pairs) * (collision + Rational(windows, two_m));
}

OtpFailureReport one_time_pad_failure_mc(const LabParams& params, std::uint64_t trials, RandomSource& rng) {
    params.check();
    if(trials == 0) {
        throw EstimatorRefused("one-time-pad failure estimate needs trials");
    }
    const auto pairs = all_pairs(params.devices);
    const std::uint64_t windows = params.eta_max;
    const MatrixSpec spec{params.k, params.n, 0.5};

    OtpFailureReport out;
    out.counts = detail::run_trials<OtpFailureCounts>(trials, rng, [&](RandomSource& source, std::uint64_t count) {
        OtpFailureCounts local;
        std::vector<std::uint64_t> keys(pairs.size() * params.k);
        std::vector<BitVector> streams(pairs.size() * windows);
        for(std::uint64_t t = 0; t < count; ++t) {
            const RandomMatrix matrix = generate_matrix(spec, source);
            for(auto& v : keys) {
                v = source.uniform_below(params.n);
            }
            OtpFlags flags;
            window_flags(keys, pairs.size(), params, flags);
            for(std::size_t p = 0; p < pairs.size(); ++p) {
                const auto first = keys.begin() + static_cast<std::ptrdiff_t>(p * params.k);
                const PairwiseKey key(pairs[p], 0, params.n, std::vector<std::uint64_t>(first, first + params.k));
                for(std::uint64_t w = 0; w < windows; ++w) {
                    streams[p * windows + w] = keystream_bits(matrix, key, params.m, w + 1);
                }
            }
            stream_flags(streams, windows, flags);
            tally(flags, local);
        }
        return local;
    });

    const Rational bound = otp_union_bound(params);
    out.union_bound = to_double(bound);
    const double estimate = static_cast<double>(out.counts.failure) / static_cast<double>(trials);
    const double spread = std::max(estimate * (1 - estimate), 1.0 / static_cast<double>(trials));
    const double sigma = std::sqrt(spread / static_cast<double>(trials));
    out.estimate.trials = trials;
    out.estimate.hits = out.counts.failure;
    out.estimate.estimate = estimate;
    out.estimate.analytic = out.union_bound;
    out.estimate.z_score = (estimate - out.union_bound) / sigma;
    // One-sided: only an estimate above the bound counts against it.
    out.estimate.verdict = out.estimate.z_score <= 3   ? Verdict::pass
                           : out.estimate.z_score <= 4 ? Verdict::warn
                                                       : Verdict::fail;
    out.within_bound = out.estimate.z_score <= 3;
    return out;
}

OtpFailureExact one_time_pad_failure_exact(const LabParams& params) {
    params.check();
    if(params.m > 64) {
        throw SearchBudgetExceeded("exact one-time-pad enumeration supports m <= 64");
    }
    const auto pairs = all_pairs(params.devices);
    const std::uint64_t windows = params.eta_max;
    const std::uint64_t n = params.n;
    const std::uint64_t k = params.k;
    const std::uint64_t m = params.m;
    const std::uint64_t streams = pairs.size() * windows;
    const std::uint64_t touched_max = std::min(k * n, k * m * streams);
    const auto tuples = checked_pow(n, k * pairs.size(), std::uint64_t{1} << 26);
    if(!tuples || touched_max > 24 || (*tuples << touched_max) > (std::uint64_t{1} << 34)) {
        throw SearchBudgetExceeded("exact one-time-pad enumeration over " + params.describe() + " is too large");
    }

    BigInt failure(0);
    BigInt failure_same(0);
    BigInt system(0);
    BigInt window_hits(0);
    const BigInt full = BigInt(1) << static_cast<unsigned>(touched_max);
    std::vector<std::uint64_t> digits(k * pairs.size(), 0);
    std::vector<std::uint64_t> positions;
    std::vector<std::uint64_t> masks(streams * m);
    std::vector<std::uint64_t> values(streams);

    for(std::uint64_t t = 0; t < *tuples; ++t, advance(digits, n)) {
        OtpFlags base;
        window_flags(digits, pairs.size(), params, base);
        if(base.window) {
            ++window_hits;
            failure += full;
            failure_same += full;
            system += full;
            continue;
        }

        // Matrix positions the keystreams read, and for each keystream bit the set it XORs.
        positions.clear();
        std::fill(masks.begin(), masks.end(), 0);
        for(std::size_t p = 0; p < pairs.size(); ++p) {
            for(std::uint64_t w = 0; w < windows; ++w) {
                const std::uint64_t offset = window_offset(n, m, w + 1);
                for(std::uint64_t i = 0; i < m; ++i) {
                    for(std::uint64_t r = 0; r < k; ++r) {
                        const std::uint64_t col = add_mod(add_mod(digits[p * k + r], offset, n), i % n, n);
                        const std::uint64_t id = r * n + col;
                        auto it = std::find(positions.begin(), positions.end(), id);
                        if(it == positions.end()) {
                            positions.push_back(id);
                            it = positions.end() - 1;
                        }
                        masks[(p * windows + w) * m + i] ^= std::uint64_t{1} << (it - positions.begin());
                    }
                }
            }
        }
        OtpFailureCounts local;
        for(std::uint64_t a = 0; a < (std::uint64_t{1} << positions.size()); ++a) {
            for(std::uint64_t s = 0; s < streams; ++s) {
                std::uint64_t v = 0;
                for(std::uint64_t i = 0; i < m; ++i) {
                    v |= static_cast<std::uint64_t>(std::popcount(masks[s * m + i] & a) & 1) << i;
                }
                values[s] = v;
            }
            OtpFlags flags = base;
            stream_flags(values, windows, flags);
            tally(flags, local);
        }
        const auto scale = static_cast<unsigned>(touched_max - positions.size());
        failure += BigInt(local.failure) << scale;
        failure_same += BigInt(local.failure_with_same_key) << scale;
        system += BigInt(local.system_failure) << scale;
    }

    const BigInt total = BigInt(*tuples) << static_cast<unsigned>(touched_max);
    OtpFailureExact out;
    out.failure = Rational(failure, total);
    out.failure_with_same_key = Rational(failure_same, total);
    out.system_failure = Rational(system, total);
    out.window = Rational(window_hits, BigInt(*tuples));
    return out;
}

double predicted_one_frequency(double bias, std::uint64_t k) {
    return (1.0 - std::pow(1.0 - 2.0 * bias, static_cast<double>(k))) / 2.0;
}

FrequencyReport keystream_frequency_test(const MatrixSpec& spec, std::uint64_t sample_bits, RandomSource& rng) {
    spec.check();
    FrequencyCounts counts;
    while(counts.bits < sample_bits) {
        const std::uint64_t run = std::min(sample_bits - counts.bits, spec.n);
        const RandomMatrix matrix = generate_matrix(spec, rng);
        const PairwiseKey key = generate_pairwise_key(spec, DevicePair{0, 1}, 0, rng);
        counts.ones += keystream_bits(matrix, key, run, 1).count();
        counts.bits += run;
    }
    FrequencyReport out;
    out.bits = counts.bits;
    out.ones = counts.ones;
    out.frequency = out.bits ? static_cast<double>(out.ones) / static_cast<double>(out.bits) : 0.0;
    out.predicted = predicted_one_frequency(spec.bias, spec.k);
    out.z_score = z_score(out.frequency, out.predicted, out.bits);
    out.p_value = std::isfinite(out.z_score) ? std::erfc(std::fabs(out.z_score) / std::sqrt(2.0)) : 0.0;
    out.verdict = verdict_for(out.z_score);
    return out;
}

void MicroLayout::check() const {
    if(n == 0 || k == 0 || m == 0 || windows == 0 || devices < 2) {
        throw InvalidParams("micro layout needs positive n, k, m, windows and at least two devices");
    }
    if(target >= pair_count()) {
        throw InvalidParams("target pair index out of range");
    }
    if(zero.size() != m || one.size() != m) {
        throw DimensionMismatch("challenge messages must be m bits");
    }
    if(known.size() != pair_count()) {
        throw DimensionMismatch("known traffic must list every pair");
    }
    for(const auto& per_pair : known) {
        if(per_pair.size() != windows) {
            throw DimensionMismatch("known traffic must list every window");
        }
        for(const auto& msg : per_pair) {
            if(msg.size() != m) {
                throw DimensionMismatch("known messages must be m bits");
            }
        }
    }
}

MicroLayout random_layout(const LabParams& params, RandomSource& rng) {
    params.check();
    MicroLayout out;
    out.n = params.n;
    out.k = params.k;
    out.m = params.m;
    out.devices = params.devices;
    out.windows = params.eta_max;
    out.target = static_cast<std::size_t>(rng.uniform_below(out.pair_count()));
    out.zero = random_message(rng, out.m);
    do {
        out.one = random_message(rng, out.m);
    } while(out.one == out.zero);
    out.known.resize(out.pair_count());
    for(auto& per_pair : out.known) {
        for(std::uint64_t w = 0; w < out.windows; ++w) {
            per_pair.push_back(random_message(rng, out.m));
        }
    }
    return out;
}

namespace {

// Reduced row echelon basis of the span of `vectors`, as a canonical sorted list.
std::vector<std::uint64_t> canonical_span(std::span<const std::uint64_t> vectors, unsigned width) {
    std::vector<std::uint64_t> pivot(width, 0);
    for(std::uint64_t v : vectors) {
        for(unsigned b = width; b-- > 0 && v;) {
            if(!((v >> b) & 1)) {
                continue;
            }
            if(pivot[b]) {
                v ^= pivot[b];
            } else {
                pivot[b] = v;
                v = 0;
            }
        }
    }
    for(unsigned p = 0; p < width; ++p) {
        if(!pivot[p]) {
            continue;
        }
        for(unsigned q = p + 1; q < width; ++q) {
            if((pivot[q] >> p) & 1) {
                pivot[q] ^= pivot[p];
            }
        }
    }
    std::vector<std::uint64_t> out;
    for(const auto v : pivot) {
        if(v) {
            out.push_back(v);
        }
    }
    return out;
}

}  // namespace

GameResult exact_bayes_advantage(const MicroLayout& layout, GameMethod method) {
    layout.check();
    const std::uint64_t n = layout.n;
    const std::uint64_t k = layout.k;
    const std::uint64_t m = layout.m;
    const std::uint64_t windows = layout.windows;
    const std::uint64_t pairs = layout.pair_count();
    const std::uint64_t width = pairs * windows * m;
    if(width > 24) {
        throw SearchBudgetExceeded("transcript of " + std::to_string(width) + " bits is too long to tabulate");
    }
    const auto tuples = checked_pow(n, k * pairs, std::uint64_t{1} << 26);
    if(!tuples) {
        throw SearchBudgetExceeded("too many key tuples for exact enumeration");
    }

    // Transcript bit (p, w, i) sits at (p * windows + w) * m + i.
    std::vector<std::uint64_t> weight(std::size_t{1} << width, 0);
    std::vector<std::uint64_t> digits(k * pairs, 0);
    auto column = [&](std::uint64_t p, std::uint64_t w, std::uint64_t i, std::uint64_t r) {
        return add_mod(add_mod(digits[p * k + r], window_offset(n, m, w + 1), n), i % n, n);
    };

    if(method == GameMethod::subspace) {
        std::map<std::vector<std::uint64_t>, std::uint64_t> images;
        std::vector<std::pair<std::uint64_t, std::uint64_t>> touches;
        std::vector<std::uint64_t> masks;
        for(std::uint64_t t = 0; t < *tuples; ++t, advance(digits, n)) {
            touches.clear();
            for(std::uint64_t p = 0; p < pairs; ++p) {
                for(std::uint64_t w = 0; w < windows; ++w) {
                    for(std::uint64_t i = 0; i < m; ++i) {
                        const std::uint64_t bit = (p * windows + w) * m + i;
                        for(std::uint64_t r = 0; r < k; ++r) {
                            touches.emplace_back(r * n + column(p, w, i, r), bit);
                        }
                    }
                }
            }
            std::sort(touches.begin(), touches.end());
            masks.clear();
            for(std::size_t a = 0; a < touches.size();) {
                std::uint64_t mask = 0;
                std::size_t b = a;
                for(; b < touches.size() && touches[b].first == touches[a].first; ++b) {
                    mask ^= std::uint64_t{1} << touches[b].second;
                }
                masks.push_back(mask);
                a = b;
            }
            ++images[canonical_span(masks, static_cast<unsigned>(width))];
        }
        // Each tuple spreads its mass uniformly over its image; scale every weight by 2^width.
        for(const auto& [basis, count] : images) {
            const std::uint64_t add = count << (width - basis.size());
            std::uint64_t x = 0;
            weight[x] += add;
            for(std::uint64_t g = 1; g < (std::uint64_t{1} << basis.size()); ++g) {
                x ^= basis[static_cast<std::size_t>(std::countr_zero(g))];
                weight[x] += add;
            }
        }
    } else {
        const std::uint64_t cells = k * n;
        if(cells > 30 || (*tuples << cells) > (std::uint64_t{1} << 30)) {
            throw SearchBudgetExceeded("matrices x key tuples exceeds 2^30");
        }
        for(std::uint64_t t = 0; t < *tuples; ++t, advance(digits, n)) {
            std::vector<std::uint64_t> cell_of(width * k);
            for(std::uint64_t p = 0; p < pairs; ++p) {
                for(std::uint64_t w = 0; w < windows; ++w) {
                    for(std::uint64_t i = 0; i < m; ++i) {
                        for(std::uint64_t r = 0; r < k; ++r) {
                            cell_of[((p * windows + w) * m + i) * k + r] = r * n + column(p, w, i, r);
                        }
                    }
                }
            }
            for(std::uint64_t alpha = 0; alpha < (std::uint64_t{1} << cells); ++alpha) {
                std::uint64_t x = 0;
                for(std::uint64_t bit = 0; bit < width; ++bit) {
                    std::uint64_t v = 0;
                    for(std::uint64_t r = 0; r < k; ++r) {
                        v ^= (alpha >> cell_of[bit * k + r]) & 1;
                    }
                    x |= v << bit;
                }
                ++weight[x];
            }
        }
    }

    std::uint64_t delta = 0;
    for(std::uint64_t i = 0; i < m; ++i) {
        if(layout.zero.test(i) != layout.one.test(i)) {
            delta |= std::uint64_t{1} << (layout.target * windows * m + i);
        }
    }
    // The known traffic shifts both transcript distributions alike and drops out of the distance.
    BigInt distance(0);
    BigInt total(0);
    for(std::uint64_t x = 0; x < weight.size(); ++x) {
        const std::uint64_t a = weight[x];
        const std::uint64_t b = weight[x ^ delta];
        distance += BigInt(a > b ? a - b : b - a);
        total += BigInt(a);
    }

    GameResult out;
    out.advantage_exact = Rational(distance, 2 * total);
    out.advantage = to_double(out.advantage_exact);

    SystemParams sys;
    sys.n = n;
    sys.k = k;
    sys.m = m;
    sys.devices = layout.devices;
    sys.eta_max = windows;
    sys.lambda = 1;
    if(sys.validate()) {
        out.bound = advantage_bound(sys, true).bound;
        out.bound_below_one = *out.bound < 1;
        out.dominated = !out.bound_below_one || Real(out.advantage_exact) <= *out.bound;
    }
    return out;
}

std::string estimator_csv_header() {
    return "operation,params,trials,estimate,analytic,z_score,verdict";
}

std::string estimator_csv_row(std::string_view operation, std::string_view params, std::uint64_t trials,
                              double estimate, double analytic, double z, Verdict verdict) {
    char numbers[96];
    std::snprintf(numbers, sizeof numbers, "%.10g,%.10g,%.6g", estimate, analytic, z);
    std::string out(operation);
    out += ",\"";
    out += params;
    out += "\",";
    out += std::to_string(trials);
    out += ',';
    out += numbers;
    out += ',';
    out += to_string(verdict);
    return out;
}

}  // namespace mpad
