#pragma once

#include <mpad/analytics.hpp>
#include <mpad/cipher.hpp>
#include <mpad/key.hpp>
#include <mpad/matrix.hpp>
#include <mpad/random.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mpad {

/// Parameters for lab experiments. Only positivity is enforced, so weak and degenerate
/// settings (k >= m, windows wider than the group) can be studied.
struct LabParams {
    std::uint64_t n = 0;
    std::uint64_t k = 0;
    std::uint64_t m = 0;
    std::uint64_t eta_max = 1;
    std::uint64_t devices = 2;

    void check() const;
    std::string describe() const;
};

enum class Verdict { pass, warn, fail };

/// |z| <= 3 passes, |z| <= 4 warns, anything else fails.
Verdict verdict_for(double z_score);
std::string_view to_string(Verdict verdict);

/// (estimate - analytic) / sqrt(analytic (1 - analytic) / trials). A degenerate analytic of 0 or 1
/// gives 0 on an exact match and infinity otherwise.
double z_score(double estimate, double analytic, std::uint64_t trials);

struct KnownPlaintextPair {
    Message message;
    Ciphertext ciphertext;
};

struct CandidateSet {
    std::vector<PairwiseKey> keys;
    /// Keys examined up to and including the first hit (all keys when there is none).
    std::uint64_t trials_tested = 0;
    std::uint64_t keys_examined = 0;
};

inline constexpr std::uint64_t default_search_budget = std::uint64_t{1} << 26;

/// Tries every key of Z_n^k in lexicographic order (last component fastest) and keeps each
/// one whose keystream equals message XOR payload. Throws SearchBudgetExceeded when
/// n^k > search_budget.
CandidateSet brute_force_recover(const RandomMatrix& matrix, const KnownPlaintextPair& evidence,
                                 std::uint64_t search_budget = default_search_budget);

struct BruteForceStudy {
    std::uint64_t instances = 0;
    /// Instances whose true key was among the candidates.
    std::uint64_t recovered = 0;
    /// Instances with at least one candidate other than the true key, and their total count.
    std::uint64_t instances_with_false = 0;
    std::uint64_t false_candidates = 0;
    /// Mean lexicographic position (1-based) of the true key, i.e. trials until it is hit.
    double mean_trials = 0;
    /// (n^k + 1) / 2
    double expected_trials = 0;
};

/// Runs brute_force_recover on `instances` independent (matrix, key, message) triples with
/// window 1 and no parameter-regime check.
BruteForceStudy brute_force_study(const LabParams& params, std::uint64_t instances, RandomSource& rng);

struct CollisionEstimate {
    std::uint64_t trials = 0;
    std::uint64_t hits = 0;
    double estimate = 0;
    double analytic = 0;
    double z_score = 0;
    Verdict verdict = Verdict::pass;
};

/// CollisionEstimate from counts, with z-score and verdict filled in.
CollisionEstimate make_estimate(std::uint64_t trials, std::uint64_t hits, double analytic);

/// Both keys' windows overlap in every row: each component of (other - key) mod n lies in
/// [-(Em - 1), Em - 1] with E = windows.
bool window_event(std::span<const std::uint64_t> key, std::span<const std::uint64_t> other, std::uint64_t n,
                  std::uint64_t m, std::uint64_t windows);

/// min(2Em - 1, n)^k / n^k
Rational collision_probability_analytic(const LabParams& params, bool multi);

struct ExactProbability {
    BigInt hits;
    BigInt total;

    Rational value() const { return Rational(hits, total); }
};

/// Counts the window event over all n^(2k) ordered key pairs. Refuses more than 2^32 pairs.
ExactProbability collision_probability_exact(const LabParams& params, bool multi);

/// Monte-Carlo window-event frequency for independent uniform key pairs. Throws EstimatorRefused
/// when trials < 10^4 or the analytic probability is below 10 / trials.
CollisionEstimate collision_probability_mc(const LabParams& params, std::uint64_t trials, RandomSource& rng,
                                           bool multi);

/// One-time-pad failure counts for the target pair (0,1) in a fully provisioned fleet of
/// `devices` with one key per pair, each pair using windows 1..eta_max.
///
/// `window` counts trials where another pair's key triggers window_event against the target's.
/// `cross_key` counts trials where a target keystream equals a keystream of another pair in any
/// windows. `same_key` counts trials where two windows of the target coincide. `failure` is
/// window or cross_key; `failure_with_same_key` also admits same_key. `system_failure` is the
/// fleet-wide version: some two pairs trigger window_event or some two keystreams of different
/// pairs coincide.
struct OtpFailureCounts {
    std::uint64_t trials = 0;
    std::uint64_t window = 0;
    std::uint64_t cross_key = 0;
    std::uint64_t same_key = 0;
    std::uint64_t failure = 0;
    std::uint64_t failure_with_same_key = 0;
    std::uint64_t system_failure = 0;

    OtpFailureCounts& operator+=(const OtpFailureCounts& other);
};

struct OtpFailureReport {
    OtpFailureCounts counts;
    /// Failure frequency against the union bound W ((2Em - 1)^k / n^k + E / 2^m).
    CollisionEstimate estimate;
    double union_bound = 0;
    /// estimate <= union_bound + 3 sigma
    bool within_bound = false;
};

OtpFailureReport one_time_pad_failure_mc(const LabParams& params, std::uint64_t trials, RandomSource& rng);

/// W ((2Em - 1)^k / n^k + E / 2^m) with W = (U^2 - U) / 2. Not clamped.
Rational otp_union_bound(const LabParams& params);

struct OtpFailureExact {
    Rational failure;
    Rational failure_with_same_key;
    Rational window;
    Rational system_failure;
};

/// Exact failure probabilities over all key tuples and all matrices. For each key tuple only the
/// matrix bits the keystreams touch are enumerated. Refuses more than 2^32 evaluations.
OtpFailureExact one_time_pad_failure_exact(const LabParams& params);

struct FrequencyReport {
    std::uint64_t bits = 0;
    std::uint64_t ones = 0;
    double frequency = 0;
    double predicted = 0;
    double z_score = 0;
    /// Two-sided normal-approximation p-value of the binomial test.
    double p_value = 1;
    Verdict verdict = Verdict::pass;
};

/// (1 - (1 - 2 bias)^k) / 2
double predicted_one_frequency(double bias, std::uint64_t k);

/// Draws `sample_bits` keystream bits. Each run of at most n bits comes from a fresh matrix of
/// shape `spec` and a fresh uniform key, so every bit reads distinct matrix positions.
FrequencyReport keystream_frequency_test(const MatrixSpec& spec, std::uint64_t sample_bits, RandomSource& rng);

/// One round of the two-message game. Pairs are numbered in the order (0,1), (0,2), ..., (U-2,U-1);
/// every pair sends `windows` messages at windows 1..windows. The target pair's first window
/// carries the challenge (zero or one); everything else is known to the adversary.
struct MicroLayout {
    std::uint64_t n = 0;
    std::uint64_t k = 0;
    std::uint64_t m = 0;
    std::uint64_t devices = 2;
    std::uint64_t windows = 1;
    std::size_t target = 0;
    BitVector zero;
    BitVector one;
    /// known[p][w]: message of pair p in window w + 1. known[target][0] is ignored.
    std::vector<std::vector<BitVector>> known;

    std::size_t pair_count() const { return devices * (devices - 1) / 2; }
    void check() const;
};

/// Random target, challenge messages and known traffic.
MicroLayout random_layout(const LabParams& params, RandomSource& rng);

struct GameResult {
    Rational advantage_exact;
    double advantage = 0;
    /// advantage_bound() with U = devices, lambda = 1, eta_max = windows. Absent when those
    /// parameters are outside the valid regime.
    std::optional<Real> bound;
    bool bound_below_one = false;
    /// advantage <= bound, checked only when bound_below_one.
    bool dominated = true;
};

enum class GameMethod {
    /// Groups key tuples by the GF(2) image of their matrix-to-transcript map.
    subspace,
    /// Literal enumeration of all matrices and key tuples.
    enumerate,
};

/// Exact advantage of the optimal distinguisher: the total-variation distance between the
/// transcript distributions under the two challenge messages.
GameResult exact_bayes_advantage(const MicroLayout& layout, GameMethod method = GameMethod::subspace);

/// CSV header and row shared by every estimator.
std::string estimator_csv_header();
std::string estimator_csv_row(std::string_view operation, std::string_view params, std::uint64_t trials,
                              double estimate, double analytic, double z_score, Verdict verdict);

}  // namespace mpad
