#pragma once

#include <mpad/key.hpp>
#include <mpad/params.hpp>

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace mpad {

using BigInt = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;
using Real = boost::multiprecision::mpfr_float;

/// Working precision for Real results, in bits. Read once from MPAD_PRECISION_BITS (default 256,
/// floor 64) unless overridden with set_precision_bits().
unsigned precision_bits();
void set_precision_bits(unsigned bits);

/// Sets the default Real precision for the current thread for the lifetime of the guard.
class PrecisionGuard {
public:
    PrecisionGuard();
    ~PrecisionGuard();
    PrecisionGuard(const PrecisionGuard&) = delete;
    PrecisionGuard& operator=(const PrecisionGuard&) = delete;

private:
    unsigned m_saved;
};

/// Fleet-wide parameters. `lambda` is the key count of every pair not listed in `lambda_overrides`.
struct SystemParams {
    std::uint64_t n = 0;
    std::uint64_t k = 0;
    std::uint64_t m = 0;
    std::uint64_t devices = 0;
    std::uint64_t eta_max = 1;
    std::uint64_t lambda = 1;
    std::map<DevicePair, std::uint64_t> lambda_overrides;

    std::uint64_t lambda_of(DevicePair pair) const;
    /// (U^2 - U) / 2
    BigInt pair_count() const;
    /// Sum of key counts over all pairs.
    BigInt total_keys() const;
    /// Sum of key counts over the pairs containing `device`.
    BigInt keys_of(DeviceId device) const;

    ParamReport validate() const;
    /// Throws InvalidParams.
    void require_valid() const;
};

struct BoundReport {
    Real bound;
    Real log2_bound;
    Real term_collision;    // (2Em - 1)^k / n^k
    Real term_coincidence;  // E / 2^m
    BigInt effective_W;
    std::uint64_t windows = 1;  // E
    std::optional<Rational> exact;
    bool vacuous = false;       // bound >= 1
};

/// 2 * W_eff * ((2Em - 1)^k / n^k + E / 2^m), with E = eta_max when `multi`, else 1.
BoundReport advantage_bound(const SystemParams& params, bool multi);

/// The same expression in exact rational arithmetic.
Rational advantage_bound_exact(const SystemParams& params, bool multi);

struct GainReport {
    BigInt numerator_bits;
    Real denominator_bits;
    Real gain;
    std::optional<Rational> exact;  // present when n is a power of two
};

/// Bits device `device` can exchange over bits it stores. Throws UnknownDevice.
GainReport device_secrecy_gain(const SystemParams& params, DeviceId device);
GainReport system_secrecy_gain(const SystemParams& params);

/// lambda * m * eta_max for `pair` (uniform lambda when omitted).
BigInt pair_capacity_bits(const SystemParams& params);
BigInt pair_capacity_bits(const SystemParams& params, DevicePair pair);

/// floor(floor((n + 1) / 2) / m)
std::uint64_t max_eta(std::uint64_t n, std::uint64_t m);

struct RecoveryCost {
    Real keyspace_log2;
    Real expected_trials_log2;
    Real success_prob_lower;
};

RecoveryCost key_recovery_cost(std::uint64_t n, std::uint64_t k, std::uint64_t m);

/// log2 n at working precision, exact for powers of two.
Real log2_of(std::uint64_t n);

enum class Metric {
    advantage_multi,
    advantage_single,
    device_gain,
    system_gain,
    pair_capacity,
    max_eta,
    expected_trials,
};

/// CSV column name; log2 quantities end in "_log2".
std::string metric_name(Metric metric);
std::optional<Metric> parse_metric(std::string_view name);

struct SweepRange {
    std::vector<std::uint64_t> n, k, m, devices, eta_max, lambda;
};

struct SweepRow {
    SystemParams params;
    bool valid = false;
    std::string violations;
    Real value;
};

/// Cartesian product of the range, n outermost. Invalid combinations become flagged rows.
std::vector<SweepRow> sweep(const SweepRange& range, Metric metric);

/// One header line then one line per row; `value` is empty and `status` names the violations
/// for invalid rows.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows, Metric metric);

/// 10 significant digits.
std::string format_real(const Real& value, int digits = 10);

}  // namespace mpad
