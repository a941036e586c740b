#include <mpad/analytics.hpp>

#include <mpad/error.hpp>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <string>
#include <utility>

namespace mpad {

namespace {

unsigned initial_precision() {
    if(const char* env = std::getenv("MPAD_PRECISION_BITS")) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if(end != env && *end == '\0' && v > 0) {
            return static_cast<unsigned>(std::max(64ul, std::min(v, 1ul << 20)));
        }
    }
    return 256;
}

unsigned& precision_slot() {
    static unsigned bits = initial_precision();
    return bits;
}

unsigned digits10_for(unsigned bits) {
    return static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 1;
}

// Exact evaluation is skipped when the rational would need more than this many bits.
constexpr std::uint64_t exact_bit_limit = std::uint64_t{1} << 24;

bool is_power_of_two(std::uint64_t n) {
    return n != 0 && std::has_single_bit(n);
}

BigInt to_big(std::uint64_t v) {
    return BigInt(v);
}

Real to_real(const BigInt& v) {
    return Real(v);
}

constexpr std::array<std::pair<Metric, std::string_view>, 7> metric_names = {{
    {Metric::advantage_multi, "advantage_bound_log2"},
    {Metric::advantage_single, "advantage_single_bound_log2"},
    {Metric::device_gain, "device_gain"},
    {Metric::system_gain, "system_gain"},
    {Metric::pair_capacity, "pair_capacity_bits"},
    {Metric::max_eta, "max_eta"},
    {Metric::expected_trials, "expected_trials_log2"},
}};

GainReport make_gain(const SystemParams& p, const BigInt& keys) {
    PrecisionGuard guard;
    GainReport out;
    out.numerator_bits = keys * to_big(p.m) * to_big(p.eta_max);
    const BigInt kn = to_big(p.k) * to_big(p.n);
    out.denominator_bits = to_real(keys * to_big(p.k)) * log2_of(p.n) + to_real(kn);
    if(is_power_of_two(p.n)) {
        const auto log_n = static_cast<std::uint64_t>(std::countr_zero(p.n));
        const BigInt den = keys * to_big(p.k) * to_big(log_n) + kn;
        out.exact = Rational(out.numerator_bits, den);
        out.gain = Real(*out.exact);
    } else {
        out.gain = to_real(out.numerator_bits) / out.denominator_bits;
    }
    return out;
}

}  // namespace

unsigned precision_bits() {
    return precision_slot();
}

void set_precision_bits(unsigned bits) {
    precision_slot() = std::max(64u, bits);
}

PrecisionGuard::PrecisionGuard() : m_saved(Real::default_precision()) {
    Real::default_precision(digits10_for(precision_bits()));
}

PrecisionGuard::~PrecisionGuard() {
    Real::default_precision(m_saved);
}

std::uint64_t SystemParams::lambda_of(DevicePair pair) const {
    const auto it = lambda_overrides.find(pair);
    return it == lambda_overrides.end() ? lambda : it->second;
}

BigInt SystemParams::pair_count() const {
    const BigInt u = to_big(devices);
    return u * (u - 1) / 2;
}

BigInt SystemParams::total_keys() const {
    BigInt total = pair_count() * to_big(lambda);
    for(const auto& [pair, count] : lambda_overrides) {
        total += to_big(count);
        total -= to_big(lambda);
    }
    return total;
}

BigInt SystemParams::keys_of(DeviceId device) const {
    BigInt total = devices > 0 ? to_big(devices - 1) * to_big(lambda) : BigInt(0);
    for(const auto& [pair, count] : lambda_overrides) {
        if(pair.contains(device)) {
            total += to_big(count);
            total -= to_big(lambda);
        }
    }
    return total;
}

ParamReport SystemParams::validate() const {
    ParamReport report = validate_params(n, k, m, eta_max);
    if(devices < 2) {
        report.violations.emplace_back("U>=2");
    }
    bool lambda_ok = lambda >= 1;
    bool pairs_ok = true;
    for(const auto& [pair, count] : lambda_overrides) {
        lambda_ok = lambda_ok && count >= 1;
        pairs_ok = pairs_ok && pair.low < pair.high && pair.high < devices;
    }
    if(!lambda_ok) {
        report.violations.emplace_back("lambda>=1");
    }
    if(!pairs_ok) {
        report.violations.emplace_back("pair-in-fleet");
    }
    report.valid = report.violations.empty();
    return report;
}

void SystemParams::require_valid() const {
    const ParamReport report = validate();
    if(!report) {
        throw InvalidParams(report.describe());
    }
}

Real log2_of(std::uint64_t n) {
    PrecisionGuard guard;
    if(is_power_of_two(n)) {
        return Real(std::countr_zero(n));
    }
    return boost::multiprecision::log2(Real(n));
}

BoundReport advantage_bound(const SystemParams& params, bool multi) {
    params.require_valid();
    PrecisionGuard guard;
    BoundReport out;
    out.windows = multi ? params.eta_max : 1;
    out.effective_W = params.total_keys();

    const std::uint64_t span = 2 * out.windows * params.m - 1;
    out.term_collision = boost::multiprecision::pow(Real(span) / Real(params.n), Real(params.k));
    out.term_coincidence = boost::multiprecision::ldexp(Real(out.windows), -static_cast<long>(params.m));
    out.bound = 2 * to_real(out.effective_W) * (out.term_collision + out.term_coincidence);
    out.log2_bound = boost::multiprecision::log2(out.bound);
    out.vacuous = out.bound >= 1;

    const std::uint64_t collision_bits = params.k * static_cast<std::uint64_t>(std::bit_width(params.n));
    if(params.m <= exact_bit_limit && params.k <= exact_bit_limit / 64 && collision_bits <= exact_bit_limit) {
        out.exact = advantage_bound_exact(params, multi);
    }
    return out;
}

Rational advantage_bound_exact(const SystemParams& params, bool multi) {
    params.require_valid();
    const std::uint64_t windows = multi ? params.eta_max : 1;
    const std::uint64_t span = 2 * windows * params.m - 1;
    const auto k = static_cast<unsigned>(params.k);
    const Rational collision(boost::multiprecision::pow(to_big(span), k),
                             boost::multiprecision::pow(to_big(params.n), k));
    BigInt two_m(1);
    two_m <<= static_cast<unsigned>(params.m);
    const Rational coincidence(to_big(windows), two_m);
    return Rational(2 * params.total_keys()) * (collision + coincidence);
}

GainReport device_secrecy_gain(const SystemParams& params, DeviceId device) {
    params.require_valid();
    if(device >= params.devices) {
        throw UnknownDevice("device " + std::to_string(device) + " is not in a fleet of " +
                            std::to_string(params.devices));
    }
    return make_gain(params, params.keys_of(device));
}

GainReport system_secrecy_gain(const SystemParams& params) {
    params.require_valid();
    return make_gain(params, params.total_keys());
}

BigInt pair_capacity_bits(const SystemParams& params) {
    params.require_valid();
    return to_big(params.lambda) * to_big(params.m) * to_big(params.eta_max);
}

BigInt pair_capacity_bits(const SystemParams& params, DevicePair pair) {
    params.require_valid();
    return to_big(params.lambda_of(pair)) * to_big(params.m) * to_big(params.eta_max);
}

std::uint64_t max_eta(std::uint64_t n, std::uint64_t m) {
    if(n == 0 || m == 0) {
        throw InvalidParams("max_eta needs positive n and m");
    }
    return half_group(n) / m;
}

RecoveryCost key_recovery_cost(std::uint64_t n, std::uint64_t k, std::uint64_t m) {
    if(n == 0 || k == 0 || m == 0) {
        throw InvalidParams("key_recovery_cost needs positive n, k and m");
    }
    PrecisionGuard guard;
    RecoveryCost out;
    out.keyspace_log2 = Real(k) * log2_of(n);
    out.expected_trials_log2 = out.keyspace_log2 - 1;
    out.success_prob_lower = 1 - boost::multiprecision::ldexp(Real(1), -static_cast<long>(m));
    return out;
}

std::string metric_name(Metric metric) {
    for(const auto& [id, name] : metric_names) {
        if(id == metric) {
            return std::string(name);
        }
    }
    return "unknown";
}

std::optional<Metric> parse_metric(std::string_view name) {
    for(const auto& [id, label] : metric_names) {
        if(label == name) {
            return id;
        }
    }
    static constexpr std::array<std::pair<std::string_view, Metric>, 7> aliases = {{
        {"advantage", Metric::advantage_multi},
        {"advantage-single", Metric::advantage_single},
        {"device-gain", Metric::device_gain},
        {"system-gain", Metric::system_gain},
        {"capacity", Metric::pair_capacity},
        {"max-eta", Metric::max_eta},
        {"recovery", Metric::expected_trials},
    }};
    for(const auto& [alias, id] : aliases) {
        if(alias == name) {
            return id;
        }
    }
    return std::nullopt;
}

std::vector<SweepRow> sweep(const SweepRange& range, Metric metric) {
    PrecisionGuard guard;
    std::vector<SweepRow> rows;
    for(const auto n : range.n) {
        for(const auto k : range.k) {
            for(const auto m : range.m) {
                for(const auto u : range.devices) {
                    for(const auto eta : range.eta_max) {
                        for(const auto lambda : range.lambda) {
                            SweepRow row;
                            row.params.n = n;
                            row.params.k = k;
                            row.params.m = m;
                            row.params.devices = u;
                            row.params.eta_max = eta;
                            row.params.lambda = lambda;
                            const ParamReport report = row.params.validate();
                            row.valid = report.valid;
                            if(!row.valid) {
                                row.violations = report.describe();
                                rows.push_back(std::move(row));
                                continue;
                            }
                            switch(metric) {
                            case Metric::advantage_multi:
                                row.value = advantage_bound(row.params, true).log2_bound;
                                break;
                            case Metric::advantage_single:
                                row.value = advantage_bound(row.params, false).log2_bound;
                                break;
                            case Metric::device_gain:
                                row.value = device_secrecy_gain(row.params, 0).gain;
                                break;
                            case Metric::system_gain:
                                row.value = system_secrecy_gain(row.params).gain;
                                break;
                            case Metric::pair_capacity:
                                row.value = Real(pair_capacity_bits(row.params));
                                break;
                            case Metric::max_eta:
                                row.value = Real(max_eta(n, m));
                                break;
                            case Metric::expected_trials:
                                row.value = key_recovery_cost(n, k, m).expected_trials_log2;
                                break;
                            }
                            rows.push_back(std::move(row));
                        }
                    }
                }
            }
        }
    }
    return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows, Metric metric) {
    out << "n,k,m,U,eta_max,lambda," << metric_name(metric) << ",status\n";
    for(const auto& row : rows) {
        const auto& p = row.params;
        out << p.n << ',' << p.k << ',' << p.m << ',' << p.devices << ',' << p.eta_max << ',' << p.lambda << ',';
        if(row.valid) {
            out << format_real(row.value) << ",ok\n";
        } else {
            out << ",\"" << row.violations << "\"\n";
        }
    }
}

std::string format_real(const Real& value, int digits) {
    return value.str(digits, std::ios_base::fmtflags{});
}

}  // namespace mpad
