#include "cli.hpp"

#include <mpad/analytics.hpp>
#include <mpad/attack.hpp>
#include <mpad/bench.hpp>
#include <mpad/cipher.hpp>
#include <mpad/error.hpp>
#include <mpad/fleet.hpp>
#include <mpad/matrix.hpp>
#include <mpad/random.hpp>
#include <mpad/wire.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace mpad::cli {

namespace {

namespace fs = std::filesystem;

// Bad flag values are usage errors even though the core reports them as format errors.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::uint64_t count_flag(const std::string& flag, const std::string& text) {
    try {
        return parse_count(text);
    } catch(const FormatError& e) {
        throw UsageError(flag + ": " + e.what());
    }
}

std::vector<std::uint64_t> count_list(const std::string& flag, const std::vector<std::string>& texts) {
    std::vector<std::uint64_t> out;
    out.reserve(texts.size());
    for(const auto& t : texts) {
        out.push_back(count_flag(flag, t));
    }
    return out;
}

double real_flag(const std::string& flag, const std::string& text) {
    std::size_t used = 0;
    double value = 0;
    try {
        value = std::stod(text, &used);
    } catch(const std::exception&) {
        used = 0;
    }
    if(used != text.size() || text.empty()) {
        throw UsageError(flag + ": not a number: " + text);
    }
    return value;
}

RandomSource make_rng(const std::string& seed) {
    return seed.empty() ? RandomSource::os_entropy() : RandomSource::seeded(count_flag("--seed", seed));
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
    if(path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if(!file) {
        throw FormatError("cannot write " + path);
    }
    file << text;
    if(!file) {
        throw FormatError("failed writing " + path);
    }
}

DevicePair pair_flag(const std::string& text) {
    const auto comma = text.find(',');
    if(comma == std::string::npos) {
        throw UsageError("--pair: expected q,l");
    }
    const auto q = count_flag("--pair", text.substr(0, comma));
    const auto l = count_flag("--pair", text.substr(comma + 1));
    if(q == l || std::max(q, l) > std::numeric_limits<DeviceId>::max()) {
        throw UsageError("--pair: need two distinct 32-bit device ids");
    }
    return DevicePair::of(static_cast<DeviceId>(q), static_cast<DeviceId>(l));
}

struct Flags {
    std::string n, k, m, eta_max, devices, lambda, seed, trials, out;
    std::vector<std::string> n_list, k_list, m_list, devices_list, eta_list, lambda_list;
};

// ---- keygen ------------------------------------------------------------------------------

struct KeygenArgs {
    std::string matrix;
    std::string pair = "0,1";
    std::string slot = "0";
};

int cmd_keygen(const Flags& f, const KeygenArgs& a, std::ostream& out) {
    RandomSource rng = make_rng(f.seed);
    const fs::path dir(f.out);
    fs::create_directories(dir);

    std::optional<RandomMatrix> matrix;
    if(!a.matrix.empty()) {
        matrix = parse_matrix(read_file(a.matrix));
    } else {
        if(f.n.empty() || f.k.empty()) {
            throw UsageError("keygen needs --n and --k, or --matrix");
        }
        const MatrixSpec spec{count_flag("--k", f.k), count_flag("--n", f.n), 0.5};
        if(spec.n < 2) {
            throw InvalidParams("n must be at least 2");
        }
        spec.check();
        matrix = generate_matrix(spec, rng);
    }
    const MatrixSpec spec = matrix->spec();
    if(!f.m.empty()) {
        require_valid_params(spec.n, spec.k, count_flag("--m", f.m),
                             f.eta_max.empty() ? 1 : count_flag("--eta-max", f.eta_max));
    }

    const DevicePair pair = pair_flag(a.pair);
    const auto slot = count_flag("--slot", a.slot);
    if(slot > std::numeric_limits<SlotId>::max()) {
        throw UsageError("--slot: must fit in 16 bits");
    }
    const PairwiseKey key = generate_pairwise_key(spec, pair, static_cast<SlotId>(slot), rng);

    if(a.matrix.empty()) {
        const fs::path matrix_path = dir / "matrix.mpad";
        write_file(matrix_path, serialize(*matrix));
        out << matrix_path.string() << '\n';
    }
    const fs::path key_path =
        dir / ("key-" + std::to_string(pair.low) + "-" + std::to_string(pair.high) + "-" + std::to_string(slot) + ".mpad");
    write_file(key_path, serialize(key));
    out << key_path.string() << '\n';
    return exit_ok;
}

// ---- encrypt / decrypt -------------------------------------------------------------------

struct CipherArgs {
    std::string matrix, key, in, eta = "1";
};

int cmd_encrypt(const Flags& f, const CipherArgs& a) {
    const RandomMatrix matrix = parse_matrix(read_file(a.matrix));
    const PairwiseKey key = parse_key(read_file(a.key));
    const auto bytes = read_file(a.in);
    std::uint64_t m = 8 * bytes.size();
    if(!f.m.empty()) {
        const auto requested = count_flag("--m", f.m);
        if(requested > m) {
            throw DimensionMismatch("--m exceeds the input length of " + std::to_string(m) + " bits");
        }
        m = requested;
    }
    const Message message = BitVector::from_bytes(bytes, m);
    const auto eta = count_flag("--eta", a.eta);
    const auto eta_max = f.eta_max.empty() ? eta : count_flag("--eta-max", f.eta_max);
    write_file(f.out, serialize(encrypt(matrix, key, message, eta, eta_max)));
    return exit_ok;
}

int cmd_decrypt(const Flags& f, const CipherArgs& a) {
    const RandomMatrix matrix = parse_matrix(read_file(a.matrix));
    const PairwiseKey key = parse_key(read_file(a.key));
    const Ciphertext ct = parse_frame(read_file(a.in));
    write_file(f.out, decrypt(matrix, key, ct).to_bytes());
    return exit_ok;
}

// ---- analyze -----------------------------------------------------------------------------

struct AnalyzeArgs {
    std::string metric;
};

std::string quoted(const std::string& text) {
    return "\"" + text + "\"";
}

int cmd_analyze(const Flags& f, const AnalyzeArgs& a, std::ostream& out) {
    SweepRange range;
    range.n = count_list("--n", f.n_list);
    range.k = count_list("--k", f.k_list);
    range.m = count_list("--m", f.m_list);
    range.devices = count_list("--devices", f.devices_list);
    range.eta_max = f.eta_list.empty() ? std::vector<std::uint64_t>{1} : count_list("--eta-max", f.eta_list);
    range.lambda = f.lambda_list.empty() ? std::vector<std::uint64_t>{1} : count_list("--lambda", f.lambda_list);

    const PrecisionGuard precision;
    std::ostringstream csv;
    if(!a.metric.empty()) {
        const auto metric = parse_metric(a.metric);
        if(!metric) {
            throw UsageError("--metric: unknown metric " + a.metric);
        }
        write_sweep_csv(csv, sweep(range, *metric), *metric);
        emit(f.out, csv.str(), out);
        return exit_ok;
    }

    csv << "n,k,m,U,eta_max,lambda,advantage_bound_log2,advantage_single_bound_log2,device_gain,system_gain,"
           "pair_capacity_bits,pair_capacity_bytes,max_eta,expected_trials_log2,status\n";
    for(const auto& row : sweep(range, Metric::max_eta)) {
        const SystemParams& p = row.params;
        csv << p.n << ',' << p.k << ',' << p.m << ',' << p.devices << ',' << p.eta_max << ',' << p.lambda << ',';
        if(!row.valid) {
            csv << ",,,,,,,," << quoted(row.violations) << '\n';
            continue;
        }
        const BigInt capacity = pair_capacity_bits(p);
        csv << format_real(advantage_bound(p, true).log2_bound) << ','
            << format_real(advantage_bound(p, false).log2_bound) << ','
            << format_real(device_secrecy_gain(p, 0).gain) << ',' << format_real(system_secrecy_gain(p).gain) << ','
            << capacity.str() << ',' << BigInt(capacity / 8).str() << ',' << max_eta(p.n, p.m) << ','
            << format_real(key_recovery_cost(p.n, p.k, p.m).expected_trials_log2) << ",ok\n";
    }
    emit(f.out, csv.str(), out);
    return exit_ok;
}

// ---- simulate ----------------------------------------------------------------------------

struct SimulateArgs {
    std::string scenario;
};

int cmd_simulate(const Flags& f, const SimulateArgs& a, std::ostream& out) {
    const auto bytes = read_file(a.scenario);
    const std::string text(bytes.begin(), bytes.end());
    ScenarioReport report = run_scenario(text, fs::path(a.scenario).parent_path());

    std::ostringstream csv;
    csv << "sender,receiver,slot,eta,timestamp,delivered\n";
    std::size_t mismatches = 0;
    for(std::size_t i = 0; i < report.deliveries.size(); ++i) {
        const auto& d = report.deliveries[i];
        const bool ok = d.plaintext == report.sent[i];
        mismatches += !ok;
        csv << d.sender << ',' << d.receiver << ',' << d.slot << ',' << d.eta << ',' << d.timestamp << ','
            << (ok ? "match" : "mismatch") << '\n';
    }
    std::size_t frames = 0;
    std::size_t duplicates = 0;
    if(report.fleet) {
        frames = report.fleet->eavesdrop().size();
        duplicates = duplicate_windows(report.fleet->eavesdrop());
    }
    csv << "# commands=" << report.commands << " expected_errors=" << report.expected_errors << " frames=" << frames
        << " duplicate_windows=" << duplicates << '\n';
    out << csv.str();
    if(!f.out.empty()) {
        if(!report.fleet) {
            throw ScenarioFailure("scenario never provisioned a fleet, nothing to dump");
        }
        write_file(f.out, report.fleet->eavesdrop().dump());
    }
    return mismatches || duplicates ? exit_operational : exit_ok;
}

// ---- attack ------------------------------------------------------------------------------

struct AttackArgs {
    std::string estimator;
    std::string bias = "0.5";
    std::string layouts = "20";
    bool multi = false;
};

LabParams lab_params(const Flags& f) {
    if(f.n.empty() || f.k.empty() || f.m.empty()) {
        throw UsageError("attack needs --n, --k and --m");
    }
    LabParams p;
    p.n = count_flag("--n", f.n);
    p.k = count_flag("--k", f.k);
    p.m = count_flag("--m", f.m);
    p.eta_max = f.eta_max.empty() ? 1 : count_flag("--eta-max", f.eta_max);
    p.devices = f.devices.empty() ? 2 : count_flag("--devices", f.devices);
    p.check();
    return p;
}

int cmd_attack(const Flags& f, const AttackArgs& a, std::ostream& out, std::ostream& err) {
    const LabParams p = lab_params(f);
    RandomSource rng = make_rng(f.seed);
    const std::uint64_t trials = f.trials.empty() ? 100000 : count_flag("--trials", f.trials);
    const std::string desc = p.describe();

    std::vector<std::string> rows;
    bool hard_fail = false;
    auto add = [&](std::string_view op, std::string_view params, std::uint64_t t, double estimate, double analytic,
                   double z, Verdict v) {
        rows.push_back(estimator_csv_row(op, params, t, estimate, analytic, z, v));
        hard_fail = hard_fail || v == Verdict::fail;
    };

    const PrecisionGuard precision;
    const std::string& e = a.estimator;
    if(e == "collision") {
        const auto c = collision_probability_mc(p, trials, rng, a.multi);
        add(a.multi ? "collision-multi" : "collision", desc, c.trials, c.estimate, c.analytic, c.z_score, c.verdict);
    } else if(e == "collision-exact") {
        const auto exact = collision_probability_exact(p, a.multi);
        const Rational analytic = collision_probability_analytic(p, a.multi);
        const bool same = exact.value() == analytic;
        add("collision-exact", desc, static_cast<std::uint64_t>(exact.total), static_cast<double>(exact.value()),
            static_cast<double>(analytic), 0.0, same ? Verdict::pass : Verdict::fail);
    } else if(e == "otp-failure") {
        const auto r = one_time_pad_failure_mc(p, trials, rng);
        add("otp-failure", desc, r.counts.trials, r.estimate.estimate, r.union_bound, r.estimate.z_score,
            r.within_bound ? Verdict::pass : Verdict::fail);
        err << "# window=" << r.counts.window << " cross_key=" << r.counts.cross_key
            << " same_key=" << r.counts.same_key << " system_failure=" << r.counts.system_failure << '\n';
    } else if(e == "otp-failure-exact") {
        const auto r = one_time_pad_failure_exact(p);
        const Rational bound = otp_union_bound(p);
        add("otp-failure-exact", desc, 0, static_cast<double>(r.failure), static_cast<double>(bound), 0.0,
            r.failure <= bound ? Verdict::pass : Verdict::fail);
    } else if(e == "frequency") {
        const double bias = real_flag("--bias", a.bias);
        const auto r = keystream_frequency_test(MatrixSpec{p.k, p.n, bias}, trials, rng);
        add("frequency", desc + " bias=" + a.bias, r.bits, r.frequency, r.predicted, r.z_score, r.verdict);
    } else if(e == "brute-force") {
        const auto r = brute_force_study(p, trials, rng);
        const double space = 2 * r.expected_trials - 1;
        const double sigma = std::sqrt((space * space - 1) / 12 / static_cast<double>(r.instances));
        const double z = sigma > 0 ? (r.mean_trials - r.expected_trials) / sigma : 0.0;
        Verdict v = verdict_for(z);
        if(r.recovered != r.instances) {
            v = Verdict::fail;
        }
        add("brute-force", desc, r.instances, r.mean_trials, r.expected_trials, z, v);
        err << "# recovered=" << r.recovered << " instances_with_false=" << r.instances_with_false
            << " false_candidates=" << r.false_candidates << '\n';
    } else if(e == "game") {
        const auto layouts = count_flag("--layouts", a.layouts);
        for(std::uint64_t i = 0; i < layouts; ++i) {
            const MicroLayout layout = random_layout(p, rng);
            const GameResult g = exact_bayes_advantage(layout);
            const double bound = g.bound ? static_cast<double>(*g.bound) : std::numeric_limits<double>::quiet_NaN();
            const Verdict v = !g.dominated ? Verdict::fail : (g.bound_below_one ? Verdict::pass : Verdict::warn);
            add("game", desc + " layout=" + std::to_string(i), 1, g.advantage, bound, 0.0, v);
        }
    } else {
        throw UsageError("unknown estimator " + e);
    }

    std::string csv = estimator_csv_header() + "\n";
    for(const auto& r : rows) {
        csv += r + "\n";
    }
    emit(f.out, csv, out);
    return hard_fail ? exit_hard_fail : exit_ok;
}

// ---- bench -------------------------------------------------------------------------------

struct BenchArgs {
    std::string kind;
    std::vector<std::string> zero_fractions = {"0.01", "0.5", "0.99"};
};

int cmd_bench(const Flags& f, const BenchArgs& a, std::ostream& out) {
    RandomSource rng = make_rng(f.seed);
    std::ostringstream csv;
    if(a.kind == "avalanche") {
        AvalancheParams p;
        if(!f.n_list.empty()) {
            p.n = count_flag("--n", f.n_list.front());
        }
        if(!f.k_list.empty()) {
            p.k = count_flag("--k", f.k_list.front());
        }
        if(!f.m_list.empty()) {
            p.m = count_flag("--m", f.m_list.front());
        }
        std::vector<double> fractions;
        for(const auto& z : a.zero_fractions) {
            fractions.push_back(real_flag("--zero-fractions", z));
        }
        const auto trials = f.trials.empty() ? 10 : count_flag("--trials", f.trials);
        write_avalanche_csv(csv, avalanche_bench(p, fractions, trials, rng));
    } else if(a.kind == "runtime") {
        RuntimeGrid grid;
        if(!f.n_list.empty()) {
            grid.n = count_flag("--n", f.n_list.front());
        }
        if(!f.k_list.empty()) {
            grid.k = count_list("--k", f.k_list);
        }
        if(!f.m_list.empty()) {
            grid.m = count_list("--m", f.m_list);
        }
        const auto reps = f.trials.empty() ? 21 : count_flag("--trials", f.trials);
        write_runtime_csv(csv, runtime_bench(grid, reps, rng));
    } else {
        throw UsageError("unknown bench " + a.kind + " (avalanche or runtime)");
    }
    emit(f.out, csv.str(), out);
    return exit_ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Shared-matrix one-time pad toolkit", "mpad"};
    app.require_subcommand(1);

    Flags f;
    auto scalar_flags = [&](CLI::App* sub, bool m_flag) {
        sub->add_option("--n", f.n, "Matrix columns (group order)");
        sub->add_option("--k", f.k, "Matrix rows (security parameter)");
        if(m_flag) {
            sub->add_option("--m", f.m, "Message length in bits");
        }
        sub->add_option("--eta-max", f.eta_max, "Windows per key");
        sub->add_option("--seed", f.seed, "Deterministic seed");
    };

    KeygenArgs keygen_args;
    auto* keygen = app.add_subcommand("keygen", "Write a matrix file and a pairwise key file");
    scalar_flags(keygen, true);
    keygen->add_option("--out", f.out, "Output directory")->required();
    keygen->add_option("--matrix", keygen_args.matrix, "Reuse this matrix file");
    keygen->add_option("--pair", keygen_args.pair, "Device pair q,l");
    keygen->add_option("--slot", keygen_args.slot, "Key slot");

    CipherArgs enc_args;
    auto* enc = app.add_subcommand("encrypt", "Encrypt a file into a frame");
    enc->add_option("--matrix", enc_args.matrix)->required();
    enc->add_option("--key", enc_args.key)->required();
    enc->add_option("--in", enc_args.in)->required();
    enc->add_option("--out", f.out)->required();
    enc->add_option("--eta", enc_args.eta, "Window index, from 1");
    enc->add_option("--eta-max", f.eta_max, "Window budget of the key");
    enc->add_option("--m", f.m, "Bits of the input to encrypt (default: all)");

    CipherArgs dec_args;
    auto* dec = app.add_subcommand("decrypt", "Decrypt a frame");
    dec->add_option("--matrix", dec_args.matrix)->required();
    dec->add_option("--key", dec_args.key)->required();
    dec->add_option("--in", dec_args.in)->required();
    dec->add_option("--out", f.out)->required();

    AnalyzeArgs analyze_args;
    auto* analyze = app.add_subcommand("analyze", "Advantage bounds and secrecy gains as CSV");
    analyze->add_option("--n", f.n_list)->required()->delimiter(',');
    analyze->add_option("--k", f.k_list)->required()->delimiter(',');
    analyze->add_option("--m", f.m_list)->required()->delimiter(',');
    analyze->add_option("--devices", f.devices_list)->required()->delimiter(',');
    analyze->add_option("--eta-max", f.eta_list)->delimiter(',');
    analyze->add_option("--lambda", f.lambda_list)->delimiter(',');
    analyze->add_option("--metric", analyze_args.metric, "Single metric sweep");
    analyze->add_option("--out", f.out, "CSV path (default: stdout)");

    SimulateArgs simulate_args;
    auto* simulate = app.add_subcommand("simulate", "Run a fleet scenario file");
    simulate->add_option("scenario", simulate_args.scenario)->required();
    simulate->add_option("--out", f.out, "Write the eavesdropper transcript here");

    AttackArgs attack_args;
    auto* attack = app.add_subcommand("attack", "Attack-lab estimators as CSV");
    attack->add_option("estimator", attack_args.estimator,
                       "collision, collision-exact, otp-failure, otp-failure-exact, frequency, brute-force, game")
        ->required();
    scalar_flags(attack, true);
    attack->add_option("--devices", f.devices);
    attack->add_option("--trials", f.trials, "Trials, bits or instances");
    attack->add_option("--bias", attack_args.bias, "Matrix bias for the frequency test");
    attack->add_option("--layouts", attack_args.layouts, "Layouts for the game");
    attack->add_flag("--multi", attack_args.multi, "Use all eta_max windows");
    attack->add_option("--out", f.out, "CSV path (default: stdout)");

    BenchArgs bench_args;
    auto* bench = app.add_subcommand("bench", "Avalanche or runtime benchmark as CSV");
    bench->add_option("kind", bench_args.kind, "avalanche or runtime")->required();
    bench->add_option("--n", f.n_list)->delimiter(',');
    bench->add_option("--k", f.k_list)->delimiter(',');
    bench->add_option("--m", f.m_list)->delimiter(',');
    bench->add_option("--trials", f.trials, "Trials (avalanche) or repetitions (runtime)");
    bench->add_option("--zero-fractions", bench_args.zero_fractions)->delimiter(',');
    bench->add_option("--seed", f.seed);
    bench->add_option("--out", f.out, "CSV path (default: stdout)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch(const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if(*keygen) {
            return cmd_keygen(f, keygen_args, out);
        }
        if(*enc) {
            return cmd_encrypt(f, enc_args);
        }
        if(*dec) {
            return cmd_decrypt(f, dec_args);
        }
        if(*analyze) {
            return cmd_analyze(f, analyze_args, out);
        }
        if(*simulate) {
            return cmd_simulate(f, simulate_args, out);
        }
        if(*attack) {
            return cmd_attack(f, attack_args, out, err);
        }
        return cmd_bench(f, bench_args, out);
    } catch(const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return exit_usage;
    } catch(const std::exception& e) {
        err << "error: " << error_kind(e) << ": " << e.what() << '\n';
        return exit_operational;
    }
}

}  // namespace mpad::cli
