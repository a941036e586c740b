#include <mpad/bench.hpp>

#include <mpad/cipher.hpp>
#include <mpad/error.hpp>
#include <mpad/matrix.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

namespace mpad {

namespace {

using Clock = std::chrono::steady_clock;

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : (v[h - 1] + v[h]) / 2;
}

template <typename Fn>
double time_batch(std::uint64_t batch, Fn&& fn) {
    const auto start = Clock::now();
    for(std::uint64_t i = 0; i < batch; ++i) {
        fn();
    }
    return std::chrono::duration<double>(Clock::now() - start).count() / static_cast<double>(batch);
}

}  // namespace

AvalancheReport avalanche_bench(const AvalancheParams& params, const std::vector<double>& zero_fractions,
                                std::uint64_t trials, RandomSource& rng) {
    if(params.m < 10000) {
        throw InvalidParams("avalanche bench needs m >= 10^4");
    }
    if(trials < 2) {
        throw InvalidParams("avalanche bench needs at least two trials");
    }
    require_valid_params(params.n, params.k, params.m, 2);
    const MatrixSpec spec{params.k, params.n, 0.5};
    const RandomMatrix matrix = generate_matrix(spec, rng);
    const double m = static_cast<double>(params.m);

    AvalancheReport report;
    report.trials = trials;
    double total = 0;
    for(const double f : zero_fractions) {
        if(!(f >= 0.0 && f <= 1.0)) {
            throw InvalidParams("zero fraction must lie in [0, 1]");
        }
        AvalancheRow row;
        row.zero_fraction = f;
        double sum = 0;
        double sum_sq = 0;
        double same = 0;
        for(std::uint64_t t = 0; t < trials; ++t) {
            const PairwiseKey key = generate_pairwise_key(spec, DevicePair{0, 1}, 0, rng);
            Message plain(params.m);
            rng.fill(plain, 1.0 - f);
            Message flipped = plain;
            flipped.flip(0);

            const Ciphertext base = encrypt(matrix, key, plain, 1, 2);
            const Ciphertext same_window = encrypt(matrix, key, flipped, 1, 2);
            const Ciphertext next_window = encrypt(matrix, key, flipped, 2, 2);
            const auto same_flips = hamming_distance(base.payload, same_window.payload);
            row.same_window_exact = row.same_window_exact && same_flips == 1;
            same += static_cast<double>(same_flips) / m;
            const double x = static_cast<double>(hamming_distance(base.payload, next_window.payload)) / m;
            sum += x;
            sum_sq += x * x;
        }
        const double count = static_cast<double>(trials);
        row.same_window = same / count;
        row.fresh_window_mean = sum / count;
        row.fresh_window_variance = (sum_sq - sum * sum / count) / (count - 1);
        row.expected_variance = 1.0 / (4.0 * m);
        row.variance_z =
            (row.fresh_window_variance - row.expected_variance) / (row.expected_variance * std::sqrt(2.0 / (count - 1)));
        total += sum;
        report.rows.push_back(row);
    }
    if(!zero_fractions.empty()) {
        report.mean_flip_fraction = total / static_cast<double>(trials * zero_fractions.size());
    }
    return report;
}

void write_avalanche_csv(std::ostream& out, const AvalancheReport& report) {
    out << "zero_fraction,trials,same_window_flip,fresh_window_flip,fresh_window_variance,expected_variance,"
           "variance_z\n";
    char line[256];
    for(const auto& r : report.rows) {
        std::snprintf(line, sizeof line, "%.10g,%llu,%.10g,%.10g,%.10g,%.10g,%.4g\n", r.zero_fraction,
                      static_cast<unsigned long long>(report.trials), r.same_window, r.fresh_window_mean,
                      r.fresh_window_variance, r.expected_variance, r.variance_z);
        out << line;
    }
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    LinearFit fit;
    const std::size_t count = std::min(x.size(), y.size());
    if(count < 2) {
        return fit;
    }
    double mx = 0;
    double my = 0;
    for(std::size_t i = 0; i < count; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(count);
    my /= static_cast<double>(count);
    double sxx = 0;
    double sxy = 0;
    double syy = 0;
    for(std::size_t i = 0; i < count; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if(sxx == 0) {
        fit.intercept = my;
        return fit;
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy == 0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

RuntimeReport runtime_bench(const RuntimeGrid& grid, std::uint64_t repetitions, RandomSource& rng) {
    if(grid.m.empty() || grid.k.empty()) {
        throw InvalidParams("runtime grid is empty");
    }
    if(repetitions == 0) {
        throw InvalidParams("runtime bench needs repetitions");
    }
    RuntimeReport report;
    for(const auto k : grid.k) {
        const MatrixSpec spec{k, grid.n, 0.5};
        const RandomMatrix matrix = generate_matrix(spec, rng);
        for(const auto m : grid.m) {
            require_valid_params(grid.n, k, m, 1);
            const PairwiseKey key = generate_pairwise_key(spec, DevicePair{0, 1}, 0, rng);
            Message plain(m);
            rng.fill(plain, 0.5);
            const Ciphertext ct = encrypt(matrix, key, plain, 1);

            volatile std::size_t sink = 0;
            auto enc = [&] { sink = sink + encrypt(matrix, key, plain, 1).payload.size(); };
            auto dec = [&] { sink = sink + decrypt(matrix, key, ct).size(); };

            // Grow the batch until one sample takes about 2 ms.
            std::uint64_t batch = 1;
            while(time_batch(batch, enc) * static_cast<double>(batch) < 2e-3 && batch < (std::uint64_t{1} << 24)) {
                batch *= 2;
            }
            time_batch(batch, dec);

            std::vector<double> enc_times;
            std::vector<double> dec_times;
            for(std::uint64_t r = 0; r < repetitions; ++r) {
                if(r % 2 == 0) {
                    enc_times.push_back(time_batch(batch, enc));
                    dec_times.push_back(time_batch(batch, dec));
                } else {
                    dec_times.push_back(time_batch(batch, dec));
                    enc_times.push_back(time_batch(batch, enc));
                }
            }
            RuntimeRow row;
            row.m = m;
            row.k = k;
            row.encrypt_seconds = median(enc_times);
            row.decrypt_seconds = median(dec_times);
            row.throughput_bits_per_second = static_cast<double>(m) / row.encrypt_seconds;
            report.rows.push_back(row);
        }
    }

    std::vector<double> mk, t, xm, tm, xk, tk;
    const auto k0 = *std::min_element(grid.k.begin(), grid.k.end());
    const auto m0 = *std::min_element(grid.m.begin(), grid.m.end());
    for(const auto& row : report.rows) {
        mk.push_back(static_cast<double>(row.m * row.k));
        t.push_back(row.encrypt_seconds);
        if(row.k == k0) {
            xm.push_back(static_cast<double>(row.m));
            tm.push_back(row.encrypt_seconds);
        }
        if(row.m == m0) {
            xk.push_back(static_cast<double>(row.k));
            tk.push_back(row.encrypt_seconds);
        }
    }
    report.fit_mk = fit_line(mk, t);
    report.fit_m = fit_line(xm, tm);
    report.fit_k = fit_line(xk, tk);
    return report;
}

void write_runtime_csv(std::ostream& out, const RuntimeReport& report) {
    out << "m,k,encrypt_seconds,decrypt_seconds,throughput_bits_per_second\n";
    char line[256];
    for(const auto& r : report.rows) {
        std::snprintf(line, sizeof line, "%llu,%llu,%.10g,%.10g,%.10g\n", static_cast<unsigned long long>(r.m),
                      static_cast<unsigned long long>(r.k), r.encrypt_seconds, r.decrypt_seconds,
                      r.throughput_bits_per_second);
        out << line;
    }
    auto fit = [&](const char* name, const LinearFit& f) {
        std::snprintf(line, sizeof line, "# fit %s: slope=%.10g intercept=%.10g r2=%.6g\n", name, f.slope, f.intercept,
                      f.r2);
        out << line;
    };
    fit("time~m*k", report.fit_mk);
    fit("time~m", report.fit_m);
    fit("time~k", report.fit_k);
}

}  // namespace mpad
