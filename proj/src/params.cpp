#include <mpad/params.hpp>

#include <mpad/error.hpp>

#include <charconv>
#include <limits>

namespace mpad {

void MatrixSpec::check() const {
    if(k < 1) {
        throw InvalidParams("matrix spec needs k >= 1");
    }
    if(n < 1) {
        throw InvalidParams("matrix spec needs n >= 1");
    }
    if(!(bias >= 0.0 && bias <= 1.0)) {
        throw InvalidParams("matrix bias must lie in [0, 1]");
    }
}

std::string ParamReport::describe() const {
    if(valid) {
        return "valid";
    }
    std::string out = "invalid:";
    for(const auto& v : violations) {
        out += " " + v;
    }
    return out;
}

ParamReport validate_params(std::uint64_t n, std::uint64_t k, std::uint64_t m, std::uint64_t eta_max) {
    ParamReport report;
    if(n == 0 || k == 0 || m == 0 || eta_max == 0) {
        report.violations.emplace_back("positive");
        return report;
    }
    if(!(k < m)) {
        report.violations.emplace_back("k<m");
    }
    const std::uint64_t half = half_group(n);
    if(eta_max == 1) {
        if(!(m < half)) {
            report.violations.emplace_back("m<floor((n+1)/2)");
        }
    } else {
        const auto windows = static_cast<unsigned __int128>(eta_max) * m;
        if(windows > half) {
            report.violations.emplace_back("eta_max*m<=floor((n+1)/2)");
        }
    }
    report.valid = report.violations.empty();
    return report;
}

void require_valid_params(std::uint64_t n, std::uint64_t k, std::uint64_t m, std::uint64_t eta_max) {
    const auto report = validate_params(n, k, m, eta_max);
    if(!report) {
        throw InvalidParams("parameters (n=" + std::to_string(n) + ", k=" + std::to_string(k) +
                            ", m=" + std::to_string(m) + ", eta_max=" + std::to_string(eta_max) + ") " +
                            report.describe());
    }
}

std::uint64_t parse_count(std::string_view text) {
    auto parse_plain = [&](std::string_view part) {
        int base = 10;
        if(part.starts_with("0x") || part.starts_with("0X")) {
            part.remove_prefix(2);
            base = 16;
        }
        std::uint64_t value = 0;
        const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), value, base);
        if(part.empty() || ec != std::errc{} || ptr != part.data() + part.size()) {
            throw FormatError("not a count: '" + std::string(text) + "'");
        }
        return value;
    };
    const auto caret = text.find('^');
    if(caret == std::string_view::npos) {
        return parse_plain(text);
    }
    const std::uint64_t base = parse_plain(text.substr(0, caret));
    const std::uint64_t exp = parse_plain(text.substr(caret + 1));
    std::uint64_t out = 1;
    for(std::uint64_t i = 0; i < exp; ++i) {
        if(base != 0 && out > std::numeric_limits<std::uint64_t>::max() / base) {
            throw FormatError("count overflows 64 bits: '" + std::string(text) + "'");
        }
        out *= base;
    }
    return out;
}

}  // namespace mpad
