#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mpad {

/// Shape and bit bias of the shared matrix.
///
/// Rows are 0-based internally: internal row r is row r + 1 in the usual 1-based notation.
/// Columns are 0-based in both.
struct MatrixSpec {
    std::uint64_t k = 0;  // rows, the security parameter
    std::uint64_t n = 0;  // columns, the order of the index group Z_n
    double bias = 0.5;    // P(bit == 1)

    /// n == 1 or a bias of exactly 0 or 1. Only attack-lab experiments build these.
    bool is_degenerate() const noexcept { return n < 2 || bias == 0.0 || bias == 1.0; }

    /// Throws InvalidParams unless k >= 1, n >= 1 and bias is in [0, 1].
    void check() const;

    friend bool operator==(const MatrixSpec&, const MatrixSpec&) = default;
};

struct ParamReport {
    bool valid = false;
    std::vector<std::string> violations;

    explicit operator bool() const noexcept { return valid; }
    std::string describe() const;
};

/// Checks (n, k, m, eta_max) against the operating regime of the scheme:
/// "k<m" always, "m<floor((n+1)/2)" when eta_max == 1, otherwise "eta_max*m<=floor((n+1)/2)".
/// Zero arguments are reported as "positive".
ParamReport validate_params(std::uint64_t n, std::uint64_t k, std::uint64_t m, std::uint64_t eta_max);

/// Throws InvalidParams listing every violated constraint.
void require_valid_params(std::uint64_t n, std::uint64_t k, std::uint64_t m, std::uint64_t eta_max);

/// Parses a decimal count, a power written as "2^33", or hex with a 0x prefix. Throws FormatError
/// on malformed input or overflow.
std::uint64_t parse_count(std::string_view text);

/// floor((n + 1) / 2) without overflow.
constexpr std::uint64_t half_group(std::uint64_t n) noexcept {
    return n / 2 + (n % 2);
}

/// (a + b) mod n for a, b < 2^64.
constexpr std::uint64_t add_mod(std::uint64_t a, std::uint64_t b, std::uint64_t n) noexcept {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) + b) % n);
}

/// (a * b) mod n for a, b < 2^64.
constexpr std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t n) noexcept {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % n);
}

/// Column offset m*(eta - 1) mod n at which window eta starts.
constexpr std::uint64_t window_offset(std::uint64_t n, std::uint64_t m, std::uint64_t eta) noexcept {
    return mul_mod(m % n, (eta - 1) % n, n);
}

}  // namespace mpad
