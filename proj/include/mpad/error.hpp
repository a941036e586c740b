#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mpad {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidParams : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class IndexOutOfRange : public Error {
public:
    using Error::Error;
};

class EntropyFailure : public Error {
public:
    using Error::Error;
};

/// Ciphertext header names a different (pair, slot) than the key offered for decryption.
class HeaderMismatch : public Error {
public:
    using Error::Error;
};

/// CRC-32 over a frame did not match. Signals corruption; it is not a forgery check.
class ChecksumMismatch : public Error {
public:
    using Error::Error;
};

class FormatError : public Error {
public:
    using Error::Error;
};

/// Every key slot of a device pair has consumed its full window budget.
class BudgetExhausted : public Error {
public:
    using Error::Error;
};

class UnknownPair : public Error {
public:
    using Error::Error;
};

class UnknownDevice : public Error {
public:
    using Error::Error;
};

class ReserveExhausted : public Error {
public:
    using Error::Error;
};

/// Exhaustive search or enumeration would exceed its configured budget.
class SearchBudgetExceeded : public Error {
public:
    using Error::Error;
};

/// Estimator refused to run because the result would be statistically meaningless.
class EstimatorRefused : public Error {
public:
    using Error::Error;
};

/// A scenario expectation was not met.
class ScenarioFailure : public Error {
public:
    using Error::Error;
};

/// Kebab-case name of the most derived error class, e.g. "budget-exhausted"; "error" for any
/// other exception.
std::string_view error_kind(const std::exception& e) noexcept;

}  // namespace mpad
