#include <mpad/error.hpp>

namespace mpad {

std::string_view error_kind(const std::exception& e) noexcept {
    if(dynamic_cast<const InvalidParams*>(&e)) {
        return "invalid-params";
    }
    if(dynamic_cast<const DimensionMismatch*>(&e)) {
        return "dimension-mismatch";
    }
    if(dynamic_cast<const IndexOutOfRange*>(&e)) {
        return "index-out-of-range";
    }
    if(dynamic_cast<const EntropyFailure*>(&e)) {
        return "entropy-failure";
    }
    if(dynamic_cast<const HeaderMismatch*>(&e)) {
        return "header-mismatch";
    }
    if(dynamic_cast<const ChecksumMismatch*>(&e)) {
        return "checksum-mismatch";
    }
    if(dynamic_cast<const FormatError*>(&e)) {
        return "format-error";
    }
    if(dynamic_cast<const BudgetExhausted*>(&e)) {
        return "budget-exhausted";
    }
    if(dynamic_cast<const UnknownPair*>(&e)) {
        return "unknown-pair";
    }
    if(dynamic_cast<const UnknownDevice*>(&e)) {
        return "unknown-device";
    }
    if(dynamic_cast<const ReserveExhausted*>(&e)) {
        return "reserve-exhausted";
    }
    if(dynamic_cast<const SearchBudgetExceeded*>(&e)) {
        return "search-budget-exceeded";
    }
    if(dynamic_cast<const EstimatorRefused*>(&e)) {
        return "estimator-refused";
    }
    if(dynamic_cast<const ScenarioFailure*>(&e)) {
        return "scenario-failure";
    }
    return "error";
}

}  // namespace mpad
