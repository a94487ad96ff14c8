#pragma once

#include <stdexcept>
#include <string>

namespace ogt {

enum class ErrorCode {
    TrivialClass,
    TrivialSubgroup,
    BudgetExceeded,
    SearchBudgetExceeded,
    NotAnAutomorphism,
    NonUnimodular,
    NotFiniteOrder,
    OptimalityGap,
    NotTense,
    NotTrainTrack,
    EventCapExceeded,
    NotIllegalEndpoint,
    RankTooSmall,
    EmptySet,
    DifferentFibers,
    NotGeodesic,
    NoGeodesicOfLength,
    BallTooSmall,
    SpanTooShort,
    BadInput,
};

const char* error_code_name(ErrorCode c);

// Domain error with a machine-readable code.  Budget-style codes map to
// CLI exit status 2, everything else to 1.
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& what_arg)
        : std::runtime_error(what_arg), code_(code) {}

    ErrorCode code() const { return code_; }

    bool is_budget() const {
        return code_ == ErrorCode::BudgetExceeded ||
               code_ == ErrorCode::SearchBudgetExceeded ||
               code_ == ErrorCode::EventCapExceeded;
    }

  private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
    throw Error(code, msg);
}

} // namespace ogt
