#include "ogt/rational.hpp"

#include <sstream>

namespace ogt {

const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::TrivialClass: return "TrivialClass";
        case ErrorCode::TrivialSubgroup: return "TrivialSubgroup";
        case ErrorCode::BudgetExceeded: return "BudgetExceeded";
        case ErrorCode::SearchBudgetExceeded: return "SearchBudgetExceeded";
        case ErrorCode::NotAnAutomorphism: return "NotAnAutomorphism";
        case ErrorCode::NonUnimodular: return "NonUnimodular";
        case ErrorCode::NotFiniteOrder: return "NotFiniteOrder";
        case ErrorCode::OptimalityGap: return "OptimalityGap";
        case ErrorCode::NotTense: return "NotTense";
        case ErrorCode::NotTrainTrack: return "NotTrainTrack";
        case ErrorCode::EventCapExceeded: return "EventCapExceeded";
        case ErrorCode::NotIllegalEndpoint: return "NotIllegalEndpoint";
        case ErrorCode::RankTooSmall: return "RankTooSmall";
        case ErrorCode::EmptySet: return "EmptySet";
        case ErrorCode::DifferentFibers: return "DifferentFibers";
        case ErrorCode::NotGeodesic: return "NotGeodesic";
        case ErrorCode::NoGeodesicOfLength: return "NoGeodesicOfLength";
        case ErrorCode::BallTooSmall: return "BallTooSmall";
        case ErrorCode::SpanTooShort: return "SpanTooShort";
        case ErrorCode::BadInput: return "BadInput";
    }
    return "Unknown";
}

Rational parse_rational(const std::string& text) {
    auto slash = text.find('/');
    try {
        if (slash == std::string::npos) return Rational(Integer(text));
        Integer num(text.substr(0, slash));
        Integer den(text.substr(slash + 1));
        if (den == 0) fail(ErrorCode::BadInput, "zero denominator");
        return Rational(num, den);
    } catch (const Error&) {
        throw;
    } catch (const std::exception&) {
        fail(ErrorCode::BadInput, "cannot parse rational '" + text + "'");
    }
}

std::string rational_to_string(const Rational& q) {
    std::ostringstream os;
    os << numerator(q);
    if (denominator(q) != 1) os << "/" << denominator(q);
    return os.str();
}

Integer ceil_rational(const Rational& q) {
    Integer n = numerator(q), d = denominator(q);
    Integer quot = n / d;
    if (quot * d != n && n > 0) ++quot;
    return quot;
}

} // namespace ogt
