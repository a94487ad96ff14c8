#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <string>

#include "ogt/errors.hpp"

namespace ogt {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational make_rational(long num, long den = 1) {
    return Rational(Integer(num), Integer(den));
}

// Parses "p/q" or "p" (exact; denominator must be positive after parsing).
Rational parse_rational(const std::string& text);

// Renders as "p/q", or "p" when the denominator is 1.
std::string rational_to_string(const Rational& q);

inline double to_double(const Rational& q) {
    return q.convert_to<double>();
}

// A positive rational ratio whose log is the reported value.  Distances and
// folding times stay exact; the log is taken only for presentation.
struct LogScalar {
    Rational ratio = 1;

    LogScalar() = default;
    explicit LogScalar(Rational r) : ratio(std::move(r)) {
        if (ratio <= 0) fail(ErrorCode::BadInput, "LogScalar ratio must be positive");
    }

    double log_value() const { return std::log(to_double(ratio)); }

    LogScalar& operator*=(const LogScalar& o) {
        ratio *= o.ratio;
        return *this;
    }
    friend LogScalar operator*(LogScalar a, const LogScalar& b) { return a *= b; }
    friend bool operator==(const LogScalar& a, const LogScalar& b) { return a.ratio == b.ratio; }
    friend bool operator<(const LogScalar& a, const LogScalar& b) { return a.ratio < b.ratio; }
};

Integer ceil_rational(const Rational& q);

} // namespace ogt
