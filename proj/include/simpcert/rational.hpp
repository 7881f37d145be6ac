#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace simpcert {

// Arbitrary-precision rational scalar for the exact arithmetic path.
// Construction from double is exact: every finite double is a dyadic
// rational and cpp_rational preserves it bit for bit.
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

inline Rational rational(long long numerator, long long denominator) {
    return Rational(numerator, denominator);
}

} // namespace simpcert
