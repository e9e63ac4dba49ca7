#pragma once

#include <string>
#include <string_view>
#include <type_traits>

#include <boost/multiprecision/cpp_int.hpp>

namespace fwg {

using Rational = boost::multiprecision::cpp_rational;

// Accepts "n/d", plain decimals and exponent notation; decimals are read
// exactly (so "0.1" is 1/10, not the nearest double).
Rational parse_rational(std::string_view text);

// Exact value of a double.
inline Rational to_rational(double x) { return Rational(x); }

inline double to_double(double x) { return x; }
inline double to_double(const Rational& x) { return x.convert_to<double>(); }

// True when r is exactly representable as a double.
bool is_exact_double(const Rational& r);

std::string to_string(const Rational& r);

// Cast helper used by the weight-generic templates.
template <class W>
W weight_from_double(double x) {
    if constexpr (std::is_same_v<W, double>) {
        return x;
    } else {
        return Rational(x);
    }
}

}  // namespace fwg
