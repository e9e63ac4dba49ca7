#include "fwgraph/weight.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

namespace fwg {

namespace {

using boost::multiprecision::cpp_int;

cpp_int parse_integer(std::string_view s, std::string_view whole) {
    if (s.empty()) throw std::invalid_argument("malformed number '" + std::string(whole) + "'");
    std::size_t i = 0;
    bool negative = false;
    if (s[0] == '+' || s[0] == '-') {
        negative = s[0] == '-';
        i = 1;
    }
    if (i == s.size()) throw std::invalid_argument("malformed number '" + std::string(whole) + "'");
    cpp_int value = 0;
    for (; i < s.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) {
            throw std::invalid_argument("malformed number '" + std::string(whole) + "'");
        }
        value = value * 10 + (s[i] - '0');
    }
    return negative ? cpp_int(-value) : value;
}

Rational parse_decimal(std::string_view s, std::string_view whole) {
    long exponent = 0;
    if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
        const cpp_int ex = parse_integer(s.substr(e + 1), whole);
        if (ex > 4000 || ex < -4000) throw std::invalid_argument("exponent out of range in '" + std::string(whole) + "'");
        exponent = ex.convert_to<long>();
        s = s.substr(0, e);
    }
    std::string digits;
    bool negative = false;
    std::size_t i = 0;
    if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
        negative = s[0] == '-';
        i = 1;
    }
    bool seen_point = false, seen_digit = false;
    for (; i < s.size(); ++i) {
        const char c = s[i];
        if (c == '.' && !seen_point) {
            seen_point = true;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            digits.push_back(c);
            seen_digit = true;
            if (seen_point) --exponent;
        } else {
            throw std::invalid_argument("malformed number '" + std::string(whole) + "'");
        }
    }
    if (!seen_digit) throw std::invalid_argument("malformed number '" + std::string(whole) + "'");
    Rational r(parse_integer(digits, whole));
    const cpp_int scale = boost::multiprecision::pow(cpp_int(10), static_cast<unsigned>(std::labs(exponent)));
    r = exponent >= 0 ? Rational(r * scale) : Rational(r / scale);
    return negative ? Rational(-r) : r;
}

}  // namespace

Rational parse_rational(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        const cpp_int num = parse_integer(text.substr(0, slash), text);
        const cpp_int den = parse_integer(text.substr(slash + 1), text);
        if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
        return Rational(num, den);
    }
    return parse_decimal(text, text);
}

bool is_exact_double(const Rational& r) {
    const double d = to_double(r);
    return std::isfinite(d) && Rational(d) == r;
}

std::string to_string(const Rational& r) {
    const auto num = boost::multiprecision::numerator(r);
    const auto den = boost::multiprecision::denominator(r);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

}  // namespace fwg
