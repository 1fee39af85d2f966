#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

#include "liftsched/errors.hpp"

namespace liftsched {

// Exact arithmetic everywhere; no tolerance parameter exists in this library.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline std::string to_string(const Rational& r) {
    if (denominator(r) == 1) return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

// Accepts "p", "-p", "p/q".
inline Rational parse_rational(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rational(BigInt(s));
        BigInt num(s.substr(0, slash));
        BigInt den(s.substr(slash + 1));
        if (den == 0) throw InvalidInstance("rational with zero denominator: " + s);
        return Rational(num, den);
    } catch (const std::runtime_error&) {
        throw InvalidInstance("not a rational: " + s);
    }
}

inline BigInt floor_div(const BigInt& a, const BigInt& b) {
    BigInt q = a / b, r = a % b;
    if (r != 0 && ((r < 0) != (b < 0))) --q;
    return q;
}

inline BigInt floor_rational(const Rational& r) {
    return floor_div(numerator(r), denominator(r));
}

inline long to_long(const BigInt& v) { return v.convert_to<long>(); }

}  // namespace liftsched
