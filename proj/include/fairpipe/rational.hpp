#ifndef FAIRPIPE_RATIONAL_HPP
#define FAIRPIPE_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <cstdio>
#include <string>
#include <string_view>

#include "fairpipe/errors.hpp"

namespace fairpipe {

/// Exact scalar used wherever results must reproduce hand arithmetic
/// bit-for-bit (table reproduction, inequality chains, certificates).
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline double to_double(const Rational& v) { return v.template convert_to<double>(); }
inline double to_double(double v) { return v; }

/// Traits that let the metric layer pick the verdict comparison rule:
/// exact for rationals, small tolerance for floating point.
template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
    static Rational verdict_tolerance() { return Rational(0); }
    static bool is_zero(const Rational& v) { return v == 0; }
};

template <>
struct ScalarTraits<double> {
    static double verdict_tolerance() { return 1e-9; }
    static bool is_zero(double v) { return v == 0.0; }
};

/// Parses "p/q", "-3", "0.25" or "1.5e-2"-free plain decimals into an exact
/// rational. Decimal strings map to numerator over a power of ten.
inline Rational parse_rational(std::string_view text) {
    auto fail = [&] { throw ParseError("not a rational number: '" + std::string(text) + "'"); };
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    if (text.empty()) fail();

    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        std::string num(text.substr(0, slash));
        std::string den(text.substr(slash + 1));
        if (num.empty() || den.empty()) fail();
        try {
            BigInt n(num), d(den);
            if (d == 0) fail();
            return Rational(n, d);
        } catch (const std::exception&) {
            fail();
        }
    }

    bool negative = false;
    std::size_t i = 0;
    if (text[i] == '+' || text[i] == '-') {
        negative = text[i] == '-';
        ++i;
    }
    BigInt numerator = 0;
    BigInt denominator = 1;
    bool seen_digit = false;
    bool seen_dot = false;
    for (; i < text.size(); ++i) {
        char c = text[i];
        if (c == '.') {
            if (seen_dot) fail();
            seen_dot = true;
        } else if (c >= '0' && c <= '9') {
            numerator = numerator * 10 + (c - '0');
            if (seen_dot) denominator *= 10;
            seen_digit = true;
        } else {
            fail();
        }
    }
    if (!seen_digit) fail();
    Rational value(numerator, denominator);
    return negative ? -value : value;
}

/// "p/q" for non-integers, plain integer text otherwise.
inline std::string format_rational(const Rational& v) {
    if (denominator(v) == 1) return numerator(v).str();
    return numerator(v).str() + "/" + denominator(v).str();
}

/// Deterministic short decimal rendering used in emitted tables.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

inline std::string format_scalar(const Rational& v) { return format_rational(v); }
inline std::string format_scalar(double v) { return format_double(v); }

}  // namespace fairpipe

#endif  // FAIRPIPE_RATIONAL_HPP
