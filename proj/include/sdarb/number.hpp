#pragma once

#include <gmpxx.h>

#include <cmath>
#include <concepts>
#include <string>
#include <string_view>

namespace sdarb {

using Rational = mpq_class;

/// The two arithmetic modes: exact rationals, or binary floating point with
/// tolerance-based comparisons.
template <class T>
concept Scalar = std::same_as<T, Rational> || std::same_as<T, double>;

enum class Mode { Rational, Float };

template <Scalar T>
inline constexpr bool is_exact_v = std::same_as<T, Rational>;

/// Absolute tolerance used by every comparison helper in float mode.
inline constexpr double compare_eps = 1e-9;

template <Scalar T>
inline bool approx_eq(const T& a, const T& b) {
    if constexpr (is_exact_v<T>) {
        return a == b;
    } else {
        return std::fabs(a - b) <= compare_eps;
    }
}

/// a <= b, allowing slack of compare_eps in float mode.
template <Scalar T>
inline bool leq(const T& a, const T& b) {
    if constexpr (is_exact_v<T>) {
        return a <= b;
    } else {
        return a <= b + compare_eps;
    }
}

/// a < b by more than the tolerance in float mode; strict in rational mode.
template <Scalar T>
inline bool definitely_less(const T& a, const T& b, double margin = compare_eps) {
    if constexpr (is_exact_v<T>) {
        (void)margin;
        return a < b;
    } else {
        return a < b - margin;
    }
}

template <Scalar T>
inline bool is_zero(const T& a) {
    if constexpr (is_exact_v<T>) {
        return sgn(a) == 0;
    } else {
        return std::fabs(a) <= compare_eps;
    }
}

template <Scalar T>
inline double to_double(const T& a) {
    if constexpr (is_exact_v<T>) {
        return a.get_d();
    } else {
        return a;
    }
}

template <Scalar T>
inline T from_int(long v) {
    return T(v);
}

template <Scalar T>
inline T ratio(long num, long den) {
    if constexpr (is_exact_v<T>) {
        Rational r(num, den);
        r.canonicalize();
        return r;
    } else {
        return static_cast<double>(num) / static_cast<double>(den);
    }
}

template <Scalar T>
inline bool is_finite(const T& a) {
    if constexpr (is_exact_v<T>) {
        (void)a;
        return true;
    } else {
        return std::isfinite(a);
    }
}

/// Parses "p/q", "p", or a plain decimal such as "-1.25e-3" into an exact
/// rational. Throws Error(Parse) on malformed text.
Rational parse_rational(std::string_view text);

/// Canonical "p/q" (or "p" for integers).
std::string format_rational(const Rational& r);

/// Shortest decimal that round-trips through strtod is not what we want for
/// plot files; this gives a fixed 17 significant digits.
std::string format_double(double v);

template <Scalar T>
T parse_number(std::string_view text);

template <>
inline Rational parse_number<Rational>(std::string_view text) {
    return parse_rational(text);
}

/// Decimal text goes through strtod so that "0.1" is the nearest double
/// rather than a truncation of the exact rational.
template <>
double parse_number<double>(std::string_view text);

template <Scalar T>
inline std::string format_number(const T& v) {
    if constexpr (is_exact_v<T>) {
        return format_rational(v);
    } else {
        return format_double(v);
    }
}

template <Scalar T>
inline T convert(const Rational& r) {
    if constexpr (is_exact_v<T>) {
        return r;
    } else {
        return r.get_d();
    }
}

/// Exact conversion of a finite double to a rational (every double is one).
inline Rational exact_rational(double v) { return Rational(v); }

}  // namespace sdarb
