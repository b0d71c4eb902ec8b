#include "sdarb/number.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "sdarb/error.hpp"

namespace sdarb {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
        case Errc::LengthMismatch: return "LengthMismatch";
        case Errc::NonIncreasingAtoms: return "NonIncreasingAtoms";
        case Errc::ZeroMass: return "ZeroMass";
        case Errc::MuNotProbability: return "MuNotProbability";
        case Errc::NotProbability: return "NotProbability";
        case Errc::NegativePayoff: return "NegativePayoff";
        case Errc::UnknownMethod: return "UnknownMethod";
        case Errc::GNotMonotone: return "GNotMonotone";
        case Errc::PreconditionInadequate: return "PreconditionInadequate";
        case Errc::EmptyMass: return "EmptyMass";
        case Errc::NonpositiveKernel: return "NonpositiveKernel";
        case Errc::FlatKernelRegion: return "FlatKernelRegion";
        case Errc::InvalidProgram: return "InvalidProgram";
        case Errc::SolverFailure: return "SolverFailure";
        case Errc::Parse: return "Parse";
    }
    return "Unknown";
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

mpz_class parse_integer(std::string_view s, std::string_view whole) {
    bool neg = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        neg = s.front() == '-';
        s.remove_prefix(1);
    }
    if (!all_digits(s)) throw Error(Errc::Parse, "not a number: '" + std::string(whole) + "'");
    mpz_class z(std::string(s), 10);
    return neg ? mpz_class(-z) : z;
}

Rational parse_decimal(std::string_view s, std::string_view whole) {
    bool neg = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        neg = s.front() == '-';
        s.remove_prefix(1);
    }
    long exponent = 0;
    if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
        auto exp_text = s.substr(e + 1);
        mpz_class ez = parse_integer(exp_text, whole);
        if (!ez.fits_slong_p() || abs(ez) > 10000) {
            throw Error(Errc::Parse, "exponent out of range: '" + std::string(whole) + "'");
        }
        exponent = ez.get_si();
        s = s.substr(0, e);
    }
    std::string digits;
    if (auto dot = s.find('.'); dot != std::string_view::npos) {
        auto int_part = s.substr(0, dot);
        auto frac_part = s.substr(dot + 1);
        if ((int_part.empty() && frac_part.empty()) || (!int_part.empty() && !all_digits(int_part)) ||
            (!frac_part.empty() && !all_digits(frac_part))) {
            throw Error(Errc::Parse, "not a number: '" + std::string(whole) + "'");
        }
        digits = std::string(int_part) + std::string(frac_part);
        exponent -= static_cast<long>(frac_part.size());
    } else {
        if (!all_digits(s)) throw Error(Errc::Parse, "not a number: '" + std::string(whole) + "'");
        digits = std::string(s);
    }
    mpz_class mant(digits, 10);
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
    Rational r = exponent < 0 ? Rational(mant, scale) : Rational(mant * scale);
    r.canonicalize();
    return neg ? Rational(-r) : r;
}

}  // namespace

Rational parse_rational(std::string_view text) {
    auto s = trim(text);
    if (s.empty()) throw Error(Errc::Parse, "empty number");
    if (auto slash = s.find('/'); slash != std::string_view::npos) {
        mpz_class num = parse_integer(trim(s.substr(0, slash)), text);
        mpz_class den = parse_integer(trim(s.substr(slash + 1)), text);
        if (den == 0) throw Error(Errc::Parse, "zero denominator: '" + std::string(text) + "'");
        Rational r(num, den);
        r.canonicalize();
        return r;
    }
    return parse_decimal(s, text);
}

template <>
double parse_number<double>(std::string_view text) {
    auto s = trim(text);
    if (s.find('/') != std::string_view::npos) {
        Rational r = parse_rational(s);
        const mpz_class& num = r.get_num();
        const mpz_class& den = r.get_den();
        if (abs(num) < (mpz_class(1) << 53) && den < (mpz_class(1) << 53)) {
            // both exact as doubles, so one correctly rounded division
            return num.get_d() / den.get_d();
        }
        return r.get_d();
    }
    parse_rational(s);  // validates syntax
    std::string buf(s);
    return std::strtod(buf.c_str(), nullptr);
}

std::string format_rational(const Rational& r) { return r.get_str(10); }

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace sdarb
