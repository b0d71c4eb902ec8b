#pragma once

#include <string>
#include <vector>

#include "sdarb/arbitrage.hpp"
#include "sdarb/measures.hpp"
#include "sdarb/number.hpp"

namespace sdarb::test {

inline Rational q(const char* text) { return parse_rational(text); }

template <Scalar T>
T num(const char* text) {
    return convert<T>(parse_rational(text));
}

template <Scalar T>
std::vector<T> nums(std::initializer_list<const char*> texts) {
    std::vector<T> out;
    for (const char* t : texts) out.push_back(num<T>(t));
    return out;
}

/// Two atoms, increasing kernel (1/2, 2).
template <Scalar T>
MarketModel<T> example1() {
    return new_market<T>(nums<T>({"1", "2"}), nums<T>({"2/3", "1/3"}), nums<T>({"1/3", "2/3"}));
}

/// Two atoms, increasing kernel (3/5, 6/5).
template <Scalar T>
MarketModel<T> example2() {
    return new_market<T>(nums<T>({"1", "2"}), nums<T>({"1/3", "2/3"}), nums<T>({"1/5", "4/5"}));
}

/// nu = mu, constant kernel.
template <Scalar T>
MarketModel<T> flat_market() {
    auto mu = nums<T>({"1/6", "1/2", "1/3"});
    return new_market<T>(nums<T>({"1", "3", "4"}), mu, mu);
}

template <Scalar T>
PayoffProfile<T> profile(std::initializer_list<const char*> texts) {
    return PayoffProfile<T>(nums<T>(texts));
}

template <Scalar T>
bool close(const T& a, const T& b, double tol = 1e-9) {
    if constexpr (is_exact_v<T>) {
        (void)tol;
        return a == b;
    } else {
        return std::fabs(a - b) <= tol;
    }
}

template <Scalar T>
bool close(std::span<const T> a, const std::vector<T>& b, double tol = 1e-9) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (!close(a[i], b[i], tol)) return false;
    }
    return true;
}

inline std::string source_path(const std::string& rel) { return std::string(SDARB_SOURCE_DIR) + "/" + rel; }

}  // namespace sdarb::test
