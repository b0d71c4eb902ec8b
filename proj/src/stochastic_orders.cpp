#include "sdarb/stochastic_orders.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace sdarb {

std::string_view to_string(OrderRelation rel) noexcept {
    switch (rel) {
        case OrderRelation::Equal: return "eq";
        case OrderRelation::FirstOrder: return "fsd";
        case OrderRelation::Concave: return "cv";
        case OrderRelation::SecondOrder: return "ssd";
    }
    return "?";
}

OrderRelation parse_order(std::string_view text) {
    if (text == "eq") return OrderRelation::Equal;
    if (text == "fsd") return OrderRelation::FirstOrder;
    if (text == "cv") return OrderRelation::Concave;
    if (text == "ssd") return OrderRelation::SecondOrder;
    throw Error(Errc::UnknownMethod, "unknown order '" + std::string(text) + "' (expected eq, fsd, cv, ssd)");
}

SsdMethod parse_ssd_method(std::string_view text) {
    if (text == "cdf_integral") return SsdMethod::CdfIntegral;
    if (text == "quantile_integral") return SsdMethod::QuantileIntegral;
    if (text == "shortfall") return SsdMethod::Shortfall;
    throw Error(Errc::UnknownMethod, "unknown SSD method '" + std::string(text) + "'");
}

namespace {

template <Scalar T>
std::vector<T> merged_support(const DiscreteMeasure<T>& d1, const DiscreteMeasure<T>& d2, bool with_zero) {
    std::vector<T> pts(d1.atoms().begin(), d1.atoms().end());
    pts.insert(pts.end(), d2.atoms().begin(), d2.atoms().end());
    if (with_zero) pts.emplace_back(0);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

template <Scalar T>
T mass_at_or_below(const DiscreteMeasure<T>& d, const T& x) {
    T acc(0);
    for (std::size_t i = 0; i < d.size() && d.atoms()[i] <= x; ++i) acc += d.masses()[i];
    return acc;
}

}  // namespace

template <Scalar T>
bool same_distribution(const DiscreteMeasure<T>& d1, const DiscreteMeasure<T>& d2) {
    if (d1.size() != d2.size()) return false;
    for (std::size_t i = 0; i < d1.size(); ++i) {
        if (!approx_eq(d1.atoms()[i], d2.atoms()[i]) || !approx_eq(d1.masses()[i], d2.masses()[i])) {
            return false;
        }
    }
    return true;
}

template <Scalar T>
bool dominates_fsd(const DiscreteMeasure<T>& d1, const DiscreteMeasure<T>& d2) {
    for (const auto& x : merged_support(d1, d2, false)) {
        if (!leq(mass_at_or_below(d1, x), mass_at_or_below(d2, x))) return false;
    }
    return true;
}

template <Scalar T>
T expected_shortfall(const DiscreteMeasure<T>& d, const T& t) {
    T acc(0);
    for (std::size_t i = 0; i < d.size() && d.atoms()[i] < t; ++i) acc += d.masses()[i] * (t - d.atoms()[i]);
    return acc;
}

template <Scalar T>
T integrated_cdf(const DiscreteMeasure<T>& d, const T& y) {
    // F is a right-continuous step function, so the integral over [0,y] is a
    // sum of rectangles between consecutive atoms below y.
    T acc(0);
    T level(0);
    T from(0);
    for (std::size_t i = 0; i < d.size(); ++i) {
        const T& a = d.atoms()[i];
        if (!(a < y)) break;
        if (from < a) acc += level * (a - from);
        level += d.masses()[i];
        from = a;
    }
    if (from < y) acc += level * (y - from);
    return acc;
}

template <Scalar T>
T integrated_quantile(const DiscreteMeasure<T>& d, const T& v) {
    T acc(0);
    T cum(0);
    for (std::size_t i = 0; i < d.size(); ++i) {
        T next = cum + d.masses()[i];
        if (!(next < v)) {
            acc += d.atoms()[i] * (v - cum);
            return acc;
        }
        acc += d.atoms()[i] * d.masses()[i];
        cum = next;
    }
    return acc;
}

template <Scalar T>
bool dominates_ssd(const DiscreteMeasure<T>& d1, const DiscreteMeasure<T>& d2, SsdMethod method) {
    switch (method) {
        case SsdMethod::CdfIntegral: {
            // Both partial integrals are piecewise linear with kinks on the
            // merged support; beyond the last atom both slopes are one.
            for (const auto& y : merged_support(d1, d2, true)) {
                if (!leq(integrated_cdf(d1, y), integrated_cdf(d2, y))) return false;
            }
            return true;
        }
        case SsdMethod::QuantileIntegral: {
            std::vector<T> levels{T(0), T(1)};
            for (const auto* d : {&d1, &d2}) {
                T cum(0);
                for (const auto& w : d->masses()) {
                    cum += w;
                    levels.push_back(cum);
                }
            }
            std::sort(levels.begin(), levels.end());
            levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
            for (const auto& v : levels) {
                if (v > T(1)) continue;
                if (!leq(integrated_quantile(d2, v), integrated_quantile(d1, v))) return false;
            }
            return true;
        }
        case SsdMethod::Shortfall: {
            for (const auto& t : merged_support(d1, d2, false)) {
                if (!leq(expected_shortfall(d1, t), expected_shortfall(d2, t))) return false;
            }
            return true;
        }
    }
    throw Error(Errc::UnknownMethod, "unknown SSD method");
}

template <Scalar T>
bool dominates_cv(const DiscreteMeasure<T>& d1, const DiscreteMeasure<T>& d2) {
    return approx_eq(d1.mean(), d2.mean()) && dominates_ssd(d1, d2, SsdMethod::Shortfall);
}

template <Scalar T>
bool dominates(const DiscreteMeasure<T>& d1, const DiscreteMeasure<T>& d2, OrderRelation rel) {
    switch (rel) {
        case OrderRelation::Equal: return same_distribution(d1, d2);
        case OrderRelation::FirstOrder: return dominates_fsd(d1, d2);
        case OrderRelation::Concave: return dominates_cv(d1, d2);
        case OrderRelation::SecondOrder: return dominates_ssd(d1, d2, SsdMethod::Shortfall);
    }
    return false;
}

#define SDARB_INSTANTIATE_ORDERS(T)                                                                 \
    template bool same_distribution<T>(const DiscreteMeasure<T>&, const DiscreteMeasure<T>&);        \
    template bool dominates_fsd<T>(const DiscreteMeasure<T>&, const DiscreteMeasure<T>&);            \
    template bool dominates_ssd<T>(const DiscreteMeasure<T>&, const DiscreteMeasure<T>&, SsdMethod); \
    template bool dominates_cv<T>(const DiscreteMeasure<T>&, const DiscreteMeasure<T>&);             \
    template bool dominates<T>(const DiscreteMeasure<T>&, const DiscreteMeasure<T>&, OrderRelation); \
    template T expected_shortfall<T>(const DiscreteMeasure<T>&, const T&);                          \
    template T integrated_cdf<T>(const DiscreteMeasure<T>&, const T&);                              \
    template T integrated_quantile<T>(const DiscreteMeasure<T>&, const T&);

SDARB_INSTANTIATE_ORDERS(Rational)
SDARB_INSTANTIATE_ORDERS(double)

}  // namespace sdarb
