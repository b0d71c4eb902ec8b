#pragma once

#include <string_view>

#include "sdarb/measures.hpp"

namespace sdarb {

enum class OrderRelation { Equal, FirstOrder, Concave, SecondOrder };

std::string_view to_string(OrderRelation rel) noexcept;

/// Accepts the CLI spellings eq, fsd, cv, ssd. Throws UnknownMethod.
OrderRelation parse_order(std::string_view text);

enum class SsdMethod { CdfIntegral, QuantileIntegral, Shortfall };

SsdMethod parse_ssd_method(std::string_view text);

template <Scalar T>
bool same_distribution(const DiscreteMeasure<T>& d1, const DiscreteMeasure<T>& d2);

/// F1 <= F2 everywhere.
template <Scalar T>
bool dominates_fsd(const DiscreteMeasure<T>& d1, const DiscreteMeasure<T>& d2);

/// Second-order dominance of d1 over d2. All three methods are exact on the
/// relevant breakpoint sets and must agree.
template <Scalar T>
bool dominates_ssd(const DiscreteMeasure<T>& d1, const DiscreteMeasure<T>& d2,
                   SsdMethod method = SsdMethod::Shortfall);

/// Equal means plus second-order dominance.
template <Scalar T>
bool dominates_cv(const DiscreteMeasure<T>& d1, const DiscreteMeasure<T>& d2);

template <Scalar T>
bool dominates(const DiscreteMeasure<T>& d1, const DiscreteMeasure<T>& d2, OrderRelation rel);

/// E[(t - Y)_+].
template <Scalar T>
T expected_shortfall(const DiscreteMeasure<T>& d, const T& t);

/// Integral of F over [0, y].
template <Scalar T>
T integrated_cdf(const DiscreteMeasure<T>& d, const T& y);

/// Integral of Q over [0, v].
template <Scalar T>
T integrated_quantile(const DiscreteMeasure<T>& d, const T& v);

#define SDARB_EXTERN_ORDERS(T)                                                                      \
    extern template bool same_distribution<T>(const DiscreteMeasure<T>&, const DiscreteMeasure<T>&); \
    extern template bool dominates_fsd<T>(const DiscreteMeasure<T>&, const DiscreteMeasure<T>&);     \
    extern template bool dominates_ssd<T>(const DiscreteMeasure<T>&, const DiscreteMeasure<T>&,      \
                                          SsdMethod);                                               \
    extern template bool dominates_cv<T>(const DiscreteMeasure<T>&, const DiscreteMeasure<T>&);      \
    extern template bool dominates<T>(const DiscreteMeasure<T>&, const DiscreteMeasure<T>&,          \
                                      OrderRelation);                                               \
    extern template T expected_shortfall<T>(const DiscreteMeasure<T>&, const T&);                   \
    extern template T integrated_cdf<T>(const DiscreteMeasure<T>&, const T&);                       \
    extern template T integrated_quantile<T>(const DiscreteMeasure<T>&, const T&);

SDARB_EXTERN_ORDERS(Rational)
SDARB_EXTERN_ORDERS(double)
#undef SDARB_EXTERN_ORDERS

}  // namespace sdarb
