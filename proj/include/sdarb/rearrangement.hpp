#pragma once

#include "sdarb/measures.hpp"

namespace sdarb {

/// Exact integral over [0,1] of u -> q1(u) q2(1-u) (reverse_second) or
/// u -> q1(u) q2(u), evaluated on the common refinement of the step levels.
template <Scalar T>
T quantile_product_integral(const StepFunction<T>& q1, const StepFunction<T>& q2, bool reverse_second);

template <Scalar T>
struct RearrangementBounds {
    T lower;   ///< countermonotone pairing of the quantiles
    T actual;  ///< sum_i mu_i f_i g_i
    T upper;   ///< comonotone pairing
};

template <Scalar T>
RearrangementBounds<T> hardy_littlewood_bounds(const MarketModel<T>& m, const PayoffProfile<T>& f,
                                               const PayoffProfile<T>& g);

/// Pairwise check over support points: (f_i - f_j)(g_i - g_j) <= 0.
template <Scalar T>
bool is_countermonotone(const MarketModel<T>& m, const PayoffProfile<T>& f, const PayoffProfile<T>& g);

template <Scalar T>
bool is_comonotone(const MarketModel<T>& m, const PayoffProfile<T>& f, const PayoffProfile<T>& g);

/// Weighted partial-integral inequality int_0^v q1 g >= int_0^v q2 g for all
/// v, checked at every refinement breakpoint. g must be a nonincreasing,
/// nonnegative step function on [0,1] (GNotMonotone otherwise).
template <Scalar T>
bool hardy_majorization_holds(const StepFunction<T>& q1, const StepFunction<T>& q2, const StepFunction<T>& g);

#define SDARB_EXTERN_REARRANGEMENT(T)                                                                 \
    extern template T quantile_product_integral<T>(const StepFunction<T>&, const StepFunction<T>&, bool); \
    extern template RearrangementBounds<T> hardy_littlewood_bounds<T>(                                \
        const MarketModel<T>&, const PayoffProfile<T>&, const PayoffProfile<T>&);                     \
    extern template bool is_countermonotone<T>(const MarketModel<T>&, const PayoffProfile<T>&,        \
                                               const PayoffProfile<T>&);                              \
    extern template bool is_comonotone<T>(const MarketModel<T>&, const PayoffProfile<T>&,             \
                                          const PayoffProfile<T>&);                                   \
    extern template bool hardy_majorization_holds<T>(const StepFunction<T>&, const StepFunction<T>&,   \
                                                     const StepFunction<T>&);

SDARB_EXTERN_REARRANGEMENT(Rational)
SDARB_EXTERN_REARRANGEMENT(double)
#undef SDARB_EXTERN_REARRANGEMENT

}  // namespace sdarb
