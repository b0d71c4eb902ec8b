#pragma once

#include <optional>

#include "sdarb/measures.hpp"

namespace sdarb {

struct OmpdOptions {
    /// Float mode only: kernel values within this distance count as one
    /// level set. Unset means exact bit equality.
    std::optional<double> kernel_tie_tolerance;
};

/// Generalized optimal measure preserving derivative on the grid:
///
///   v(x_i) = Q(1 - F_pi(pi_i) + mu{j <= i : pi_j = pi_i})
///
/// where F_pi is the law of the kernel under mu and Q the quantile of mu.
template <Scalar T>
PayoffProfile<T> ompd(const MarketModel<T>& m, const OmpdOptions& opts = {});

template <Scalar T>
T ompd_price(const MarketModel<T>& m, const OmpdOptions& opts = {});

struct OmpdContract {
    bool adequate = false;
    bool countermonotone = false;        // always required
    bool distribution_preserved = false;  // required under adequacy
    bool price_equals_lower_bound = false;     // required under adequacy

    bool satisfied() const {
        return countermonotone && (!adequate || (distribution_preserved && price_equals_lower_bound));
    }
};

template <Scalar T>
OmpdContract verify_ompd_contract(const MarketModel<T>& m, const OmpdOptions& opts = {});

#define SDARB_EXTERN_OMPD(T)                                                       \
    extern template PayoffProfile<T> ompd<T>(const MarketModel<T>&, const OmpdOptions&); \
    extern template T ompd_price<T>(const MarketModel<T>&, const OmpdOptions&);         \
    extern template OmpdContract verify_ompd_contract<T>(const MarketModel<T>&, const OmpdOptions&);

SDARB_EXTERN_OMPD(Rational)
SDARB_EXTERN_OMPD(double)
#undef SDARB_EXTERN_OMPD

}  // namespace sdarb
