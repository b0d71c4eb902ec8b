#include "sdarb/ompd.hpp"

#include <cmath>
#include <vector>

#include "sdarb/rearrangement.hpp"
#include "sdarb/stochastic_orders.hpp"

namespace sdarb {

namespace {

template <Scalar T>
bool same_level(const T& a, const T& b, const OmpdOptions& opts) {
    if constexpr (is_exact_v<T>) {
        (void)opts;
        return a == b;
    } else {
        if (opts.kernel_tie_tolerance) return std::fabs(a - b) <= *opts.kernel_tie_tolerance;
        return a == b;
    }
}

/// Quantile of mu at u. The argument in float mode carries rounding from
/// 1 - F + t, so levels within 1e-12 are treated as hit exactly.
template <Scalar T>
const T& quantile_at(const MarketModel<T>& m, const T& u) {
    T cum(0);
    const std::size_t n = m.size();
    for (std::size_t k = 0; k + 1 < n; ++k) {
        cum += m.mu()[k];
        if constexpr (is_exact_v<T>) {
            if (u <= cum) return m.grid()[k];
        } else {
            if (u <= cum + 1e-12) return m.grid()[k];
        }
    }
    return m.grid()[n - 1];
}

}  // namespace

template <Scalar T>
PayoffProfile<T> ompd(const MarketModel<T>& m, const OmpdOptions& opts) {
    const auto kernel = m.kernel();
    const auto mu = m.mu();
    const std::size_t n = m.size();
    std::vector<T> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        T below(0);  // F_pi(pi_i) = mu{pi <= pi_i}
        T tie(0);    // mu{w <= x_i : pi(w) = pi_i}
        for (std::size_t j = 0; j < n; ++j) {
            const bool level = same_level(kernel[j], kernel[i], opts);
            if (level || kernel[j] < kernel[i]) below += mu[j];
            if (level && j <= i) tie += mu[j];
        }
        out.push_back(quantile_at(m, T(T(1) - below + tie)));
    }
    return PayoffProfile<T>(std::move(out));
}

template <Scalar T>
T ompd_price(const MarketModel<T>& m, const OmpdOptions& opts) {
    return price(m, ompd(m, opts));
}

template <Scalar T>
OmpdContract verify_ompd_contract(const MarketModel<T>& m, const OmpdOptions& opts) {
    const auto theta = ompd(m, opts);
    OmpdContract report;
    report.adequate = is_adequate(m);
    report.countermonotone = is_countermonotone(m, theta, kernel_profile(m));
    report.distribution_preserved = same_distribution(pushforward(m, theta), m.objective_measure());
    const auto q = quantile(m.objective_measure());
    const auto q_kernel = quantile(distribution_of<T>(m.mu(), m.kernel()));
    report.price_equals_lower_bound = approx_eq(price(m, theta), quantile_product_integral(q, q_kernel, true));
    return report;
}

#define SDARB_INSTANTIATE_OMPD(T)                                                  \
    template PayoffProfile<T> ompd<T>(const MarketModel<T>&, const OmpdOptions&);  \
    template T ompd_price<T>(const MarketModel<T>&, const OmpdOptions&);           \
    template OmpdContract verify_ompd_contract<T>(const MarketModel<T>&, const OmpdOptions&);

SDARB_INSTANTIATE_OMPD(Rational)
SDARB_INSTANTIATE_OMPD(double)

}  // namespace sdarb
