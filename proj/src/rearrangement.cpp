#include "sdarb/rearrangement.hpp"

#include <algorithm>
#include <vector>

namespace sdarb {

namespace {

/// Sorted distinct cut points in [0,1], always including both ends.
template <Scalar T>
std::vector<T> refinement(std::initializer_list<std::vector<T>> cut_sets) {
    std::vector<T> cuts{T(0), T(1)};
    for (const auto& set : cut_sets) {
        for (const auto& c : set) {
            if (c > T(0) && c < T(1)) cuts.push_back(c);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    return cuts;
}

template <Scalar T>
std::vector<T> reflected(std::span<const T> pts) {
    std::vector<T> out;
    out.reserve(pts.size());
    for (const auto& p : pts) out.push_back(T(1) - p);
    return out;
}

template <Scalar T>
void require_same_grid(const MarketModel<T>& m, const PayoffProfile<T>& f, const PayoffProfile<T>& g) {
    if (f.size() != m.size() || g.size() != m.size()) {
        throw Error(Errc::LengthMismatch, "profiles must match the grid");
    }
}

}  // namespace

template <Scalar T>
T quantile_product_integral(const StepFunction<T>& q1, const StepFunction<T>& q2, bool reverse_second) {
    std::vector<T> b1(q1.breakpoints().begin(), q1.breakpoints().end());
    std::vector<T> b2 = reverse_second ? reflected<T>(q2.breakpoints())
                                       : std::vector<T>(q2.breakpoints().begin(), q2.breakpoints().end());
    const auto cuts = refinement<T>({b1, b2});
    T total(0);
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        // interior midpoint: both integrands are constant on the open cell
        T mid = (cuts[k] + cuts[k + 1]) / T(2);
        T second = reverse_second ? q2(T(1) - mid) : q2(mid);
        total += (cuts[k + 1] - cuts[k]) * q1(mid) * second;
    }
    return total;
}

template <Scalar T>
RearrangementBounds<T> hardy_littlewood_bounds(const MarketModel<T>& m, const PayoffProfile<T>& f,
                                               const PayoffProfile<T>& g) {
    require_same_grid(m, f, g);
    const auto qf = quantile(distribution_of<T>(m.mu(), f.values()));
    const auto qg = quantile(distribution_of<T>(m.mu(), g.values()));
    T actual(0);
    for (std::size_t i = 0; i < m.size(); ++i) actual += m.mu()[i] * f[i] * g[i];
    return {quantile_product_integral(qf, qg, true), actual, quantile_product_integral(qf, qg, false)};
}

template <Scalar T>
bool is_countermonotone(const MarketModel<T>& m, const PayoffProfile<T>& f, const PayoffProfile<T>& g) {
    require_same_grid(m, f, g);
    for (std::size_t i = 0; i < f.size(); ++i) {
        for (std::size_t j = i + 1; j < f.size(); ++j) {
            if (!leq<T>((f[i] - f[j]) * (g[i] - g[j]), T(0))) return false;
        }
    }
    return true;
}

template <Scalar T>
bool is_comonotone(const MarketModel<T>& m, const PayoffProfile<T>& f, const PayoffProfile<T>& g) {
    require_same_grid(m, f, g);
    for (std::size_t i = 0; i < f.size(); ++i) {
        for (std::size_t j = i + 1; j < f.size(); ++j) {
            if (!leq<T>(T(0), (f[i] - f[j]) * (g[i] - g[j]))) return false;
        }
    }
    return true;
}

template <Scalar T>
bool hardy_majorization_holds(const StepFunction<T>& q1, const StepFunction<T>& q2, const StepFunction<T>& g) {
    auto gv = g.values();
    for (std::size_t k = 0; k < gv.size(); ++k) {
        if (gv[k] < T(0) || (k > 0 && gv[k] > gv[k - 1])) {
            throw Error(Errc::GNotMonotone, "weight must be nonincreasing and nonnegative");
        }
    }
    std::vector<T> b1(q1.breakpoints().begin(), q1.breakpoints().end());
    std::vector<T> b2(q2.breakpoints().begin(), q2.breakpoints().end());
    std::vector<T> bg(g.breakpoints().begin(), g.breakpoints().end());
    const auto cuts = refinement<T>({b1, b2, bg});
    // The weighted partial integrals are piecewise linear in v, so checking
    // every cut point covers all v.
    T lhs(0);
    T rhs(0);
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        T mid = (cuts[k] + cuts[k + 1]) / T(2);
        T width = cuts[k + 1] - cuts[k];
        lhs += width * q1(mid) * g(mid);
        rhs += width * q2(mid) * g(mid);
        if (!leq(rhs, lhs)) return false;
    }
    return true;
}

#define SDARB_INSTANTIATE_REARRANGEMENT(T)                                                               \
    template T quantile_product_integral<T>(const StepFunction<T>&, const StepFunction<T>&, bool);        \
    template RearrangementBounds<T> hardy_littlewood_bounds<T>(const MarketModel<T>&,                     \
                                                               const PayoffProfile<T>&,                   \
                                                               const PayoffProfile<T>&);                  \
    template bool is_countermonotone<T>(const MarketModel<T>&, const PayoffProfile<T>&,                   \
                                        const PayoffProfile<T>&);                                         \
    template bool is_comonotone<T>(const MarketModel<T>&, const PayoffProfile<T>&, const PayoffProfile<T>&); \
    template bool hardy_majorization_holds<T>(const StepFunction<T>&, const StepFunction<T>&,             \
                                              const StepFunction<T>&);

SDARB_INSTANTIATE_REARRANGEMENT(Rational)
SDARB_INSTANTIATE_REARRANGEMENT(double)

}  // namespace sdarb
