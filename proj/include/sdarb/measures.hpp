#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sdarb/error.hpp"
#include "sdarb/number.hpp"

namespace sdarb {

/// Finite measure on a strictly increasing grid of nonnegative atoms, every
/// atom carrying strictly positive mass.
template <Scalar T>
class DiscreteMeasure {
public:
    DiscreteMeasure(std::vector<T> atoms, std::vector<T> masses);

    std::span<const T> atoms() const noexcept { return atoms_; }
    std::span<const T> masses() const noexcept { return masses_; }
    std::size_t size() const noexcept { return atoms_.size(); }
    const T& total_mass() const noexcept { return total_; }
    bool is_probability() const { return approx_eq(total_, T(1)); }

    T mean() const;

    friend bool operator==(const DiscreteMeasure&, const DiscreteMeasure&) = default;

private:
    std::vector<T> atoms_;
    std::vector<T> masses_;
    T total_;
};

/// Objective measure mu and pricing measure nu on a shared grid, with the
/// pricing kernel nu_i / mu_i.
template <Scalar T>
class MarketModel {
public:
    /// Validating constructor; see new_market.
    MarketModel(std::vector<T> atoms, std::vector<T> mu, std::vector<T> nu);

    std::span<const T> grid() const noexcept { return grid_; }
    std::span<const T> mu() const noexcept { return mu_; }
    std::span<const T> nu() const noexcept { return nu_; }
    std::span<const T> kernel() const noexcept { return kernel_; }
    std::size_t size() const noexcept { return grid_.size(); }

    DiscreteMeasure<T> objective_measure() const { return DiscreteMeasure<T>(grid_, mu_); }
    DiscreteMeasure<T> pricing_measure() const { return DiscreteMeasure<T>(grid_, nu_); }

private:
    std::vector<T> grid_;
    std::vector<T> mu_;
    std::vector<T> nu_;
    std::vector<T> kernel_;
};

template <Scalar T>
MarketModel<T> new_market(std::vector<T> atoms, std::vector<T> mu, std::vector<T> nu) {
    return MarketModel<T>(std::move(atoms), std::move(mu), std::move(nu));
}

enum class Continuity { Right, Left };

/// Piecewise-constant function with values.size() == breakpoints.size() + 1.
/// Right-continuous: value k holds on [b_{k-1}, b_k). Left-continuous: on
/// (b_{k-1}, b_k].
template <Scalar T>
class StepFunction {
public:
    StepFunction(std::vector<T> breakpoints, std::vector<T> values, Continuity continuity);

    T operator()(const T& x) const;

    std::span<const T> breakpoints() const noexcept { return breakpoints_; }
    std::span<const T> values() const noexcept { return values_; }
    Continuity continuity() const noexcept { return continuity_; }

    /// Index of the piece containing x.
    std::size_t piece(const T& x) const;

private:
    std::vector<T> breakpoints_;
    std::vector<T> values_;
    Continuity continuity_;
};

/// A derivative: one nonnegative payoff per grid atom.
template <Scalar T>
class PayoffProfile {
public:
    explicit PayoffProfile(std::vector<T> values);

    std::span<const T> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    const T& operator[](std::size_t i) const { return values_[i]; }

    friend bool operator==(const PayoffProfile&, const PayoffProfile&) = default;

private:
    std::vector<T> values_;
};

template <Scalar T>
bool is_kernel_monotone(const MarketModel<T>& m);

template <Scalar T>
bool is_adequate(const MarketModel<T>& m);

/// Right-continuous distribution function, breakpoints at the atoms.
template <Scalar T>
StepFunction<T> cdf(const DiscreteMeasure<T>& d);

/// Q(u) = inf{x : F(x) >= u} on [0,1], with Q(0) the smallest atom.
/// Throws NotProbability unless total mass is one.
template <Scalar T>
StepFunction<T> quantile(const DiscreteMeasure<T>& d);

template <Scalar T>
T market_price(const MarketModel<T>& m);

template <Scalar T>
T price(const MarketModel<T>& m, const PayoffProfile<T>& theta);

/// Law of theta(X) under mu. Float mode merges payoffs within compare_eps.
template <Scalar T>
DiscreteMeasure<T> pushforward(const MarketModel<T>& m, const PayoffProfile<T>& theta);

/// Law of an arbitrary nonnegative grid function under mu (pushforward of
/// mu by values).
template <Scalar T>
DiscreteMeasure<T> distribution_of(std::span<const T> mu, std::span<const T> values);

template <Scalar T>
PayoffProfile<T> identity_profile(const MarketModel<T>& m) {
    return PayoffProfile<T>(std::vector<T>(m.grid().begin(), m.grid().end()));
}

template <Scalar T>
PayoffProfile<T> kernel_profile(const MarketModel<T>& m) {
    return PayoffProfile<T>(std::vector<T>(m.kernel().begin(), m.kernel().end()));
}

/// Converts between arithmetic modes (rational -> float is lossy).
MarketModel<double> to_float(const MarketModel<Rational>& m);

#define SDARB_EXTERN_MEASURES(T)                                                           \
    extern template class DiscreteMeasure<T>;                                              \
    extern template class MarketModel<T>;                                                  \
    extern template class StepFunction<T>;                                                 \
    extern template class PayoffProfile<T>;                                                \
    extern template bool is_kernel_monotone<T>(const MarketModel<T>&);                     \
    extern template bool is_adequate<T>(const MarketModel<T>&);                            \
    extern template StepFunction<T> cdf<T>(const DiscreteMeasure<T>&);                     \
    extern template StepFunction<T> quantile<T>(const DiscreteMeasure<T>&);                \
    extern template T market_price<T>(const MarketModel<T>&);                              \
    extern template T price<T>(const MarketModel<T>&, const PayoffProfile<T>&);            \
    extern template DiscreteMeasure<T> pushforward<T>(const MarketModel<T>&,               \
                                                      const PayoffProfile<T>&);            \
    extern template DiscreteMeasure<T> distribution_of<T>(std::span<const T>, std::span<const T>);

SDARB_EXTERN_MEASURES(Rational)
SDARB_EXTERN_MEASURES(double)
#undef SDARB_EXTERN_MEASURES

}  // namespace sdarb
