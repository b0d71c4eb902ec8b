#include "sdarb/measures.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <utility>

namespace sdarb {

namespace {

template <Scalar T>
void require_strictly_increasing(std::span<const T> atoms) {
    for (std::size_t i = 1; i < atoms.size(); ++i) {
        if (!(atoms[i - 1] < atoms[i])) {
            throw Error(Errc::NonIncreasingAtoms,
                        "atom " + std::to_string(i) + " is not larger than its predecessor");
        }
    }
}

template <Scalar T>
T sum(std::span<const T> xs) {
    T total(0);
    for (const auto& x : xs) total += x;
    return total;
}

}  // namespace

template <Scalar T>
DiscreteMeasure<T>::DiscreteMeasure(std::vector<T> atoms, std::vector<T> masses)
    : atoms_(std::move(atoms)), masses_(std::move(masses)), total_(0) {
    if (atoms_.empty()) throw Error(Errc::LengthMismatch, "measure needs at least one atom");
    if (atoms_.size() != masses_.size()) {
        throw Error(Errc::LengthMismatch, std::to_string(atoms_.size()) + " atoms vs " +
                                              std::to_string(masses_.size()) + " masses");
    }
    for (const auto& a : atoms_) {
        if (!is_finite(a) || a < 0) throw Error(Errc::NegativePayoff, "atoms must be finite and >= 0");
    }
    require_strictly_increasing<T>(atoms_);
    for (const auto& w : masses_) {
        if (!is_finite(w) || !(w > 0)) throw Error(Errc::ZeroMass, "masses must be finite and > 0");
    }
    total_ = sum<T>(masses_);
}

template <Scalar T>
T DiscreteMeasure<T>::mean() const {
    T m(0);
    for (std::size_t i = 0; i < atoms_.size(); ++i) m += atoms_[i] * masses_[i];
    return m;
}

template <Scalar T>
MarketModel<T>::MarketModel(std::vector<T> atoms, std::vector<T> mu, std::vector<T> nu)
    : grid_(std::move(atoms)), mu_(std::move(mu)), nu_(std::move(nu)) {
    if (grid_.size() != mu_.size() || grid_.size() != nu_.size()) {
        throw Error(Errc::LengthMismatch, "atoms, mu and nu must have equal length");
    }
    if (grid_.empty()) throw Error(Errc::LengthMismatch, "market needs at least one atom");
    for (const auto& a : grid_) {
        if (!is_finite(a) || a < 0) throw Error(Errc::NegativePayoff, "atoms must be finite and >= 0");
    }
    require_strictly_increasing<T>(grid_);
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        if (!is_finite(mu_[i]) || !is_finite(nu_[i]) || !(mu_[i] > 0) || !(nu_[i] > 0)) {
            throw Error(Errc::ZeroMass, "mu and nu must both be positive at atom " + std::to_string(i) +
                                            " (mutual absolute continuity)");
        }
    }
    if (!approx_eq(sum<T>(mu_), T(1))) {
        throw Error(Errc::MuNotProbability, "mu sums to " + format_number(sum<T>(mu_)));
    }
    kernel_.reserve(grid_.size());
    for (std::size_t i = 0; i < grid_.size(); ++i) kernel_.push_back(nu_[i] / mu_[i]);
}

template <Scalar T>
StepFunction<T>::StepFunction(std::vector<T> breakpoints, std::vector<T> values, Continuity continuity)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)), continuity_(continuity) {
    if (values_.size() != breakpoints_.size() + 1) {
        throw Error(Errc::LengthMismatch, "step function needs one more value than breakpoints");
    }
    require_strictly_increasing<T>(breakpoints_);
}

template <Scalar T>
std::size_t StepFunction<T>::piece(const T& x) const {
    auto it = continuity_ == Continuity::Right
                  ? std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x)
                  : std::lower_bound(breakpoints_.begin(), breakpoints_.end(), x);
    return static_cast<std::size_t>(it - breakpoints_.begin());
}

template <Scalar T>
T StepFunction<T>::operator()(const T& x) const {
    return values_[piece(x)];
}

template <Scalar T>
PayoffProfile<T>::PayoffProfile(std::vector<T> values) : values_(std::move(values)) {
    for (const auto& v : values_) {
        if (!is_finite(v) || v < 0) throw Error(Errc::NegativePayoff, "payoffs must be finite and >= 0");
    }
}

template <Scalar T>
bool is_kernel_monotone(const MarketModel<T>& m) {
    auto k = m.kernel();
    for (std::size_t i = 1; i < k.size(); ++i) {
        if (!leq(k[i], k[i - 1])) return false;
    }
    return true;
}

template <Scalar T>
bool is_adequate(const MarketModel<T>& m) {
    auto mu = m.mu();
    return std::all_of(mu.begin(), mu.end(), [&](const T& w) { return approx_eq(w, mu[0]); });
}

template <Scalar T>
StepFunction<T> cdf(const DiscreteMeasure<T>& d) {
    std::vector<T> values;
    values.reserve(d.size() + 1);
    values.emplace_back(0);
    T running(0);
    for (const auto& w : d.masses()) {
        running += w;
        values.push_back(running);
    }
    return StepFunction<T>(std::vector<T>(d.atoms().begin(), d.atoms().end()), std::move(values),
                           Continuity::Right);
}

template <Scalar T>
StepFunction<T> quantile(const DiscreteMeasure<T>& d) {
    if (!d.is_probability()) {
        throw Error(Errc::NotProbability, "quantile needs total mass 1, got " + format_number(d.total_mass()));
    }
    // Q(u) = x_k for u in (c_{k-1}, c_k]; the last level c_n = 1 is the
    // domain edge, not a breakpoint.
    std::vector<T> levels;
    levels.reserve(d.size());
    T running(0);
    for (std::size_t i = 0; i + 1 < d.size(); ++i) {
        running += d.masses()[i];
        levels.push_back(running);
    }
    return StepFunction<T>(std::move(levels), std::vector<T>(d.atoms().begin(), d.atoms().end()),
                           Continuity::Left);
}

template <Scalar T>
T market_price(const MarketModel<T>& m) {
    T p(0);
    for (std::size_t i = 0; i < m.size(); ++i) p += m.nu()[i] * m.grid()[i];
    return p;
}

template <Scalar T>
T price(const MarketModel<T>& m, const PayoffProfile<T>& theta) {
    if (theta.size() != m.size()) {
        throw Error(Errc::LengthMismatch, "payoff has " + std::to_string(theta.size()) + " entries, grid has " +
                                              std::to_string(m.size()));
    }
    T p(0);
    for (std::size_t i = 0; i < m.size(); ++i) p += m.nu()[i] * theta[i];
    return p;
}

template <Scalar T>
DiscreteMeasure<T> distribution_of(std::span<const T> mu, std::span<const T> values) {
    if (mu.size() != values.size()) throw Error(Errc::LengthMismatch, "values do not match the grid");
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<T> atoms;
    std::vector<T> masses;
    for (auto i : order) {
        if (!atoms.empty() && approx_eq(atoms.back(), values[i])) {
            masses.back() += mu[i];
        } else {
            atoms.push_back(values[i]);
            masses.push_back(mu[i]);
        }
    }
    return DiscreteMeasure<T>(std::move(atoms), std::move(masses));
}

template <Scalar T>
DiscreteMeasure<T> pushforward(const MarketModel<T>& m, const PayoffProfile<T>& theta) {
    if (theta.size() != m.size()) throw Error(Errc::LengthMismatch, "payoff does not match the grid");
    return distribution_of<T>(m.mu(), theta.values());
}

MarketModel<double> to_float(const MarketModel<Rational>& m) {
    auto conv = [](std::span<const Rational> xs) {
        std::vector<double> out;
        out.reserve(xs.size());
        for (const auto& x : xs) out.push_back(parse_number<double>(format_rational(x)));
        return out;
    };
    return MarketModel<double>(conv(m.grid()), conv(m.mu()), conv(m.nu()));
}

#define SDARB_INSTANTIATE_MEASURES(T)                                                                \
    template class DiscreteMeasure<T>;                                                               \
    template class MarketModel<T>;                                                                   \
    template class StepFunction<T>;                                                                  \
    template class PayoffProfile<T>;                                                                 \
    template bool is_kernel_monotone<T>(const MarketModel<T>&);                                      \
    template bool is_adequate<T>(const MarketModel<T>&);                                             \
    template StepFunction<T> cdf<T>(const DiscreteMeasure<T>&);                                      \
    template StepFunction<T> quantile<T>(const DiscreteMeasure<T>&);                                 \
    template T market_price<T>(const MarketModel<T>&);                                               \
    template T price<T>(const MarketModel<T>&, const PayoffProfile<T>&);                             \
    template DiscreteMeasure<T> pushforward<T>(const MarketModel<T>&, const PayoffProfile<T>&);      \
    template DiscreteMeasure<T> distribution_of<T>(std::span<const T>, std::span<const T>);

SDARB_INSTANTIATE_MEASURES(Rational)
SDARB_INSTANTIATE_MEASURES(double)

}  // namespace sdarb
