#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "sdarb/arbitrage.hpp"
#include "sdarb/measures.hpp"

namespace sdarb {

/// Sampled density, read as the piecewise-linear interpolant of its samples.
template <Scalar T>
class DensityTable {
public:
    DensityTable(std::vector<T> grid, std::vector<T> pdf);

    std::span<const T> grid() const noexcept { return grid_; }
    std::span<const T> pdf() const noexcept { return pdf_; }
    const T& lo() const noexcept { return grid_.front(); }
    const T& hi() const noexcept { return grid_.back(); }

    /// Linear interpolation; zero outside the table.
    T operator()(const T& x) const;

    /// Exact integral of the interpolant over [a, b] (clipped to the table).
    T integrate(const T& a, const T& b) const;

private:
    std::vector<T> grid_;
    std::vector<T> pdf_;
};

/// Sampled pricing kernel, linearly interpolated and held constant beyond the
/// end samples.
class KernelTable {
public:
    KernelTable(std::vector<double> grid, std::vector<double> values);

    double operator()(double x) const;
    std::span<const double> grid() const noexcept { return grid_; }
    std::span<const double> values() const noexcept { return values_; }

private:
    std::vector<double> grid_;
    std::vector<double> values_;
};

/// n equal cells on [lo, hi], one atom at each centre carrying the cell's
/// mass. Table mass outside [lo, hi] goes to the extreme cells; masses are
/// renormalized to sum to one.
template <Scalar T>
DiscreteMeasure<T> discretize_density(const DensityTable<T>& d, std::size_t n, const T& lo, const T& hi);

template <Scalar T>
DiscreteMeasure<T> discretize_density(const DensityTable<T>& d, std::size_t n) {
    return discretize_density(d, n, d.lo(), d.hi());
}

/// nu_n{x_i} = pi(x_i) mu_n{x_i}; not renormalized.
template <Scalar T>
DiscreteMeasure<T> risk_neutral_from_kernel(const DiscreteMeasure<T>& mu_n, const std::function<T(const T&)>& kernel_at);

/// Continuous-limit optimal measure preserving derivative
///   v(x) = Q(1 - F_pi(pi(x)))
/// for an atomless mu given by its density table. F_pi integrates the density
/// over {pi <= z} with pi linear between samples; Q inverts the exact
/// piecewise-quadratic cdf of the linear density. Requires pairwise distinct kernel
/// values at the samples (FlatKernelRegion otherwise).
class ContinuousOmpd {
public:
    ContinuousOmpd(const DensityTable<double>& mu_density, std::function<double(double)> kernel_at);

    double operator()(double x) const;

    /// mu{pi <= z}
    double kernel_cdf(double z) const;
    /// Q(u) with ties going to the leftmost sample.
    double quantile(double u) const;

private:
    DensityTable<double> density_;
    std::function<double(double)> kernel_at_;
    std::vector<double> kernel_samples_;
    std::vector<double> cumulative_;  // normalized, cumulative_[0] = 0
    double total_ = 0.0;
};

PayoffProfile<double> continuous_ompd(const DensityTable<double>& mu_density,
                                      const std::function<double(double)>& kernel_at,
                                      std::span<const double> eval_points);

struct ConvergenceRow {
    std::size_t n = 0;
    OrderRelation relation = OrderRelation::SecondOrder;
    lp::Status status = lp::Status::Optimal;
    double min_price = 0.0;
    double market_price = 0.0;
    double sup_gap = 0.0;  ///< max_i |theta*_i - v(x_i)|
    std::vector<double> atoms;
    std::vector<double> theta;
    std::vector<double> ompd;  ///< continuous v at the atoms
};

struct ConvergenceConfig {
    double lo = 0.85;
    double hi = 1.15;
    std::vector<std::size_t> n_list{5, 20, 80};
    std::vector<OrderRelation> relations{OrderRelation::FirstOrder, OrderRelation::SecondOrder};
    ArbitrageOptions arbitrage;
};

std::vector<ConvergenceRow> convergence_study(const DensityTable<double>& mu_density,
                                              const std::function<double(double)>& kernel_at,
                                              const ConvergenceConfig& config);

#define SDARB_EXTERN_DISCRETIZE(T)                                                                 \
    extern template class DensityTable<T>;                                                         \
    extern template DiscreteMeasure<T> discretize_density<T>(const DensityTable<T>&, std::size_t,   \
                                                             const T&, const T&);                  \
    extern template DiscreteMeasure<T> risk_neutral_from_kernel<T>(const DiscreteMeasure<T>&,       \
                                                                   const std::function<T(const T&)>&);

SDARB_EXTERN_DISCRETIZE(Rational)
SDARB_EXTERN_DISCRETIZE(double)
#undef SDARB_EXTERN_DISCRETIZE

}  // namespace sdarb
