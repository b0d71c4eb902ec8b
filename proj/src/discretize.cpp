#include "sdarb/discretize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace sdarb {

template <Scalar T>
DensityTable<T>::DensityTable(std::vector<T> grid, std::vector<T> pdf) : grid_(std::move(grid)), pdf_(std::move(pdf)) {
    if (grid_.size() != pdf_.size()) throw Error(Errc::LengthMismatch, "density grid and values differ in length");
    if (grid_.size() < 2) throw Error(Errc::LengthMismatch, "density table needs at least two samples");
    for (std::size_t i = 1; i < grid_.size(); ++i) {
        if (!(grid_[i - 1] < grid_[i])) throw Error(Errc::NonIncreasingAtoms, "density grid must increase");
    }
    for (const auto& v : pdf_) {
        if (!is_finite(v) || v < T(0)) throw Error(Errc::NegativePayoff, "density values must be finite and >= 0");
    }
    if (!(integrate(lo(), hi()) > T(0))) throw Error(Errc::EmptyMass, "density table has zero mass");
}

template <Scalar T>
T DensityTable<T>::operator()(const T& x) const {
    if (x < grid_.front() || x > grid_.back()) return T(0);
    auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
    if (it == grid_.end()) return pdf_.back();
    const auto k = static_cast<std::size_t>(it - grid_.begin()) - 1;
    const T w = (x - grid_[k]) / (grid_[k + 1] - grid_[k]);
    return pdf_[k] + w * (pdf_[k + 1] - pdf_[k]);
}

template <Scalar T>
T DensityTable<T>::integrate(const T& a, const T& b) const {
    T total(0);
    if (!(a < b)) return total;
    for (std::size_t k = 0; k + 1 < grid_.size(); ++k) {
        const T from = std::max(a, grid_[k]);
        const T to = std::min(b, grid_[k + 1]);
        if (!(from < to)) continue;
        total += (to - from) * ((*this)(from) + (*this)(to)) / T(2);
    }
    return total;
}

KernelTable::KernelTable(std::vector<double> grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (grid_.size() != values_.size() || grid_.empty()) {
        throw Error(Errc::LengthMismatch, "kernel table needs matching, nonempty columns");
    }
    for (std::size_t i = 1; i < grid_.size(); ++i) {
        if (!(grid_[i - 1] < grid_[i])) throw Error(Errc::NonIncreasingAtoms, "kernel grid must increase");
    }
    for (double v : values_) {
        if (!std::isfinite(v) || !(v > 0)) throw Error(Errc::NonpositiveKernel, "kernel values must be > 0");
    }
}

double KernelTable::operator()(double x) const {
    if (x <= grid_.front()) return values_.front();
    if (x >= grid_.back()) return values_.back();
    auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
    const auto k = static_cast<std::size_t>(it - grid_.begin()) - 1;
    const double w = (x - grid_[k]) / (grid_[k + 1] - grid_[k]);
    return values_[k] + w * (values_[k + 1] - values_[k]);
}

template <Scalar T>
DiscreteMeasure<T> discretize_density(const DensityTable<T>& d, std::size_t n, const T& lo, const T& hi) {
    if (n < 2) throw Error(Errc::LengthMismatch, "need at least two cells");
    if (!(lo < hi)) throw Error(Errc::NonIncreasingAtoms, "empty interval");
    const T width = (hi - lo) / T(static_cast<long>(n));
    std::vector<T> atoms;
    std::vector<T> masses;
    atoms.reserve(n);
    masses.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const T left = lo + width * T(static_cast<long>(k));
        const T right = k + 1 == n ? hi : lo + width * T(static_cast<long>(k + 1));
        atoms.push_back(left + width / T(2));
        masses.push_back(d.integrate(left, right));
    }
    masses.front() += d.integrate(d.lo(), lo);
    masses.back() += d.integrate(hi, d.hi());
    T total(0);
    for (const auto& w : masses) total += w;
    if (!(total > T(0))) throw Error(Errc::EmptyMass, "density puts no mass on the interval");
    for (std::size_t k = 0; k < n; ++k) {
        if (!(masses[k] > T(0))) {
            throw Error(Errc::EmptyMass, "cell " + std::to_string(k) + " has zero mass");
        }
        masses[k] /= total;
    }
    return DiscreteMeasure<T>(std::move(atoms), std::move(masses));
}

template <Scalar T>
DiscreteMeasure<T> risk_neutral_from_kernel(const DiscreteMeasure<T>& mu_n, const std::function<T(const T&)>& kernel_at) {
    std::vector<T> masses;
    masses.reserve(mu_n.size());
    for (std::size_t i = 0; i < mu_n.size(); ++i) {
        const T k = kernel_at(mu_n.atoms()[i]);
        if (!is_finite(k) || !(k > T(0))) {
            throw Error(Errc::NonpositiveKernel, "kernel is not positive at atom " + std::to_string(i));
        }
        masses.push_back(k * mu_n.masses()[i]);
    }
    return DiscreteMeasure<T>(std::vector<T>(mu_n.atoms().begin(), mu_n.atoms().end()), std::move(masses));
}

ContinuousOmpd::ContinuousOmpd(const DensityTable<double>& mu_density, std::function<double(double)> kernel_at)
    : density_(mu_density), kernel_at_(std::move(kernel_at)) {
    const auto grid = density_.grid();
    kernel_samples_.reserve(grid.size());
    for (double s : grid) {
        const double k = kernel_at_(s);
        if (!std::isfinite(k) || !(k > 0)) throw Error(Errc::NonpositiveKernel, "kernel must be positive");
        kernel_samples_.push_back(k);
    }
    std::vector<double> sorted = kernel_samples_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw Error(Errc::FlatKernelRegion, "kernel takes the same value at two samples");
    }
    cumulative_.assign(grid.size(), 0.0);
    for (std::size_t k = 1; k < grid.size(); ++k) {
        cumulative_[k] = cumulative_[k - 1] + (grid[k] - grid[k - 1]) * (density_.pdf()[k] + density_.pdf()[k - 1]) / 2;
    }
    total_ = cumulative_.back();
    for (auto& c : cumulative_) c /= total_;
}

double ContinuousOmpd::kernel_cdf(double z) const {
    const auto grid = density_.grid();
    const auto pdf = density_.pdf();
    double acc = 0.0;
    auto area = [&](std::size_t k, double a, double b) {
        // linear density on cell k, integrated over [a, b]
        const double h = grid[k + 1] - grid[k];
        auto f = [&](double x) { return pdf[k] + (x - grid[k]) / h * (pdf[k + 1] - pdf[k]); };
        return (b - a) * (f(a) + f(b)) / 2;
    };
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        const double p0 = kernel_samples_[k];
        const double p1 = kernel_samples_[k + 1];
        if (p0 <= z && p1 <= z) {
            acc += area(k, grid[k], grid[k + 1]);
        } else if (p0 > z && p1 > z) {
            continue;
        } else {
            const double cross = grid[k] + (z - p0) / (p1 - p0) * (grid[k + 1] - grid[k]);
            acc += p0 <= z ? area(k, grid[k], cross) : area(k, cross, grid[k + 1]);
        }
    }
    return acc / total_;
}

double ContinuousOmpd::quantile(double u) const {
    const auto grid = density_.grid();
    if (u <= 0.0) return grid.front();
    auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) return grid.back();
    const auto k = static_cast<std::size_t>(it - cumulative_.begin());
    if (k == 0) return grid.front();
    const double c0 = cumulative_[k - 1];
    const double c1 = cumulative_[k];
    if (c1 == c0) return grid[k];
    // mass from grid[k-1] to grid[k-1] + t under the linear density is
    // p0 t + (p1 - p0) t^2 / (2h); take the root in [0, h]
    const double h = grid[k] - grid[k - 1];
    const double p0 = density_.pdf()[k - 1];
    const double p1 = density_.pdf()[k];
    const double r = (u - c0) * total_;
    const double disc = std::max(0.0, p0 * p0 + 2 * (p1 - p0) * r / h);
    const double denom = p0 + std::sqrt(disc);
    const double t = denom > 0 ? 2 * r / denom : h;
    return grid[k - 1] + std::clamp(t, 0.0, h);
}

double ContinuousOmpd::operator()(double x) const {
    return quantile(1.0 - kernel_cdf(kernel_at_(x)));
}

PayoffProfile<double> continuous_ompd(const DensityTable<double>& mu_density,
                                      const std::function<double(double)>& kernel_at,
                                      std::span<const double> eval_points) {
    const ContinuousOmpd v(mu_density, kernel_at);
    std::vector<double> out;
    out.reserve(eval_points.size());
    for (double x : eval_points) out.push_back(v(x));
    return PayoffProfile<double>(std::move(out));
}

std::vector<ConvergenceRow> convergence_study(const DensityTable<double>& mu_density,
                                              const std::function<double(double)>& kernel_at,
                                              const ConvergenceConfig& config) {
    for (std::size_t i = 1; i < config.n_list.size(); ++i) {
        if (config.n_list[i] <= config.n_list[i - 1]) {
            throw Error(Errc::NonIncreasingAtoms, "n list must be increasing");
        }
    }
    const ContinuousOmpd v(mu_density, kernel_at);
    std::function<double(const double&)> kernel_ref = [&](const double& x) { return kernel_at(x); };
    std::vector<ConvergenceRow> rows;
    for (std::size_t n : config.n_list) {
        const auto mu_n = discretize_density(mu_density, n, config.lo, config.hi);
        const auto nu_n = risk_neutral_from_kernel(mu_n, kernel_ref);
        const auto market = new_market(std::vector<double>(mu_n.atoms().begin(), mu_n.atoms().end()),
                                       std::vector<double>(mu_n.masses().begin(), mu_n.masses().end()),
                                       std::vector<double>(nu_n.masses().begin(), nu_n.masses().end()));
        std::vector<double> limit;
        for (double x : market.grid()) limit.push_back(v(x));
        for (auto rel : config.relations) {
            auto r = min_price(market, rel, config.arbitrage);
            ConvergenceRow row;
            row.n = n;
            row.relation = rel;
            row.status = r.opt.status;
            row.market_price = market_price(market);
            row.atoms.assign(market.grid().begin(), market.grid().end());
            row.ompd = limit;
            if (r.theta) {  // the optimum, or the incumbent on NodeLimit
                row.min_price = r.price;
                row.theta.assign(r.theta->values().begin(), r.theta->values().end());
                for (std::size_t i = 0; i < n; ++i) {
                    row.sup_gap = std::max(row.sup_gap, std::fabs(row.theta[i] - limit[i]));
                }
            } else {
                row.min_price = std::numeric_limits<double>::quiet_NaN();
                row.sup_gap = std::numeric_limits<double>::quiet_NaN();
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

#define SDARB_INSTANTIATE_DISCRETIZE(T)                                                                        \
    template class DensityTable<T>;                                                                            \
    template DiscreteMeasure<T> discretize_density<T>(const DensityTable<T>&, std::size_t, const T&, const T&); \
    template DiscreteMeasure<T> risk_neutral_from_kernel<T>(const DiscreteMeasure<T>&,                         \
                                                            const std::function<T(const T&)>&);

SDARB_INSTANTIATE_DISCRETIZE(Rational)
SDARB_INSTANTIATE_DISCRETIZE(double)

}  // namespace sdarb
