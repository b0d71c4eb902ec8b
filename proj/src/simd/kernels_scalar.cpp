#include "sdarb/simd/kernels.hpp"

namespace sdarb::simd::scalar {

void axpy(double a, std::span<const double> x, std::span<double> y) noexcept {
    const std::size_t n = y.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double p = a * x[i];
        y[i] += p;
    }
}

void divide(std::span<double> y, double d) noexcept {
    for (auto& v : y) v /= d;
}

double dot(std::span<const double> x, std::span<const double> y) noexcept {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
    return acc;
}

}  // namespace sdarb::simd::scalar
