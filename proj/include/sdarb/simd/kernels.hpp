#pragma once

#include <span>
#include <string_view>

// Dense double kernels behind the float-mode simplex. Every entry point has a
// scalar reference and an AVX2 variant; the active one is picked once at
// startup from CPUID, or forced with SD_ARB_SIMD=scalar|avx2.
//
// axpy and divide use no fused multiply-add, so both variants produce
// bit-identical results. dot reassociates the sum and only agrees to within
// rounding.

namespace sdarb::simd {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa) noexcept;

bool cpu_supports(Isa isa) noexcept;

Isa active_isa() noexcept;

/// Overrides the dispatch choice (tests and benchmarks). Returns false and
/// leaves the selection untouched when the CPU lacks the ISA.
bool force_isa(Isa isa) noexcept;

/// y += a * x
void axpy(double a, std::span<const double> x, std::span<double> y) noexcept;

/// y /= d
void divide(std::span<double> y, double d) noexcept;

double dot(std::span<const double> x, std::span<const double> y) noexcept;

namespace scalar {
void axpy(double a, std::span<const double> x, std::span<double> y) noexcept;
void divide(std::span<double> y, double d) noexcept;
double dot(std::span<const double> x, std::span<const double> y) noexcept;
}  // namespace scalar

namespace avx2 {
void axpy(double a, std::span<const double> x, std::span<double> y) noexcept;
void divide(std::span<double> y, double d) noexcept;
double dot(std::span<const double> x, std::span<const double> y) noexcept;
}  // namespace avx2

}  // namespace sdarb::simd
