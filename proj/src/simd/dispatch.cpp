#include <atomic>
#include <cstdlib>
#include <string_view>

#include "sdarb/simd/kernels.hpp"

namespace sdarb::simd {

namespace {

struct Table {
    void (*axpy)(double, std::span<const double>, std::span<double>) noexcept;
    void (*divide)(std::span<double>, double) noexcept;
    double (*dot)(std::span<const double>, std::span<const double>) noexcept;
};

constexpr Table scalar_table{&scalar::axpy, &scalar::divide, &scalar::dot};
#if defined(SDARB_HAVE_AVX2)
constexpr Table avx2_table{&avx2::axpy, &avx2::divide, &avx2::dot};
#endif

Isa detect() noexcept {
    Isa best = cpu_supports(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
    if (const char* env = std::getenv("SD_ARB_SIMD")) {
        std::string_view want(env);
        if (want == "scalar") return Isa::Scalar;
        if (want == "avx2" && cpu_supports(Isa::Avx2)) return Isa::Avx2;
    }
    return best;
}

std::atomic<Isa>& selected() noexcept {
    static std::atomic<Isa> isa{detect()};
    return isa;
}

const Table& table() noexcept {
#if defined(SDARB_HAVE_AVX2)
    if (selected().load(std::memory_order_relaxed) == Isa::Avx2) return avx2_table;
#endif
    return scalar_table;
}

}  // namespace

std::string_view to_string(Isa isa) noexcept { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

bool cpu_supports(Isa isa) noexcept {
    if (isa == Isa::Scalar) return true;
#if defined(SDARB_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

Isa active_isa() noexcept { return selected().load(std::memory_order_relaxed); }

bool force_isa(Isa isa) noexcept {
    if (!cpu_supports(isa)) return false;
    selected().store(isa, std::memory_order_relaxed);
    return true;
}

void axpy(double a, std::span<const double> x, std::span<double> y) noexcept { table().axpy(a, x, y); }

void divide(std::span<double> y, double d) noexcept { table().divide(y, d); }

double dot(std::span<const double> x, std::span<const double> y) noexcept { return table().dot(x, y); }

}  // namespace sdarb::simd
