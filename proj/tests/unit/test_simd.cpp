#include <doctest.h>

#include <cmath>
#include <vector>

#include "sdarb/checks.hpp"
#include "sdarb/simd/kernels.hpp"

using namespace sdarb;

namespace {

std::vector<double> draw(checks::Rng& rng, std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = static_cast<double>(rng.uniform(-1000000, 1000000)) / 7919.0;
    return v;
}

}  // namespace

TEST_CASE("vector kernels match the scalar reference") {
    if (!simd::cpu_supports(simd::Isa::Avx2)) {
        MESSAGE("AVX2 unavailable; only the scalar path is exercised");
        return;
    }
    checks::Rng rng(17);
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 8u, 15u, 16u, 17u, 63u, 200u}) {
        CAPTURE(n);
        const auto x = draw(rng, n);
        auto y1 = draw(rng, n);
        auto y2 = y1;
        simd::scalar::axpy(0.37, x, y1);
        simd::avx2::axpy(0.37, x, y2);
        CHECK(y1 == y2);
        simd::scalar::divide(y1, 3.1);
        simd::avx2::divide(y2, 3.1);
        CHECK(y1 == y2);
        const double d1 = simd::scalar::dot(x, y1);
        const double d2 = simd::avx2::dot(x, y1);
        CHECK(std::fabs(d1 - d2) <= 1e-9 * (1 + std::fabs(d1)));
    }
}

TEST_CASE("dispatch can be forced") {
    const auto before = simd::active_isa();
    CHECK(simd::force_isa(simd::Isa::Scalar));
    CHECK(simd::active_isa() == simd::Isa::Scalar);
    std::vector<double> y{1, 2, 3};
    simd::axpy(2, std::vector<double>{1, 1, 1}, y);
    CHECK(y == std::vector<double>{3, 4, 5});
    simd::force_isa(before);
}

TEST_CASE("float solves agree across instruction sets") {
    if (!simd::cpu_supports(simd::Isa::Avx2)) return;
    checks::Rng rng(19);
    const auto before = simd::active_isa();
    for (int trial = 0; trial < 40; ++trial) {
        const auto m = checks::random_market(rng, static_cast<std::size_t>(rng.uniform(3, 8)), false);
        std::vector<double> x, mu, nu;
        for (std::size_t i = 0; i < m.size(); ++i) {
            x.push_back(m.grid()[i].get_d());
            mu.push_back(m.mu()[i].get_d());
            nu.push_back(m.nu()[i].get_d());
        }
        const auto mf = new_market<double>(x, mu, nu);
        simd::force_isa(simd::Isa::Scalar);
        const auto a = min_price(mf, OrderRelation::SecondOrder);
        simd::force_isa(simd::Isa::Avx2);
        const auto b = min_price(mf, OrderRelation::SecondOrder);
        REQUIRE(a.optimal());
        REQUIRE(b.optimal());
        CHECK(std::fabs(a.price - b.price) <= 1e-9);
    }
    simd::force_isa(before);
}
