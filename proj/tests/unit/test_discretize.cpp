#include <doctest.h>

#include <cmath>

#include "common.hpp"
#include "sdarb/discretize.hpp"
#include "sdarb/error.hpp"
#include "sdarb/io.hpp"
#include "sdarb/synthetic.hpp"

using namespace sdarb;
using namespace sdarb::test;

namespace {

SyntheticConfig synthetic() { return synthetic_from_json(io::parse_json(io::read_file(source_path("data/synthetic.json")))); }

}  // namespace

TEST_CASE_TEMPLATE("uniform density, four cells", T, Rational, double) {
    const DensityTable<T> d(nums<T>({"0", "1"}), nums<T>({"1", "1"}));
    const auto m = discretize_density(d, 4);
    CHECK(close(m.atoms(), nums<T>({"1/8", "3/8", "5/8", "7/8"})));
    CHECK(close(m.masses(), nums<T>({"1/4", "1/4", "1/4", "1/4"})));
}

TEST_CASE_TEMPLATE("triangular density, two cells", T, Rational, double) {
    const DensityTable<T> d(nums<T>({"0", "1"}), nums<T>({"0", "2"}));
    const auto m = discretize_density(d, 2);
    CHECK(close(m.masses(), nums<T>({"1/4", "3/4"})));
    CHECK(close(m.total_mass(), T(1)));
}

TEST_CASE("tails fold into the extreme cells and masses sum to one exactly") {
    const DensityTable<Rational> d({q("0"), q("1/3"), q("1"), q("2")}, {q("1"), q("3"), q("2"), q("1/2")});
    for (std::size_t n : {2u, 3u, 7u}) {
        const auto m = discretize_density(d, n, q("1/4"), q("3/2"));
        CHECK(m.total_mass() == 1);
        const Rational left_tail = d.integrate(q("0"), q("1/4"));
        const Rational first_cell = d.integrate(q("1/4"), q("1/4") + (q("3/2") - q("1/4")) / Rational(static_cast<long>(n)));
        CHECK(m.masses()[0] == (left_tail + first_cell) / d.integrate(q("0"), q("2")));
    }
}

TEST_CASE("density table validation") {
    CHECK_THROWS_AS(DensityTable<double>({0.0}, {1.0}), Error);
    CHECK_THROWS_AS(DensityTable<double>({0.0, 1.0}, {0.0, 0.0}), Error);
    CHECK_THROWS_AS(DensityTable<double>({1.0, 0.0}, {1.0, 1.0}), Error);
    const DensityTable<double> spike({0.0, 0.1, 0.2, 1.0}, {0.0, 1.0, 0.0, 0.0});
    try {
        discretize_density(spike, 4, 0.0, 1.0);
        FAIL("expected EmptyMass");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::EmptyMass);
    }
}

TEST_CASE_TEMPLATE("risk-neutral masses are not renormalized", T, Rational, double) {
    const DiscreteMeasure<T> mu(nums<T>({"1", "2"}), nums<T>({"1/2", "1/2"}));
    const auto nu = risk_neutral_from_kernel<T>(mu, [](const T& x) { return x; });
    CHECK(close(nu.masses(), nums<T>({"1/2", "1"})));
    const auto same = risk_neutral_from_kernel<T>(mu, [](const T&) { return T(1); });
    CHECK(same == mu);
    CHECK_THROWS_AS(risk_neutral_from_kernel<T>(mu, [](const T& x) -> T { return T(1) - x; }), Error);

    // piecewise kernel 3/5 below 3/2, 6/5 above, on five atoms
    const DiscreteMeasure<T> five(nums<T>({"1", "5/4", "3/2", "7/4", "2"}), nums<T>({"1/5", "1/5", "1/5", "1/5", "1/5"}));
    const auto shaped = risk_neutral_from_kernel<T>(five, [](const T& x) { return x < num<T>("3/2") ? num<T>("3/5") : num<T>("6/5"); });
    CHECK(close(shaped.total_mass(), num<T>("24/25")));
    const auto market = new_market<T>(nums<T>({"1", "5/4", "3/2", "7/4", "2"}), nums<T>({"1/5", "1/5", "1/5", "1/5", "1/5"}),
                                      std::vector<T>(shaped.masses().begin(), shaped.masses().end()));
    CHECK(close(market.kernel(), nums<T>({"3/5", "3/5", "6/5", "6/5", "6/5"})));
}

TEST_CASE("continuous limit with a decreasing kernel is the identity") {
    const auto cfg = synthetic();
    const auto density = synthetic_density(cfg);
    const auto kernel = synthetic_kernel(cfg, "monotone");
    const ContinuousOmpd v(density, [&](double x) { return kernel(x); });
    for (double x = 0.86; x < 1.15; x += 0.0137) {
        CAPTURE(x);
        CHECK(std::fabs(v(x) - x) <= 1e-9);
    }
}

TEST_CASE("continuous limit with a hump departs from the identity only on its pullback") {
    const auto cfg = synthetic();
    const auto density = synthetic_density(cfg);
    const auto kernel = synthetic_kernel(cfg, "hump");
    const auto at = [&](double x) { return kernel(x); };
    const ContinuousOmpd v(density, at);
    // dense-grid composition: F(x) from a fine Riemann sum, F_pi(z) likewise
    const double a = density.lo();
    const double b = density.hi();
    const int steps = 200000;
    const double h = (b - a) / steps;
    std::vector<double> xs(steps), w(steps), pis(steps);
    double total = 0;
    for (int k = 0; k < steps; ++k) {
        xs[k] = a + (k + 0.5) * h;
        w[k] = density(xs[k]) * h;
        pis[k] = at(xs[k]);
        total += w[k];
    }
    auto brute = [&](double x) {
        const double z = at(x);
        double below = 0;
        for (int k = 0; k < steps; ++k) {
            if (pis[k] <= z) below += w[k];
        }
        const double u = 1 - below / total;
        double acc = 0;
        for (int k = 0; k < steps; ++k) {
            acc += w[k] / total;
            if (acc >= u) return xs[k];
        }
        return b;
    };
    std::size_t off_identity = 0;
    for (double x = 0.86; x < 1.15; x += 0.01) {
        CAPTURE(x);
        const double vx = v(x);
        CHECK(std::fabs(vx - brute(x)) <= 2e-3);
        // where the kernel is locally decreasing and no other state shares its level, v(x) = x
        if (std::fabs(vx - x) > 2e-3) ++off_identity;
    }
    CHECK(off_identity > 0);
    CHECK(std::fabs(v(0.86) - 0.86) <= 2e-3);
    CHECK(std::fabs(v(1.14) - 1.14) <= 2e-3);
}

TEST_CASE("flat kernel regions are rejected") {
    const DensityTable<double> d({0.0, 0.5, 1.0}, {1.0, 1.0, 1.0});
    CHECK_THROWS_AS(ContinuousOmpd(d, [](double) { return 1.0; }), Error);
}

TEST_CASE("convergence study on the decreasing kernel keeps the identity") {
    const auto cfg = synthetic();
    const auto density = synthetic_density(cfg);
    const auto kernel = synthetic_kernel(cfg, "monotone");
    ConvergenceConfig cc;
    cc.n_list = {5, 20};
    const auto rows = convergence_study(density, [&](double x) { return kernel(x); }, cc);
    REQUIRE(rows.size() == 4);
    for (const auto& r : rows) {
        CHECK(r.status == lp::Status::Optimal);
        for (std::size_t i = 0; i < r.atoms.size(); ++i) CHECK(std::fabs(r.theta[i] - r.atoms[i]) <= 1e-9);
        CHECK(r.sup_gap <= 1e-9);
        CHECK(std::fabs(r.min_price - r.market_price) <= 1e-9);
    }
    cc.n_list = {20, 5};
    CHECK_THROWS_AS(convergence_study(density, [&](double x) { return kernel(x); }, cc), Error);
}
