#include <doctest.h>

#include "common.hpp"
#include "sdarb/error.hpp"

using namespace sdarb;
using namespace sdarb::test;

TEST_CASE_TEMPLATE("kernel is nu over mu", T, Rational, double) {
    CHECK(close(example1<T>().kernel(), nums<T>({"1/2", "2"})));
    CHECK(close(example2<T>().kernel(), nums<T>({"3/5", "6/5"})));
    const auto single = new_market<T>(nums<T>({"5"}), nums<T>({"1"}), nums<T>({"1"}));
    CHECK(close(single.kernel(), nums<T>({"1"})));
}

TEST_CASE_TEMPLATE("kernel monotonicity and adequacy", T, Rational, double) {
    CHECK_FALSE(is_kernel_monotone(example1<T>()));
    CHECK_FALSE(is_kernel_monotone(example2<T>()));
    const auto thirds = nums<T>({"1/3", "1/3", "1/3"});
    const auto decreasing = new_market<T>(nums<T>({"1", "2", "3"}), thirds, nums<T>({"1", "2/3", "1/3"}));
    CHECK(is_kernel_monotone(decreasing));
    CHECK(is_adequate(decreasing));
    CHECK_FALSE(is_adequate(example1<T>()));
    const auto single = new_market<T>(nums<T>({"5"}), nums<T>({"1"}), nums<T>({"1"}));
    CHECK(is_adequate(single));
    CHECK(is_kernel_monotone(flat_market<T>()));
}

TEST_CASE_TEMPLATE("cdf and quantile", T, Rational, double) {
    const auto mu1 = example1<T>().objective_measure();
    const auto f = cdf(mu1);
    const auto qf = quantile(mu1);
    CHECK(close(f(T(1)), num<T>("2/3")));
    CHECK(close(f(T(2)), T(1)));
    CHECK(close(f(num<T>("1/2")), T(0)));
    CHECK(close(qf(num<T>("1/3")), T(1)));
    CHECK(close(qf(num<T>("2/3")), T(1)));
    CHECK(close(qf(T(1)), T(2)));
    CHECK(close(qf(T(0)), T(1)));

    const DiscreteMeasure<T> point(nums<T>({"5"}), nums<T>({"1"}));
    CHECK(close(cdf(point)(T(5)), T(1)));
    CHECK(close(cdf(point)(num<T>("49/10")), T(0)));
    CHECK(close(quantile(point)(num<T>("1/7")), T(5)));

    CHECK(close(quantile(example2<T>().objective_measure())(num<T>("2/3")), T(2)));
}

TEST_CASE_TEMPLATE("prices and pushforward", T, Rational, double) {
    const auto m1 = example1<T>();
    const auto m2 = example2<T>();
    CHECK(close(market_price(m1), num<T>("5/3")));
    CHECK(close(market_price(m2), num<T>("9/5")));
    CHECK(close(price(m1, profile<T>({"2", "1"})), num<T>("4/3")));
    CHECK(close(price(m2, profile<T>({"2", "2"})), T(2)));
    CHECK(close(price(m1, identity_profile(m1)), market_price(m1)));

    const auto swapped = pushforward(m1, profile<T>({"2", "1"}));
    CHECK(close(swapped.atoms(), nums<T>({"1", "2"})));
    CHECK(close(swapped.masses(), nums<T>({"1/3", "2/3"})));

    const auto collapsed = pushforward(m2, profile<T>({"2", "2"}));
    CHECK(close(collapsed.atoms(), nums<T>({"2"})));
    CHECK(close(collapsed.masses(), nums<T>({"1"})));

    CHECK(pushforward(m1, identity_profile(m1)) == m1.objective_measure());
}

TEST_CASE("construction errors carry their codes") {
    auto code = [](auto&& f) {
        try {
            f();
        } catch (const Error& e) {
            return e.code();
        }
        return Errc::Parse;
    };
    CHECK(code([] { new_market<Rational>({q("1"), q("1")}, {q("1/2"), q("1/2")}, {q("1/2"), q("1/2")}); }) ==
          Errc::NonIncreasingAtoms);
    CHECK(code([] { new_market<Rational>({q("1"), q("2")}, {q("1/2")}, {q("1/2"), q("1/2")}); }) ==
          Errc::LengthMismatch);
    CHECK(code([] { new_market<Rational>({q("1"), q("2")}, {q("1/2"), q("1/3")}, {q("1/2"), q("1/2")}); }) ==
          Errc::MuNotProbability);
    CHECK(code([] { new_market<Rational>({q("1"), q("2")}, {q("1"), q("0")}, {q("1/2"), q("1/2")}); }) ==
          Errc::ZeroMass);
    CHECK(code([] { new_market<Rational>({q("-1"), q("2")}, {q("1/2"), q("1/2")}, {q("1/2"), q("1/2")}); }) ==
          Errc::NegativePayoff);
}
