#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "sdarb/arbitrage.hpp"

namespace sdarb::checks {

inline constexpr std::uint64_t default_seed = 20240917;

/// The one generator behind every randomized suite. Draws use plain modular
/// reduction so streams are identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform integer in [lo, hi].
    long uniform(long lo, long hi) { return lo + static_cast<long>(engine_() % static_cast<std::uint64_t>(hi - lo + 1)); }
    bool coin(long num = 1, long den = 2) { return uniform(0, den - 1) < num; }

private:
    std::mt19937_64 engine_;
};

struct SuiteConfig {
    std::size_t trials = 1000;
    std::uint64_t seed = default_seed;
    std::size_t min_atoms = 2;
    std::size_t max_atoms = 8;
    std::size_t max_counterexamples = 3;
    ArbitrageOptions arbitrage;
};

struct SuiteResult {
    std::string name;
    std::size_t trials = 0;
    std::size_t failures = 0;
    std::vector<std::string> counterexamples;  ///< market JSON plus a reason

    bool ok() const noexcept { return failures == 0; }
};

/// Integer atoms, small-denominator masses and kernel values. With
/// equal_mass every atom gets 1/n. About a quarter of the draws have a
/// monotone kernel and some repeat kernel values, so level sets and the
/// no-arbitrage side both get exercised.
MarketModel<Rational> random_market(Rng& rng, std::size_t n, bool equal_mass);

DiscreteMeasure<Rational> random_measure(Rng& rng, std::size_t n);

/// min over permutations s of sum_i nu_i x_{s(i)}; the Equal problem when the
/// masses are equal.
Rational permutation_minimum(const MarketModel<Rational>& m);

SuiteResult run_prop1(const SuiteConfig& cfg);
SuiteResult run_prop2(const SuiteConfig& cfg);
/// market >= Equal >= FirstOrder >= SecondOrder >= lower bound, plus the
/// optimizer/checker round trip for every returned theta.
SuiteResult run_bounds(const SuiteConfig& cfg);
/// One result each: quantile of cdf, cdf level mass, ssd method agreement,
/// weighted majorization, rearrangement bounds.
std::vector<SuiteResult> run_lemmas(const SuiteConfig& cfg);

/// prop1 | prop2 | lemmas | bounds; UnknownMethod otherwise.
std::vector<SuiteResult> run_suite(std::string_view name, const SuiteConfig& cfg);

}  // namespace sdarb::checks
