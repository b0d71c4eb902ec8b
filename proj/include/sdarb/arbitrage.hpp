#pragma once

#include <array>
#include <optional>

#include "sdarb/lp.hpp"
#include "sdarb/measures.hpp"
#include "sdarb/stochastic_orders.hpp"

namespace sdarb {

/// How the second-order (and concave) problems are posed.
///  Shortfall:    theta plus auxiliaries s_ij >= x_j - theta_i, one shortfall
///                row per benchmark atom (n + n^2 variables).
///  CuttingPlane: theta only; violated subset cuts
///                sum_{i in S} mu_i (t - theta_i) <= E[(t - X)_+] are added
///                until none remain.
///  Coupling:     joint law p of (state, benchmark value) with both marginals
///                mu; theta_i = E[benchmark | state i] dominates in the
///                concave order. The cost pi_i x_k makes the antitone coupling
///                optimal, so the optimum equals ssd_lower_bound.
enum class SsdFormulation { Auto, Shortfall, CuttingPlane, Coupling };

/// How the first-order problem is posed.
///  BigM:       theta_i >= x_{j+1} - M c_ij, sum_i mu_i c_ij <= F(x_j).
///  Assignment: theta_i = sum_k x_k y_ik with cumulative mass caps; same
///              optimum (optimal payoffs sit on atoms), tighter relaxation.
///  LevelSets:  combinatorial branch and bound on the payoff level of each
///              state, bounded by per-level fractional covering knapsacks.
enum class FsdFormulation { Auto, BigM, Assignment, LevelSets };

struct ArbitrageOptions {
    SsdFormulation ssd = SsdFormulation::Auto;
    FsdFormulation fsd = FsdFormulation::Auto;
    std::size_t shortfall_max_atoms = 16;  ///< Auto picks Shortfall up to here, Coupling above
    std::size_t big_m_max_atoms = 4;       ///< Auto picks BigM up to here, LevelSets above
    long cap_multiplier = 1;               ///< payoff cap = cap_multiplier * x_n
    lp::SolverOptions solver;
};

template <Scalar T>
struct MinPriceResult {
    OrderRelation relation = OrderRelation::SecondOrder;
    lp::OptResult<T> opt;
    std::optional<PayoffProfile<T>> theta;  ///< the optimum, or the best feasible point on NodeLimit
    T price{};
    std::size_t cuts = 0;  ///< cutting-plane rounds' cuts, 0 otherwise

    bool optimal() const noexcept { return opt.optimal(); }
};

/// The program min_price solves for rel (cutting-plane problems dump their
/// shortfall equivalent).
template <Scalar T>
lp::MixedIntegerProgram<T> build_program(const MarketModel<T>& m, OrderRelation rel, const ArbitrageOptions& opts = {});

template <Scalar T>
MinPriceResult<T> min_price(const MarketModel<T>& m, OrderRelation rel, const ArbitrageOptions& opts = {});

/// min_price below the market price: strictly in rational mode, by more than
/// 1e-8 in float mode. Throws SolverFailure if the program is not solved.
template <Scalar T>
bool has_stochastic_arbitrage(const MarketModel<T>& m, OrderRelation rel, const ArbitrageOptions& opts = {});

/// int_0^1 Q(u) Q_pi(1-u) du: no theta with theta(X) >=_2 X costs less.
template <Scalar T>
T ssd_lower_bound(const MarketModel<T>& m);

template <Scalar T>
struct Prop1Report {
    T market{};
    T cv_min{};
    T ssd_min{};
    bool cv_arbitrage = false;
    bool ssd_arbitrage = false;
    bool kernel_nonmonotone = false;

    bool holds() const { return cv_arbitrage == ssd_arbitrage && ssd_arbitrage == kernel_nonmonotone; }
};

template <Scalar T>
struct Prop2Report {
    Prop1Report<T> prop1;
    std::array<T, 4> minima{};  ///< indexed by OrderRelation
    std::array<bool, 4> arbitrage{};
    T ompd_price{};
    T lower_bound{};
    bool minima_equal = false;
    bool attained_by_ompd = false;
    bool matches_lower_bound = false;
    bool ompd_countermonotone = false;
    bool ompd_preserves_distribution = false;

    /// All five arbitrage conditions agree.
    bool equivalence() const {
        for (bool a : arbitrage) {
            if (a != prop1.kernel_nonmonotone) return false;
        }
        return prop1.holds();
    }

    bool holds() const {
        return equivalence() && minima_equal && attained_by_ompd && matches_lower_bound && ompd_countermonotone &&
               ompd_preserves_distribution;
    }
};

template <Scalar T>
Prop1Report<T> check_prop1(const MarketModel<T>& m, const ArbitrageOptions& opts = {});

/// Throws PreconditionInadequate unless all mu masses are equal.
template <Scalar T>
Prop2Report<T> check_prop2(const MarketModel<T>& m, const ArbitrageOptions& opts = {});

#define SDARB_EXTERN_ARBITRAGE(T)                                                                        \
    extern template lp::MixedIntegerProgram<T> build_program<T>(const MarketModel<T>&, OrderRelation,    \
                                                                const ArbitrageOptions&);                \
    extern template MinPriceResult<T> min_price<T>(const MarketModel<T>&, OrderRelation,                 \
                                                   const ArbitrageOptions&);                             \
    extern template bool has_stochastic_arbitrage<T>(const MarketModel<T>&, OrderRelation,               \
                                                     const ArbitrageOptions&);                           \
    extern template T ssd_lower_bound<T>(const MarketModel<T>&);                                         \
    extern template Prop1Report<T> check_prop1<T>(const MarketModel<T>&, const ArbitrageOptions&);       \
    extern template Prop2Report<T> check_prop2<T>(const MarketModel<T>&, const ArbitrageOptions&);

SDARB_EXTERN_ARBITRAGE(Rational)
SDARB_EXTERN_ARBITRAGE(double)
#undef SDARB_EXTERN_ARBITRAGE

}  // namespace sdarb
