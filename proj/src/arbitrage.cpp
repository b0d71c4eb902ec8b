#include "sdarb/arbitrage.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sdarb/ompd.hpp"
#include "sdarb/rearrangement.hpp"

namespace sdarb {

namespace {

using lp::Relation;
using lp::Term;

enum class Layout { ThetaFirst, Assignment, Coupling };

template <Scalar T>
struct Formulation {
    lp::MixedIntegerProgram<T> program;
    Layout layout = Layout::ThetaFirst;
};

template <Scalar T>
T payoff_cap(const MarketModel<T>& m, const ArbitrageOptions& opts) {
    return T(opts.cap_multiplier) * m.grid().back();
}

/// Benchmark shortfall E[(x_j - X)_+] for every atom j.
template <Scalar T>
std::vector<T> benchmark_shortfalls(const MarketModel<T>& m) {
    const auto x = m.grid();
    const auto mu = m.mu();
    std::vector<T> out(m.size(), T(0));
    for (std::size_t j = 0; j < m.size(); ++j) {
        for (std::size_t i = 0; i < j; ++i) out[j] += mu[i] * (x[j] - x[i]);
    }
    return out;
}

template <Scalar T>
void add_theta(lp::LinearProgram<T>& p, const MarketModel<T>& m, const T& lo, const T& cap) {
    for (std::size_t i = 0; i < m.size(); ++i) p.add_variable(m.nu()[i], lo, cap, "theta" + std::to_string(i));
}

template <Scalar T>
void add_mean_equality(lp::LinearProgram<T>& p, const MarketModel<T>& m) {
    std::vector<Term<T>> terms;
    for (std::size_t i = 0; i < m.size(); ++i) terms.push_back({i, m.mu()[i]});
    p.add_constraint(std::move(terms), Relation::Equal, m.objective_measure().mean(), "mean");
}

template <Scalar T>
Formulation<T> shortfall_program(const MarketModel<T>& m, bool concave, const ArbitrageOptions& opts) {
    const std::size_t n = m.size();
    const auto x = m.grid();
    Formulation<T> f;
    auto& p = f.program.lp;
    add_theta(p, m, T(0), payoff_cap(m, opts));
    const auto budget = benchmark_shortfalls(m);
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<Term<T>> shortfall_row;
        for (std::size_t i = 0; i < n; ++i) {
            auto s = p.add_variable(T(0), T(0), std::nullopt, "s" + std::to_string(i) + "_" + std::to_string(j));
            // s_ij >= x_j - theta_i
            p.add_constraint({{s, T(1)}, {i, T(1)}}, Relation::GreaterEqual, x[j],
                             "gap" + std::to_string(i) + "_" + std::to_string(j));
            shortfall_row.push_back({s, m.mu()[i]});
        }
        p.add_constraint(std::move(shortfall_row), Relation::LessEqual, budget[j], "shortfall" + std::to_string(j));
    }
    if (concave) add_mean_equality(p, m);
    return f;
}

template <Scalar T>
Formulation<T> big_m_program(const MarketModel<T>& m, const ArbitrageOptions& opts) {
    const std::size_t n = m.size();
    const auto x = m.grid();
    Formulation<T> f;
    auto& p = f.program.lp;
    add_theta(p, m, x.front(), payoff_cap(m, opts));
    const T big_m = x.back() - x.front();
    T cdf(0);
    for (std::size_t j = 0; j + 1 < n; ++j) {
        cdf += m.mu()[j];
        std::vector<Term<T>> mass_row;
        for (std::size_t i = 0; i < n; ++i) {
            auto c = f.program.add_binary(T(0), "c" + std::to_string(i) + "_" + std::to_string(j));
            // theta_i >= x_{j+1} - M c_ij
            p.add_constraint({{i, T(1)}, {c, big_m}}, Relation::GreaterEqual, x[j + 1],
                             "above" + std::to_string(i) + "_" + std::to_string(j));
            mass_row.push_back({c, m.mu()[i]});
        }
        p.add_constraint(std::move(mass_row), Relation::LessEqual, cdf, "cdf" + std::to_string(j));
    }
    return f;
}

/// y_ik = 1 when atom i pays x_k. Used for Equal and for the assignment
/// form of FirstOrder.
template <Scalar T>
Formulation<T> assignment_program(const MarketModel<T>& m, bool equal_law) {
    const std::size_t n = m.size();
    const auto x = m.grid();
    Formulation<T> f;
    f.layout = Layout::Assignment;
    auto& prog = f.program;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            prog.add_binary(m.nu()[i] * x[k], "a" + std::to_string(i) + "_" + std::to_string(k));
        }
    }
    auto var = [n](std::size_t i, std::size_t k) { return i * n + k; };
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<Term<T>> terms;
        for (std::size_t k = 0; k < n; ++k) terms.push_back({var(i, k), T(1)});
        prog.lp.add_constraint(std::move(terms), Relation::Equal, T(1), "assign" + std::to_string(i));
    }
    if (equal_law) {
        for (std::size_t k = 0; k < n; ++k) {
            std::vector<Term<T>> terms;
            for (std::size_t i = 0; i < n; ++i) terms.push_back({var(i, k), m.mu()[i]});
            prog.lp.add_constraint(std::move(terms), Relation::Equal, m.mu()[k], "law" + std::to_string(k));
        }
    } else {
        // mass paying at most x_j never exceeds F(x_j)
        T cdf(0);
        for (std::size_t j = 0; j + 1 < n; ++j) {
            cdf += m.mu()[j];
            std::vector<Term<T>> terms;
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t k = 0; k <= j; ++k) terms.push_back({var(i, k), m.mu()[i]});
            }
            prog.lp.add_constraint(std::move(terms), Relation::LessEqual, cdf, "cdf" + std::to_string(j));
        }
    }
    return f;
}

/// p_ik = joint mass of state i and benchmark value x_k, with both marginals
/// mu and cost pi_i x_k; theta_i = sum_k p_ik x_k / mu_i.
template <Scalar T>
Formulation<T> coupling_program(const MarketModel<T>& m) {
    const std::size_t n = m.size();
    const auto x = m.grid();
    Formulation<T> f;
    f.layout = Layout::Coupling;
    auto& p = f.program.lp;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            p.add_variable(m.kernel()[i] * x[k], T(0), std::nullopt, "p" + std::to_string(i) + "_" + std::to_string(k));
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<Term<T>> terms;
        for (std::size_t k = 0; k < n; ++k) terms.push_back({i * n + k, T(1)});
        p.add_constraint(std::move(terms), Relation::Equal, m.mu()[i], "state" + std::to_string(i));
    }
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<Term<T>> terms;
        for (std::size_t i = 0; i < n; ++i) terms.push_back({i * n + k, T(1)});
        p.add_constraint(std::move(terms), Relation::Equal, m.mu()[k], "value" + std::to_string(k));
    }
    return f;
}

/// The cost pi_i x_k is a product, so pairing states in increasing kernel
/// order with values in decreasing order (north-west corner) is optimal.
/// Within a kernel level set the higher atom is served first.
template <Scalar T>
lp::OptResult<T> antitone_coupling(const MarketModel<T>& m) {
    const std::size_t n = m.size();
    const auto x = m.grid();
    const auto mu = m.mu();
    const auto k = m.kernel();
    std::vector<std::size_t> states(n);
    for (std::size_t i = 0; i < n; ++i) states[i] = i;
    std::stable_sort(states.begin(), states.end(), [&](std::size_t a, std::size_t b) {
        if (k[a] != k[b]) return k[a] < k[b];
        return a > b;
    });
    lp::OptResult<T> out;
    out.solution.assign(n * n, T(0));
    std::size_t v = n;  // next benchmark value, from the top
    T value_left(0);
    for (std::size_t s = 0; s < n; ++s) {
        const std::size_t i = states[s];
        T left = mu[i];
        while (!is_zero(left)) {
            if (is_zero(value_left)) {
                if (v == 0) break;  // float round-off at the very end
                --v;
                value_left = mu[v];
            }
            const T take = left < value_left ? left : value_left;
            out.solution[i * n + v] += take;
            out.objective += k[i] * x[v] * take;
            left -= take;
            value_left -= take;
            ++out.iterations;
        }
    }
    out.status = lp::Status::Optimal;
    out.nodes = 1;
    return out;
}

template <Scalar T>
FsdFormulation resolve(FsdFormulation f, const MarketModel<T>& m, const ArbitrageOptions& opts) {
    if (f != FsdFormulation::Auto) return f;
    return m.size() <= opts.big_m_max_atoms ? FsdFormulation::BigM : FsdFormulation::LevelSets;
}

template <Scalar T>
SsdFormulation resolve(SsdFormulation f, const MarketModel<T>& m, const ArbitrageOptions& opts) {
    if (f != SsdFormulation::Auto) return f;
    return m.size() <= opts.shortfall_max_atoms ? SsdFormulation::Shortfall : SsdFormulation::Coupling;
}

template <Scalar T>
Formulation<T> formulate(const MarketModel<T>& m, OrderRelation rel, const ArbitrageOptions& opts) {
    switch (rel) {
        case OrderRelation::Equal: return assignment_program(m, true);
        case OrderRelation::FirstOrder:
            // the level search has no program of its own; dump the assignment form
            return resolve(opts.fsd, m, opts) == FsdFormulation::BigM ? big_m_program(m, opts)
                                                                      : assignment_program(m, false);
        case OrderRelation::Concave:
        case OrderRelation::SecondOrder:
            if (resolve(opts.ssd, m, opts) == SsdFormulation::Coupling) return coupling_program(m);
            return shortfall_program(m, rel == OrderRelation::Concave, opts);
    }
    throw Error(Errc::UnknownMethod, "unknown order relation");
}

template <Scalar T>
PayoffProfile<T> theta_from(const MarketModel<T>& m, Layout layout, const std::vector<T>& solution) {
    const std::size_t n = m.size();
    std::vector<T> theta(n, T(0));
    if (layout == Layout::ThetaFirst) {
        std::copy_n(solution.begin(), n, theta.begin());
    } else if (layout == Layout::Coupling) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < n; ++k) theta[i] += solution[i * n + k] * m.grid()[k];
            theta[i] /= m.mu()[i];
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < n; ++k) theta[i] += solution[i * n + k] * m.grid()[k];
        }
    }
    return PayoffProfile<T>(std::move(theta));
}

template <Scalar T>
MinPriceResult<T> finish(const MarketModel<T>& m, OrderRelation rel, Layout layout, lp::OptResult<T> opt) {
    MinPriceResult<T> out;
    out.relation = rel;
    out.opt = std::move(opt);
    if (!out.opt.solution.empty()) {
        out.theta = theta_from(m, layout, out.opt.solution);
        out.price = price(m, *out.theta);
    }
    return out;
}

template <Scalar T>
MinPriceResult<T> cutting_plane(const MarketModel<T>& m, bool concave, const ArbitrageOptions& opts) {
    const std::size_t n = m.size();
    const auto x = m.grid();
    const auto mu = m.mu();
    const auto budget = benchmark_shortfalls(m);

    lp::LinearProgram<T> master;
    // theta_i >= x_1 is the cut for the smallest threshold
    add_theta(master, m, x.front(), payoff_cap(m, opts));
    if (concave) add_mean_equality(master, m);

    std::set<std::pair<std::size_t, std::vector<bool>>> seen;
    std::size_t total_cuts = 0;
    std::size_t iterations = 0;
    for (;;) {
        auto r = lp::solve_lp(master, opts.solver);
        iterations += r.iterations;
        if (!r.optimal()) {
            r.iterations = iterations;
            auto out = finish(m, concave ? OrderRelation::Concave : OrderRelation::SecondOrder, Layout::ThetaFirst,
                              std::move(r));
            out.cuts = total_cuts;
            return out;
        }
        std::size_t added = 0;
        for (std::size_t j = 1; j < n; ++j) {
            std::vector<bool> subset(n, false);
            T used(0);
            T mass(0);
            std::vector<Term<T>> terms;
            for (std::size_t i = 0; i < n; ++i) {
                if (r.solution[i] < x[j]) {
                    subset[i] = true;
                    used += mu[i] * (x[j] - r.solution[i]);
                    mass += mu[i];
                    terms.push_back({i, mu[i]});
                }
            }
            if (!definitely_less(budget[j], used, 1e-12)) continue;
            if (!seen.emplace(j, subset).second) continue;
            // sum_{i in S} mu_i theta_i >= x_j mu(S) - E[(x_j - X)_+]
            master.add_constraint(std::move(terms), Relation::GreaterEqual, T(x[j] * mass - budget[j]),
                                  "cut" + std::to_string(total_cuts));
            ++added;
            ++total_cuts;
        }
        if (added == 0) {
            r.iterations = iterations;
            auto out = finish(m, concave ? OrderRelation::Concave : OrderRelation::SecondOrder, Layout::ThetaFirst,
                              std::move(r));
            out.cuts = total_cuts;
            return out;
        }
    }
}

/// Exact first-order search over payoff levels. theta_i = x[L_i] and level
/// j >= 1 needs mu{L >= j} >= mu{X >= x_j}; each level then costs
/// (x_j - x_{j-1}) sum_{L_i >= j} nu_i. Dropping the nesting of the sets
/// {L >= j} leaves one covering knapsack per level; their exact optima,
/// summed, bound the node, and branching only repairs nesting.
template <Scalar T>
class LevelSearch {
public:
    LevelSearch(const MarketModel<T>& m, const lp::SolverOptions& opts) : m_(m), opts_(opts), n_(m.size()) {
        order_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) order_[i] = i;
        const auto k = m.kernel();
        std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) { return k[a] < k[b]; });
        required_.assign(n_, T(0));
        for (std::size_t j = n_ - 1; j >= 1; --j) {
            required_[j] = m.mu()[j] + (j + 1 < n_ ? required_[j + 1] : T(0));
        }
    }

    lp::OptResult<T> run() {
        lp::OptResult<T> out;
        std::vector<std::size_t> identity(n_);
        for (std::size_t i = 0; i < n_; ++i) identity[i] = i;
        best_levels_ = identity;
        best_ = cost(identity);

        std::vector<Node> open;
        auto cmp = [](const Node& a, const Node& b) {
            if (a.bound != b.bound) return a.bound > b.bound;
            if (a.depth != b.depth) return a.depth < b.depth;
            return a.seq > b.seq;
        };
        std::size_t seq = 0;
        Node root{std::vector<std::size_t>(n_, 0), std::vector<std::size_t>(n_, n_ - 1), T(0), 0, seq++};
        nested_heuristics();
        if (!relax(root)) throw Error(Errc::SolverFailure, "first-order levels infeasible at the root");
        out.relaxation_objective = root.bound;
        open.push_back(std::move(root));
        while (!open.empty()) {
            std::pop_heap(open.begin(), open.end(), cmp);
            Node node = std::move(open.back());
            open.pop_back();
            if (!improves(node.bound)) continue;
            if (++out.nodes > opts_.max_nodes) {
                out.status = lp::Status::NodeLimit;
                if (!feasible(best_levels_)) throw Error(Errc::SolverFailure, "level search incumbent violates a level");
                out.objective = best_;
                for (auto l : best_levels_) out.solution.push_back(m_.grid()[l]);
                return out;
            }
            const auto split = branch_point(node);
            if (!split) continue;  // relaxation was integral and nested
            const auto [i, j] = *split;
            Node up = node;
            up.lo[i] = std::max(up.lo[i], j);
            Node down = std::move(node);
            down.hi[i] = std::min(down.hi[i], j - 1);
            for (Node* child : {&up, &down}) {
                if (child->lo[i] > child->hi[i]) continue;
                child->depth += 1;
                child->seq = seq++;
                if (!relax(*child) || !improves(child->bound)) continue;
                open.push_back(std::move(*child));
                std::push_heap(open.begin(), open.end(), cmp);
            }
        }
        out.status = lp::Status::Optimal;
        out.nodes = std::max<std::size_t>(out.nodes, 1);
        if (!feasible(best_levels_)) throw Error(Errc::SolverFailure, "level search incumbent violates a level");
        out.objective = best_;
        for (auto l : best_levels_) out.solution.push_back(m_.grid()[l]);
        if (definitely_less(best_, *out.relaxation_objective)) {
            throw Error(Errc::SolverFailure, "level search optimum below its root bound");
        }
        return out;
    }

private:
    struct Node {
        std::vector<std::size_t> lo;
        std::vector<std::size_t> hi;
        T bound;
        std::size_t depth;
        std::size_t seq;
        std::vector<std::vector<std::size_t>> taken{};  ///< cheapest cover per level
    };

    bool improves(const T& bound) const {
        if constexpr (is_exact_v<T>) {
            return bound < best_;
        } else {
            return bound < best_ - 1e-12 * std::max(1.0, std::fabs(best_));
        }
    }

    bool covered(const T& need) const {
        if constexpr (is_exact_v<T>) {
            return sgn(need) <= 0;
        } else {
            return need <= opts_.feasibility_eps;
        }
    }

    /// mu{L >= j} >= mu{X >= x_j} at every level.
    bool feasible(const std::vector<std::size_t>& levels) const {
        for (std::size_t j = 1; j < n_; ++j) {
            T need = required_[j];
            for (std::size_t i = 0; i < n_; ++i) {
                if (levels[i] >= j) need -= m_.mu()[i];
            }
            if (!covered(need)) return false;
        }
        return true;
    }

    T cost(const std::vector<std::size_t>& levels) const {
        T c(0);
        for (std::size_t i = 0; i < n_; ++i) c += m_.nu()[i] * m_.grid()[levels[i]];
        return c;
    }

    /// Cheapest cover of `need` by the listed states (already in kernel
    /// order). The fractional optimum takes states in order up to a critical
    /// one; states whose forced exclusion (below it) or inclusion (above it)
    /// would cost more than a heuristic cover are fixed, and the rest are
    /// searched depth-first. Returns false if need cannot be covered.
    bool cover(const std::vector<std::size_t>& items, const T& need, T& best_cost, std::vector<std::size_t>& best_set) {
        const auto mu = m_.mu();
        const auto nu = m_.nu();
        const auto ratio = m_.kernel();
        const std::size_t k = items.size();
        T total(0);
        for (auto i : items) total += mu[i];
        if (!covered(T(need - total))) return false;

        std::size_t crit = k;
        T lp_bound(0);
        {
            T left = need;
            for (std::size_t r = 0; r < k; ++r) {
                const auto i = items[r];
                if (leq<T>(mu[i], left)) {
                    left -= mu[i];
                    lp_bound += nu[i];
                    if (covered(left)) break;
                } else {
                    lp_bound += nu[i] * (left / mu[i]);
                    crit = r;
                    break;
                }
            }
        }
        best_set.clear();
        best_cost = T(0);
        if (crit == k) {
            // the whole states up to the cover point already meet need exactly
            T left = need;
            for (std::size_t r = 0; r < k && !covered(left); ++r) {
                left -= mu[items[r]];
                best_cost += nu[items[r]];
                best_set.push_back(items[r]);
            }
            return true;
        }

        // Incumbent: the whole states before the critical one leave a deficit
        // delta; close it with the cheapest one or two later states, possibly
        // after dropping one earlier state. Then a short depth-first polish.
        T head_mass(0);
        T head_cost(0);
        for (std::size_t r = 0; r < crit; ++r) {
            head_mass += mu[items[r]];
            head_cost += nu[items[r]];
        }
        // later states by mass, with the cheapest two at or above each position
        std::vector<std::size_t> tail(items.begin() + static_cast<std::ptrdiff_t>(crit), items.end());
        std::sort(tail.begin(), tail.end(), [&](std::size_t x, std::size_t y) { return mu[x] < mu[y]; });
        const std::size_t t = tail.size();
        constexpr std::size_t none = static_cast<std::size_t>(-1);  // no state
        std::vector<std::array<std::size_t, 2>> cheapest(t + 1, {none, none});
        auto cost_of = [&](std::size_t i) { return nu[i]; };
        for (std::size_t r = t; r-- > 0;) {
            auto best2 = cheapest[r + 1];
            const auto i = tail[r];
            if (best2[0] == none || cost_of(i) < cost_of(best2[0])) {
                best2 = {i, best2[0]};
            } else if (best2[1] == none || cost_of(i) < cost_of(best2[1])) {
                best2[1] = i;
            }
            cheapest[r] = best2;
        }
        auto first_with_mass = [&](const T& want) {
            // first tail position whose mass covers want
            std::size_t lo = 0;
            std::size_t hi = t;
            while (lo < hi) {
                const std::size_t mid = (lo + hi) / 2;
                if (covered(T(want - mu[tail[mid]]))) {
                    hi = mid;
                } else {
                    lo = mid + 1;
                }
            }
            return lo;
        };
        std::vector<std::size_t> head(items.begin(), items.begin() + static_cast<std::ptrdiff_t>(crit));
        best_set = head;
        best_set.push_back(items[crit]);
        best_cost = head_cost + nu[items[crit]];
        auto consider = [&](std::size_t drop, std::size_t a, std::size_t b, const T& c) {
            if (!(c < best_cost)) return;
            best_cost = c;
            best_set.clear();
            for (auto i : head) {
                if (i != drop) best_set.push_back(i);
            }
            best_set.push_back(a);
            if (b != none) best_set.push_back(b);
        };
        auto close = [&](std::size_t drop, const T& want, const T& base) {
            // one state
            const auto p = first_with_mass(want);
            if (p < t) consider(drop, cheapest[p][0], none, T(base + nu[cheapest[p][0]]));
            // two states
            for (std::size_t r = 0; r < t; ++r) {
                const auto a = tail[r];
                if (covered(T(want - mu[a]))) break;  // a alone already covers
                const auto q = first_with_mass(T(want - mu[a]));
                if (q >= t) continue;
                auto b = cheapest[q][0] == a ? cheapest[q][1] : cheapest[q][0];
                if (b == none) continue;
                consider(drop, a, b, T(base + nu[a] + nu[b]));
            }
        };
        close(none, T(need - head_mass), head_cost);
        for (auto d : head) close(d, T(need - head_mass + mu[d]), T(head_cost - nu[d]));
        {
            std::vector<std::size_t> chosen;
            std::size_t steps = 0;
            auto frac = [&](std::size_t r, T left) {
                T extra(0);
                for (; r < k && !covered(left); ++r) {
                    const auto i = items[r];
                    if (leq<T>(mu[i], left)) {
                        left -= mu[i];
                        extra += nu[i];
                    } else {
                        extra += nu[i] * (left / mu[i]);
                        left = T(0);
                    }
                }
                return extra;
            };
            auto dfs = [&](auto&& self, std::size_t r, const T& left, const T& cost) -> void {
                if (++steps > 20000) return;
                if (covered(left)) {
                    if (cost < best_cost) {
                        best_cost = cost;
                        best_set = chosen;
                    }
                    return;
                }
                if (r == k || !(T(cost + frac(r, left)) < best_cost)) return;
                chosen.push_back(items[r]);
                self(self, r + 1, T(left - mu[items[r]]), T(cost + nu[items[r]]));
                chosen.pop_back();
                self(self, r + 1, left, cost);
            };
            dfs(dfs, 0, need, T(0));
        }

        const T pivot = ratio[items[crit]];
        const T slack = is_exact_v<T> ? T(0) : T(1e-12 * std::max(1.0, std::fabs(to_double(best_cost))));
        T base_mass(0);
        T base_cost(0);
        std::vector<std::size_t> fixed_in;
        std::vector<std::size_t> core;
        for (std::size_t r = 0; r < k; ++r) {
            const auto i = items[r];
            if (r < crit && lp_bound + mu[i] * (pivot - ratio[i]) > best_cost + slack) {
                fixed_in.push_back(i);
                base_mass += mu[i];
                base_cost += nu[i];
            } else if (r > crit && lp_bound + mu[i] * (ratio[i] - pivot) > best_cost + slack) {
                continue;
            } else {
                core.push_back(i);
            }
        }

        const std::size_t c = core.size();
        std::vector<T> suffix(c + 1, T(0));
        for (std::size_t r = c; r-- > 0;) suffix[r] = suffix[r + 1] + mu[core[r]];
        auto prune = [&](const T& bound) {
            if constexpr (is_exact_v<T>) {
                return bound >= best_cost;
            } else {
                return bound >= best_cost - 1e-12 * std::max(1.0, std::fabs(best_cost));
            }
        };
        auto fractional = [&](std::size_t r, T left) {
            T extra(0);
            for (; r < c && !covered(left); ++r) {
                const auto i = core[r];
                if (leq<T>(mu[i], left)) {
                    left -= mu[i];
                    extra += nu[i];
                } else {
                    extra += nu[i] * (left / mu[i]);
                    left = T(0);
                }
            }
            return extra;
        };
        // Pareto frontier over the core in order: (mass, cost) pairs where no
        // other pair has at least the mass for at most the cost.
        struct Label {
            T mass;
            T cost;
            std::size_t trail;  // index into trail, or npos
        };
        struct Step {
            std::size_t item;
            std::size_t prev;
        };
        constexpr std::size_t npos = static_cast<std::size_t>(-1);
        std::vector<Step> trail;
        std::vector<Label> labels{{base_mass, base_cost, npos}};
        std::vector<Label> next;
        bool improved = false;
        std::size_t best_trail = npos;
        std::size_t work = 0;
        for (std::size_t r = 0; r < c && !labels.empty(); ++r) {
            const auto i = core[r];
            next.clear();
            for (const auto& l : labels) {
                next.push_back(l);
                Label with{l.mass + mu[i], l.cost + nu[i], trail.size()};
                trail.push_back({i, l.trail});
                if (covered(T(need - with.mass))) {
                    if (!prune(with.cost)) {
                        best_cost = with.cost;
                        best_trail = with.trail;
                        improved = true;
                    }
                } else {
                    next.push_back(std::move(with));
                }
            }
            std::sort(next.begin(), next.end(), [](const Label& x, const Label& y) {
                if (x.mass != y.mass) return x.mass > y.mass;
                return x.cost < y.cost;
            });
            labels.clear();
            for (auto& l : next) {
                if (!labels.empty() && !(l.cost < labels.back().cost)) continue;  // dominated
                if (!covered(T(need - l.mass - suffix[r + 1]))) continue;
                if (prune(T(l.cost + fractional(r + 1, T(need - l.mass))))) continue;
                labels.push_back(std::move(l));
            }
            work += labels.size();
            if (work > opts_.max_iterations) {
                throw Error(Errc::SolverFailure, "level cover search too large (core " + std::to_string(c) + ")");
            }
        }
        std::vector<std::size_t> best_core;
        for (auto t = best_trail; improved && t != npos; t = trail[t].prev) best_core.push_back(trail[t].item);
        if (improved) {
            best_set = fixed_in;
            best_set.insert(best_set.end(), best_core.begin(), best_core.end());
        }
        return true;
    }

    /// Nested covers built one level at a time: top-down each level adds the
    /// cheapest cover of its remaining deficit, bottom-up each level picks the
    /// cheapest cover inside the level below.
    void nested_heuristics() {
        const auto mu = m_.mu();
        for (int pass = 0; pass < 2; ++pass) {
            std::vector<std::size_t> levels(n_, 0);
            std::vector<bool> in(n_, pass == 1);
            bool ok = true;
            for (std::size_t step = 1; step < n_ && ok; ++step) {
                const std::size_t j = pass == 0 ? n_ - step : step;
                std::vector<std::size_t> items;
                T need = required_[j];
                for (std::size_t i : order_) {
                    if (pass == 0) {
                        if (in[i]) {
                            need -= mu[i];
                        } else {
                            items.push_back(i);
                        }
                    } else if (in[i]) {
                        items.push_back(i);
                    }
                }
                T c(0);
                std::vector<std::size_t> set;
                if (covered(need)) {
                    set.clear();
                } else if (!cover(items, need, c, set)) {
                    ok = false;
                    break;
                }
                if (pass == 0) {
                    for (auto i : set) {
                        in[i] = true;
                        levels[i] = j;
                    }
                } else {
                    std::fill(in.begin(), in.end(), false);
                    for (auto i : set) {
                        in[i] = true;
                        levels[i] = j;
                    }
                }
            }
            if (!ok) continue;
            const T c = cost(levels);
            if (improves(c)) {
                best_ = c;
                best_levels_ = std::move(levels);
            }
        }
    }

    /// Fills node.bound and node.taken with each level's cheapest cover;
    /// false if some level cannot be covered.
    bool relax(Node& node) {
        const auto x = m_.grid();
        const auto mu = m_.mu();
        const auto nu = m_.nu();
        node.taken.assign(n_, {});
        T bound(0);
        for (std::size_t i = 0; i < n_; ++i) bound += nu[i] * x[node.lo[i]];
        std::vector<std::size_t> items;
        for (std::size_t j = 1; j < n_; ++j) {
            T need = required_[j];
            for (std::size_t i = 0; i < n_; ++i) {
                if (node.lo[i] >= j) need -= mu[i];
            }
            if (covered(need)) continue;
            items.clear();
            for (std::size_t i : order_) {
                if (node.lo[i] < j && node.hi[i] >= j) items.push_back(i);
            }
            T c(0);
            if (!cover(items, need, c, node.taken[j])) return false;
            bound += (x[j] - x[j - 1]) * c;
        }
        node.bound = bound;
        // lifting every state to the top level that uses it is feasible
        std::vector<std::size_t> levels = node.lo;
        for (std::size_t j = 1; j < n_; ++j) {
            for (auto i : node.taken[j]) levels[i] = std::max(levels[i], j);
        }
        const T c = cost(levels);
        if (improves(c)) {
            best_ = c;
            best_levels_ = std::move(levels);
        }
        return true;
    }

    /// A (state, level) pair to branch on, or nothing when the level covers
    /// are nested (then the bound is attained).
    std::optional<std::pair<std::size_t, std::size_t>> branch_point(const Node& node) const {
        std::vector<std::vector<bool>> in(n_, std::vector<bool>(n_, false));
        for (std::size_t j = 1; j < n_; ++j) {
            for (std::size_t i = 0; i < n_; ++i) in[i][j] = node.lo[i] >= j;
            for (auto i : node.taken[j]) in[i][j] = true;
        }
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t b = n_ - 1; b >= 2; --b) {
                if (!in[i][b]) continue;
                for (std::size_t a = 1; a < b; ++a) {
                    if (!in[i][a]) return std::pair{i, b};
                }
                break;
            }
        }
        return std::nullopt;
    }

    const MarketModel<T>& m_;
    lp::SolverOptions opts_;
    std::size_t n_;
    std::vector<std::size_t> order_;
    std::vector<T> required_;  // required_[j] = mu{X >= x_j}
    T best_{};
    std::vector<std::size_t> best_levels_;
};

}  // namespace

template <Scalar T>
lp::MixedIntegerProgram<T> build_program(const MarketModel<T>& m, OrderRelation rel, const ArbitrageOptions& opts) {
    return formulate(m, rel, opts).program;
}

template <Scalar T>
MinPriceResult<T> min_price(const MarketModel<T>& m, OrderRelation rel, const ArbitrageOptions& opts) {
    const bool second_order = rel == OrderRelation::SecondOrder || rel == OrderRelation::Concave;
    if (second_order && resolve(opts.ssd, m, opts) == SsdFormulation::CuttingPlane) {
        return cutting_plane(m, rel == OrderRelation::Concave, opts);
    }
    if (second_order && resolve(opts.ssd, m, opts) == SsdFormulation::Coupling) {
        return finish(m, rel, Layout::Coupling, antitone_coupling(m));
    }
    if (rel == OrderRelation::FirstOrder && resolve(opts.fsd, m, opts) == FsdFormulation::LevelSets) {
        return finish(m, rel, Layout::ThetaFirst, LevelSearch<T>(m, opts.solver).run());
    }
    auto f = formulate(m, rel, opts);
    auto opt = f.program.binaries.empty() ? lp::solve_lp(f.program.lp, opts.solver)
                                          : lp::solve_milp(f.program, opts.solver);
    if (rel == OrderRelation::Equal && opt.optimal() && is_adequate(m) && opt.nodes != 1) {
        // equal masses: the relaxation is the assignment polytope, whose
        // vertices are permutation matrices
        throw Error(Errc::SolverFailure, "assignment relaxation was not integral under equal masses");
    }
    return finish(m, rel, f.layout, std::move(opt));
}

template <Scalar T>
bool has_stochastic_arbitrage(const MarketModel<T>& m, OrderRelation rel, const ArbitrageOptions& opts) {
    auto r = min_price(m, rel, opts);
    if (!r.optimal()) {
        throw Error(Errc::SolverFailure,
                    std::string(to_string(rel)) + " program ended with status " + std::string(to_string(r.opt.status)));
    }
    return definitely_less(r.price, market_price(m), 1e-8);
}

template <Scalar T>
T ssd_lower_bound(const MarketModel<T>& m) {
    const auto q = quantile(m.objective_measure());
    const auto q_kernel = quantile(distribution_of<T>(m.mu(), m.kernel()));
    return quantile_product_integral(q, q_kernel, true);
}

namespace {

template <Scalar T>
T solved_price(const MarketModel<T>& m, OrderRelation rel, const ArbitrageOptions& opts) {
    auto r = min_price(m, rel, opts);
    if (!r.optimal()) {
        throw Error(Errc::SolverFailure,
                    std::string(to_string(rel)) + " program ended with status " + std::string(to_string(r.opt.status)));
    }
    return r.price;
}

}  // namespace

template <Scalar T>
Prop1Report<T> check_prop1(const MarketModel<T>& m, const ArbitrageOptions& opts) {
    Prop1Report<T> r;
    r.market = market_price(m);
    r.cv_min = solved_price(m, OrderRelation::Concave, opts);
    r.ssd_min = solved_price(m, OrderRelation::SecondOrder, opts);
    r.cv_arbitrage = definitely_less(r.cv_min, r.market, 1e-8);
    r.ssd_arbitrage = definitely_less(r.ssd_min, r.market, 1e-8);
    r.kernel_nonmonotone = !is_kernel_monotone(m);
    return r;
}

template <Scalar T>
Prop2Report<T> check_prop2(const MarketModel<T>& m, const ArbitrageOptions& opts) {
    if (!is_adequate(m)) {
        throw Error(Errc::PreconditionInadequate, "the five-way equivalence needs equal masses");
    }
    Prop2Report<T> r;
    r.prop1 = check_prop1(m, opts);
    r.minima[static_cast<std::size_t>(OrderRelation::Equal)] = solved_price(m, OrderRelation::Equal, opts);
    r.minima[static_cast<std::size_t>(OrderRelation::FirstOrder)] = solved_price(m, OrderRelation::FirstOrder, opts);
    r.minima[static_cast<std::size_t>(OrderRelation::Concave)] = r.prop1.cv_min;
    r.minima[static_cast<std::size_t>(OrderRelation::SecondOrder)] = r.prop1.ssd_min;
    for (std::size_t k = 0; k < 4; ++k) r.arbitrage[k] = definitely_less(r.minima[k], r.prop1.market, 1e-8);

    const auto theta = ompd(m);
    r.ompd_price = price(m, theta);
    r.lower_bound = ssd_lower_bound(m);
    r.minima_equal = std::all_of(r.minima.begin(), r.minima.end(),
                                 [&](const T& v) { return approx_eq(v, r.minima[0]); });
    r.attained_by_ompd = approx_eq(r.ompd_price, r.minima[0]);
    r.matches_lower_bound = approx_eq(r.lower_bound, r.minima[0]);
    r.ompd_countermonotone = is_countermonotone(m, theta, kernel_profile(m));
    r.ompd_preserves_distribution = same_distribution(pushforward(m, theta), m.objective_measure());
    return r;
}

#define SDARB_INSTANTIATE_ARBITRAGE(T)                                                                           \
    template lp::MixedIntegerProgram<T> build_program<T>(const MarketModel<T>&, OrderRelation,                   \
                                                         const ArbitrageOptions&);                               \
    template MinPriceResult<T> min_price<T>(const MarketModel<T>&, OrderRelation, const ArbitrageOptions&);      \
    template bool has_stochastic_arbitrage<T>(const MarketModel<T>&, OrderRelation, const ArbitrageOptions&);    \
    template T ssd_lower_bound<T>(const MarketModel<T>&);                                                        \
    template Prop1Report<T> check_prop1<T>(const MarketModel<T>&, const ArbitrageOptions&);                      \
    template Prop2Report<T> check_prop2<T>(const MarketModel<T>&, const ArbitrageOptions&);

SDARB_INSTANTIATE_ARBITRAGE(Rational)
SDARB_INSTANTIATE_ARBITRAGE(double)

}  // namespace sdarb
