#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sdarb/number.hpp"

namespace sdarb::lp {

enum class Relation { LessEqual, Equal, GreaterEqual };

template <Scalar T>
struct Term {
    std::size_t var;
    T coef;
};

template <Scalar T>
struct Constraint {
    std::vector<Term<T>> terms;
    Relation rel;
    T rhs;
    std::string name;
};

/// min c.x subject to rows and per-variable bounds lower <= x <= upper.
/// Lower bounds are finite; a missing upper bound means +infinity.
template <Scalar T>
struct LinearProgram {
    std::vector<T> objective;
    std::vector<Constraint<T>> constraints;
    std::vector<T> lower;
    std::vector<std::optional<T>> upper;
    std::vector<std::string> names;

    std::size_t num_variables() const noexcept { return objective.size(); }

    std::size_t add_variable(T cost, T lo = T(0), std::optional<T> up = std::nullopt, std::string name = {}) {
        objective.push_back(std::move(cost));
        lower.push_back(std::move(lo));
        upper.push_back(std::move(up));
        if (name.empty()) name = "x" + std::to_string(objective.size() - 1);
        names.push_back(std::move(name));
        return objective.size() - 1;
    }

    void add_constraint(std::vector<Term<T>> terms, Relation rel, T rhs, std::string name = {}) {
        if (name.empty()) name = "c" + std::to_string(constraints.size());
        constraints.push_back({std::move(terms), rel, std::move(rhs), std::move(name)});
    }

    /// Throws Error(InvalidProgram) on inconsistent dimensions, out-of-range
    /// variable indices or non-finite coefficients.
    void validate() const;
};

template <Scalar T>
struct MixedIntegerProgram {
    LinearProgram<T> lp;
    std::vector<std::size_t> binaries;

    std::size_t add_binary(T cost, std::string name = {}) {
        auto v = lp.add_variable(std::move(cost), T(0), T(1), std::move(name));
        binaries.push_back(v);
        return v;
    }

    void validate() const;
};

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit, NodeLimit };

std::string_view to_string(Status s) noexcept;

template <Scalar T>
struct OptResult {
    Status status = Status::Infeasible;
    std::vector<T> solution;  ///< the optimum; for NodeLimit the best feasible point, if any
    T objective{};
    std::size_t iterations = 0;  ///< simplex pivots and bound flips, summed over nodes
    std::size_t nodes = 0;       ///< branch-and-bound nodes (1 for a plain LP)
    std::optional<T> relaxation_objective;  ///< MILP root relaxation

    bool optimal() const noexcept { return status == Status::Optimal; }
};

struct SolverOptions {
    std::size_t max_iterations = 1'000'000;
    std::size_t max_nodes = 100'000;
    double pivot_eps = 1e-10;        ///< float mode only
    double feasibility_eps = 1e-9;   ///< float mode only
    double integrality_eps = 1e-9;   ///< float mode only
};

/// Two-phase primal simplex on a dense tableau. Bland's rule throughout;
/// upper bounds handled by complementing columns rather than extra rows.
template <Scalar T>
OptResult<T> solve_lp(const LinearProgram<T>& p, const SolverOptions& opts = {});

/// Best-first branch and bound on the binaries (ties: deeper node first,
/// then creation order), branching on the most fractional binary.
template <Scalar T>
OptResult<T> solve_milp(const MixedIntegerProgram<T>& p, const SolverOptions& opts = {});

/// Plain-text standard form, one constraint per line, rationals as "p/q".
template <Scalar T>
void write_program(std::ostream& os, const LinearProgram<T>& p, const std::vector<std::size_t>& binaries = {});

/// Largest violation of any row or bound by x (0 when feasible).
template <Scalar T>
T max_violation(const LinearProgram<T>& p, const std::vector<T>& x);

#define SDARB_EXTERN_LP(T)                                                                       \
    extern template struct LinearProgram<T>;                                                     \
    extern template struct MixedIntegerProgram<T>;                                               \
    extern template OptResult<T> solve_lp<T>(const LinearProgram<T>&, const SolverOptions&);     \
    extern template OptResult<T> solve_milp<T>(const MixedIntegerProgram<T>&, const SolverOptions&); \
    extern template void write_program<T>(std::ostream&, const LinearProgram<T>&,               \
                                          const std::vector<std::size_t>&);                     \
    extern template T max_violation<T>(const LinearProgram<T>&, const std::vector<T>&);

SDARB_EXTERN_LP(Rational)
SDARB_EXTERN_LP(double)
#undef SDARB_EXTERN_LP

}  // namespace sdarb::lp
