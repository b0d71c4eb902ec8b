#include "sdarb/lp.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <queue>
#include <span>
#include <utility>

#include "sdarb/error.hpp"
#include "sdarb/simd/kernels.hpp"

namespace sdarb::lp {

std::string_view to_string(Status s) noexcept {
    switch (s) {
        case Status::Optimal: return "Optimal";
        case Status::Infeasible: return "Infeasible";
        case Status::Unbounded: return "Unbounded";
        case Status::IterationLimit: return "IterationLimit";
        case Status::NodeLimit: return "NodeLimit";
    }
    return "?";
}

template <Scalar T>
void LinearProgram<T>::validate() const {
    const std::size_t n = objective.size();
    if (lower.size() != n || upper.size() != n) {
        throw Error(Errc::InvalidProgram, "bound vectors do not match the objective length");
    }
    for (std::size_t j = 0; j < n; ++j) {
        if (!is_finite(objective[j]) || !is_finite(lower[j]) || (upper[j] && !is_finite(*upper[j]))) {
            throw Error(Errc::InvalidProgram, "non-finite data on variable " + std::to_string(j));
        }
    }
    for (const auto& c : constraints) {
        if (!is_finite(c.rhs)) throw Error(Errc::InvalidProgram, "non-finite rhs in " + c.name);
        for (const auto& t : c.terms) {
            if (t.var >= n) throw Error(Errc::InvalidProgram, "variable index out of range in " + c.name);
            if (!is_finite(t.coef)) throw Error(Errc::InvalidProgram, "non-finite coefficient in " + c.name);
        }
    }
}

template <Scalar T>
void MixedIntegerProgram<T>::validate() const {
    lp.validate();
    for (auto b : binaries) {
        if (b >= lp.num_variables()) throw Error(Errc::InvalidProgram, "binary index out of range");
        if (lp.lower[b] < T(0) || !lp.upper[b] || *lp.upper[b] > T(1)) {
            throw Error(Errc::InvalidProgram, "binary " + lp.names[b] + " must be bounded within [0,1]");
        }
    }
}

namespace {

template <Scalar T>
bool is_nonzero(const T& a, double eps) {
    if constexpr (is_exact_v<T>) {
        (void)eps;
        return sgn(a) != 0;
    } else {
        return std::fabs(a) > eps;
    }
}

template <Scalar T>
bool above(const T& a, double eps) {
    if constexpr (is_exact_v<T>) {
        (void)eps;
        return sgn(a) > 0;
    } else {
        return a > eps;
    }
}

template <Scalar T>
bool below(const T& a, double eps) {
    if constexpr (is_exact_v<T>) {
        (void)eps;
        return sgn(a) < 0;
    } else {
        return a < -eps;
    }
}

/// Dense tableau in "all nonbasic at zero" form. Structural columns with an
/// upper bound u may be complemented (x = u - x'), which is how bound flips
/// and leaving-at-upper are represented.
template <Scalar T>
class Simplex {
public:
    Simplex(const LinearProgram<T>& p, std::span<const T> lower, std::span<const std::optional<T>> upper,
            const SolverOptions& opts)
        : p_(p), opts_(opts) {
        setup(lower, upper);
    }

    OptResult<T> run() {
        OptResult<T> out;
        if (infeasible_) {
            out.status = Status::Infeasible;
            return out;
        }
        if (num_art_ > 0) {
            load_phase1_objective();
            Status s = iterate();
            if (s != Status::Optimal) {
                out.status = s == Status::Unbounded ? Status::Infeasible : s;
                out.iterations = iterations_;
                return out;
            }
            if (above(T(-obj_[rhs_col()]), opts_.feasibility_eps)) {
                out.status = Status::Infeasible;
                out.iterations = iterations_;
                return out;
            }
            drive_out_artificials();
        }
        load_phase2_objective();
        Status s = iterate();
        out.iterations = iterations_;
        out.status = s;
        if (s != Status::Optimal) return out;
        out.solution = extract();
        out.objective = T(0);
        for (std::size_t j = 0; j < p_.num_variables(); ++j) out.objective += p_.objective[j] * out.solution[j];
        out.nodes = 1;
        return out;
    }

private:
    std::size_t rhs_col() const noexcept { return width_ - 1; }
    T* row(std::size_t r) noexcept { return tab_.data() + r * width_; }
    std::size_t first_art() const noexcept { return num_struct_ + num_slack_; }

    void setup(std::span<const T> lower, std::span<const std::optional<T>> upper) {
        const std::size_t n = p_.num_variables();
        col_of_var_.assign(n, -1);
        shift_.assign(lower.begin(), lower.end());
        for (std::size_t j = 0; j < n; ++j) {
            if (upper[j]) {
                if (definitely_less(*upper[j], lower[j])) {
                    infeasible_ = true;
                    return;
                }
                if (*upper[j] == lower[j]) continue;  // fixed: folded into the rhs
                caps_.push_back(T(*upper[j] - lower[j]));
            } else {
                caps_.emplace_back(std::nullopt);
            }
            col_of_var_[j] = static_cast<long>(var_of_col_.size());
            var_of_col_.push_back(j);
        }
        num_struct_ = var_of_col_.size();

        // Normalized rows: dense structural coefficients, rhs >= 0.
        struct Row {
            std::vector<T> coef;
            Relation rel;
            T rhs;
        };
        std::vector<Row> rows;
        rows.reserve(p_.constraints.size());
        for (const auto& c : p_.constraints) {
            Row r{std::vector<T>(num_struct_, T(0)), c.rel, c.rhs};
            bool any = false;
            for (const auto& t : c.terms) {
                r.rhs -= t.coef * shift_[t.var];
                if (col_of_var_[t.var] >= 0) {
                    r.coef[static_cast<std::size_t>(col_of_var_[t.var])] += t.coef;
                    any = true;
                }
            }
            if (!any || std::none_of(r.coef.begin(), r.coef.end(),
                                     [&](const T& a) { return is_nonzero(a, 0.0); })) {
                // 0 rel rhs: either trivially satisfied or the program is infeasible
                const bool ok = c.rel == Relation::LessEqual      ? leq(T(0), r.rhs)
                                : c.rel == Relation::GreaterEqual ? leq(r.rhs, T(0))
                                                                  : approx_eq(r.rhs, T(0));
                if (!ok) {
                    infeasible_ = true;
                    return;
                }
                continue;
            }
            // Negate when rhs < 0, and also turn ">= 0" into "<= 0" so its
            // slack can start in the basis without an artificial.
            const bool negate = r.rhs < T(0) || (sgn_of(r.rhs) == 0 && r.rel == Relation::GreaterEqual);
            if (negate) {
                for (auto& a : r.coef) a = -a;
                r.rhs = -r.rhs;
                if (r.rel == Relation::LessEqual) r.rel = Relation::GreaterEqual;
                else if (r.rel == Relation::GreaterEqual) r.rel = Relation::LessEqual;
            }
            if constexpr (!is_exact_v<T>) {
                if (r.rhs < 0) r.rhs = 0;
            }
            rows.push_back(std::move(r));
        }

        num_slack_ = 0;
        num_art_ = 0;
        for (const auto& r : rows) {
            if (r.rel != Relation::Equal) ++num_slack_;
            if (r.rel != Relation::LessEqual) ++num_art_;
        }
        m_ = rows.size();
        width_ = num_struct_ + num_slack_ + num_art_ + 1;
        tab_.assign(m_ * width_, T(0));
        obj_.assign(width_, T(0));
        basis_.assign(m_, 0);
        is_basic_.assign(width_ - 1, 0);
        flipped_.assign(num_struct_, 0);

        std::size_t slack = num_struct_;
        std::size_t art = first_art();
        for (std::size_t r = 0; r < m_; ++r) {
            T* tr = row(r);
            for (std::size_t c = 0; c < num_struct_; ++c) tr[c] = rows[r].coef[c];
            tr[rhs_col()] = rows[r].rhs;
            switch (rows[r].rel) {
                case Relation::LessEqual:
                    tr[slack] = T(1);
                    set_basic(r, slack++);
                    break;
                case Relation::GreaterEqual:
                    tr[slack++] = T(-1);
                    tr[art] = T(1);
                    set_basic(r, art++);
                    break;
                case Relation::Equal:
                    tr[art] = T(1);
                    set_basic(r, art++);
                    break;
            }
        }
    }

    static int sgn_of(const T& a) {
        if constexpr (is_exact_v<T>) {
            return sgn(a);
        } else {
            return (a > 0) - (a < 0);
        }
    }

    void set_basic(std::size_t r, std::size_t c) {
        basis_[r] = c;
        is_basic_[c] = 1;
    }

    const std::optional<T>& cap(std::size_t col) const {
        static const std::optional<T> none;
        return col < num_struct_ ? caps_[col] : none;
    }

    void load_phase1_objective() {
        std::fill(obj_.begin(), obj_.end(), T(0));
        for (std::size_t r = 0; r < m_; ++r) {
            if (basis_[r] < first_art()) continue;
            const T* tr = row(r);
            for (std::size_t c = 0; c < width_; ++c) {
                if (c >= first_art() && c < rhs_col()) continue;
                obj_[c] -= tr[c];
            }
        }
    }

    void load_phase2_objective() {
        std::fill(obj_.begin(), obj_.end(), T(0));
        for (std::size_t c = 0; c < num_struct_; ++c) {
            const T& cost = p_.objective[var_of_col_[c]];
            obj_[c] = flipped_[c] ? T(-cost) : cost;
            if (flipped_[c]) obj_[rhs_col()] -= cost * *caps_[c];
        }
        for (std::size_t r = 0; r < m_; ++r) {
            const T f = obj_[basis_[r]];
            if (!is_nonzero(f, 0.0)) continue;
            eliminate(obj_.data(), row(r), f);
        }
    }

    /// target -= f * source over the full width.
    void eliminate(T* target, const T* source, const T& f) {
        if constexpr (is_exact_v<T>) {
            for (auto k : nonzeros_of(source)) target[k] -= f * source[k];
        } else {
            simd::axpy(-f, std::span<const double>(source, width_), std::span<double>(target, width_));
        }
    }

    const std::vector<std::size_t>& nonzeros_of(const T* source) {
        nz_.clear();
        for (std::size_t k = 0; k < width_; ++k) {
            if (sgn(source[k]) != 0) nz_.push_back(k);
        }
        return nz_;
    }

    void pivot(std::size_t r, std::size_t c) {
        T* pr = row(r);
        if constexpr (is_exact_v<T>) {
            const Rational inv = 1 / pr[c];
            nz_.clear();
            for (std::size_t k = 0; k < width_; ++k) {
                if (sgn(pr[k]) != 0) {
                    pr[k] *= inv;
                    nz_.push_back(k);
                }
            }
            auto update = [&](T* target) {
                if (sgn(target[c]) == 0) return;
                const Rational f = target[c];
                for (auto k : nz_) target[k] -= f * pr[k];
            };
            for (std::size_t i = 0; i < m_; ++i) {
                if (i != r) update(row(i));
            }
            update(obj_.data());
        } else {
            simd::divide(std::span<double>(pr, width_), pr[c]);
            pr[c] = 1.0;
            auto update = [&](double* target) {
                const double f = target[c];
                if (f == 0.0) return;
                simd::axpy(-f, std::span<const double>(pr, width_), std::span<double>(target, width_));
                target[c] = 0.0;
            };
            for (std::size_t i = 0; i < m_; ++i) {
                if (i != r) update(row(i));
            }
            update(obj_.data());
        }
        is_basic_[basis_[r]] = 0;
        set_basic(r, c);
    }

    /// Complements structural column c: x_c = cap - x_c'.
    void flip(std::size_t c) {
        const T& u = *caps_[c];
        auto apply = [&](T* target) {
            if (!is_nonzero(target[c], 0.0)) return;
            target[rhs_col()] -= target[c] * u;
            target[c] = -target[c];
        };
        for (std::size_t i = 0; i < m_; ++i) apply(row(i));
        apply(obj_.data());
        flipped_[c] ^= 1;
    }

    Status iterate() {
        const double opt_eps = opts_.feasibility_eps;
        const double piv_eps = opts_.pivot_eps;
        for (;;) {
            if (iterations_ >= opts_.max_iterations) return Status::IterationLimit;

            // Bland: lowest-index improving column; artificials never re-enter.
            std::size_t enter = first_art();
            for (std::size_t c = 0; c < first_art(); ++c) {
                if (!is_basic_[c] && below(obj_[c], opt_eps)) {
                    enter = c;
                    break;
                }
            }
            if (enter == first_art()) return Status::Optimal;

            bool have_row = false;
            std::size_t leave_row = 0;
            bool leave_at_upper = false;
            T best{};
            for (std::size_t r = 0; r < m_; ++r) {
                const T* tr = row(r);
                const T& a = tr[enter];
                T ratio;
                bool to_upper = false;
                if (above(a, piv_eps)) {
                    ratio = tr[rhs_col()] / a;
                } else if (below(a, piv_eps) && cap(basis_[r])) {
                    ratio = (*cap(basis_[r]) - tr[rhs_col()]) / T(-a);
                    to_upper = true;
                } else {
                    continue;
                }
                if constexpr (!is_exact_v<T>) {
                    if (ratio < 0) ratio = 0;
                }
                bool take = !have_row;
                if (have_row) {
                    if constexpr (is_exact_v<T>) {
                        take = ratio < best || (ratio == best && basis_[r] < basis_[leave_row]);
                    } else {
                        const double tol = 1e-12 * std::max(1.0, std::fabs(best));
                        take = ratio < best - tol || (std::fabs(ratio - best) <= tol && basis_[r] < basis_[leave_row]);
                    }
                }
                if (take) {
                    have_row = true;
                    leave_row = r;
                    leave_at_upper = to_upper;
                    best = ratio;
                }
            }

            const auto& enter_cap = cap(enter);
            ++iterations_;
            if (enter_cap && (!have_row || !(best < *enter_cap))) {
                flip(enter);
                continue;
            }
            if (!have_row) return Status::Unbounded;
            const std::size_t leaving = basis_[leave_row];
            pivot(leave_row, enter);
            if (leave_at_upper) flip(leaving);
        }
    }

    void drive_out_artificials() {
        for (std::size_t r = 0; r < m_;) {
            if (basis_[r] < first_art()) {
                ++r;
                continue;
            }
            const T* tr = row(r);
            std::size_t col = first_art();
            for (std::size_t c = 0; c < first_art(); ++c) {
                if (!is_basic_[c] && is_nonzero(tr[c], opts_.pivot_eps)) {
                    col = c;
                    break;
                }
            }
            if (col < first_art()) {
                pivot(r, col);
                ++r;
                continue;
            }
            // Redundant row: no original column can take over the basis.
            is_basic_[basis_[r]] = 0;
            if (r + 1 != m_) {
                std::swap_ranges(row(r), row(r) + width_, row(m_ - 1));
                basis_[r] = basis_[m_ - 1];
            }
            --m_;
            tab_.resize(m_ * width_);
            basis_.resize(m_);
        }
    }

    std::vector<T> extract() const {
        std::vector<T> col_value(num_struct_, T(0));
        for (std::size_t r = 0; r < m_; ++r) {
            if (basis_[r] < num_struct_) col_value[basis_[r]] = tab_[r * width_ + width_ - 1];
        }
        std::vector<T> x(p_.num_variables());
        for (std::size_t j = 0; j < x.size(); ++j) {
            const long c = col_of_var_[j];
            if (c < 0) {
                x[j] = shift_[j];
                continue;
            }
            const auto cc = static_cast<std::size_t>(c);
            T v = col_value[cc];
            if (flipped_[cc]) v = *caps_[cc] - v;
            if constexpr (!is_exact_v<T>) {
                if (v < 0) v = 0;
                if (caps_[cc] && v > *caps_[cc]) v = *caps_[cc];
            }
            x[j] = shift_[j] + v;
        }
        return x;
    }

    const LinearProgram<T>& p_;
    SolverOptions opts_;
    bool infeasible_ = false;

    std::vector<long> col_of_var_;
    std::vector<std::size_t> var_of_col_;
    std::vector<T> shift_;
    std::vector<std::optional<T>> caps_;
    std::vector<char> flipped_;

    std::size_t num_struct_ = 0;
    std::size_t num_slack_ = 0;
    std::size_t num_art_ = 0;
    std::size_t m_ = 0;
    std::size_t width_ = 0;
    std::vector<T> tab_;
    std::vector<T> obj_;
    std::vector<std::size_t> basis_;
    std::vector<char> is_basic_;
    std::vector<std::size_t> nz_;
    std::size_t iterations_ = 0;
};

template <Scalar T>
OptResult<T> solve_with_bounds(const LinearProgram<T>& p, std::span<const T> lower,
                               std::span<const std::optional<T>> upper, const SolverOptions& opts) {
    return Simplex<T>(p, lower, upper, opts).run();
}

}  // namespace

template <Scalar T>
OptResult<T> solve_lp(const LinearProgram<T>& p, const SolverOptions& opts) {
    p.validate();
    return solve_with_bounds<T>(p, p.lower, p.upper, opts);
}

template <Scalar T>
OptResult<T> solve_milp(const MixedIntegerProgram<T>& p, const SolverOptions& opts) {
    p.validate();

    struct Node {
        T bound;
        std::size_t depth;
        std::size_t seq;
        std::vector<std::pair<std::size_t, bool>> fixings;
    };
    auto worse = [](const Node& a, const Node& b) {
        if (a.bound != b.bound) return a.bound > b.bound;
        if (a.depth != b.depth) return a.depth < b.depth;
        return a.seq > b.seq;
    };
    std::priority_queue<Node, std::vector<Node>, decltype(worse)> open(worse);

    OptResult<T> out;
    std::optional<T> incumbent_obj;
    std::vector<T> incumbent;
    std::size_t seq = 0;

    auto improves = [&](const T& value) {
        if (!incumbent_obj) return true;
        return definitely_less(value, *incumbent_obj);
    };

    auto is_integral = [&](const T& v) {
        if constexpr (is_exact_v<T>) {
            return v == 0 || v == 1;
        } else {
            return std::fabs(v - std::round(v)) <= opts.integrality_eps;
        }
    };

    auto solve_node = [&](const std::vector<std::pair<std::size_t, bool>>& fixings) {
        std::vector<T> lower = p.lp.lower;
        std::vector<std::optional<T>> upper = p.lp.upper;
        for (const auto& [var, one] : fixings) {
            lower[var] = one ? T(1) : T(0);
            upper[var] = lower[var];
        }
        ++out.nodes;
        auto r = solve_with_bounds<T>(p.lp, lower, upper, opts);
        out.iterations += r.iterations;
        return r;
    };

    auto branch_on = [&](const OptResult<T>& r, const std::vector<std::pair<std::size_t, bool>>& fixings,
                         std::size_t depth) {
        if (!improves(r.objective)) return;
        std::optional<std::size_t> pick;
        T best_dist{};
        for (auto b : p.binaries) {
            const T& v = r.solution[b];
            if (is_integral(v)) continue;
            T frac = v - T(0.5);
            if (frac < T(0)) frac = -frac;
            if (!pick || frac < best_dist) {
                pick = b;
                best_dist = frac;
            }
        }
        if (!pick) {
            incumbent = r.solution;
            if constexpr (!is_exact_v<T>) {
                for (auto b : p.binaries) incumbent[b] = std::round(incumbent[b]);
            }
            T obj(0);
            for (std::size_t j = 0; j < incumbent.size(); ++j) obj += p.lp.objective[j] * incumbent[j];
            incumbent_obj = obj;
            return;
        }
        for (bool one : {false, true}) {
            Node child{r.objective, depth + 1, seq++, fixings};
            child.fixings.emplace_back(*pick, one);
            open.push(std::move(child));
        }
    };

    auto root = solve_node({});
    if (!root.optimal()) {
        out.status = root.status;
        return out;
    }
    out.relaxation_objective = root.objective;
    branch_on(root, {}, 0);

    while (!open.empty()) {
        Node node = open.top();
        open.pop();
        if (incumbent_obj && !definitely_less(node.bound, *incumbent_obj)) continue;
        if (out.nodes >= opts.max_nodes) {
            out.status = Status::NodeLimit;
            if (incumbent_obj) {
                out.solution = std::move(incumbent);
                out.objective = *incumbent_obj;
            }
            return out;
        }
        auto r = solve_node(node.fixings);
        if (r.status == Status::Infeasible) continue;
        if (!r.optimal()) {
            out.status = r.status;
            return out;
        }
        branch_on(r, node.fixings, node.depth);
    }

    if (!incumbent_obj) {
        out.status = Status::Infeasible;
        return out;
    }
    if (definitely_less(*incumbent_obj, *out.relaxation_objective)) {
        throw Error(Errc::SolverFailure, "MILP optimum below its LP relaxation");
    }
    out.status = Status::Optimal;
    out.solution = std::move(incumbent);
    out.objective = *incumbent_obj;
    return out;
}

template <Scalar T>
void write_program(std::ostream& os, const LinearProgram<T>& p, const std::vector<std::size_t>& binaries) {
    auto term_list = [&](const std::vector<Term<T>>& terms) {
        bool first = true;
        for (const auto& t : terms) {
            const bool neg = t.coef < T(0);
            if (first) {
                os << (neg ? "- " : "");
            } else {
                os << (neg ? " - " : " + ");
            }
            os << format_number<T>(neg ? T(-t.coef) : t.coef) << ' ' << p.names[t.var];
            first = false;
        }
        if (first) os << '0';
    };
    os << "minimize\n obj: ";
    std::vector<Term<T>> obj;
    for (std::size_t j = 0; j < p.num_variables(); ++j) {
        if (is_nonzero(p.objective[j], 0.0)) obj.push_back({j, p.objective[j]});
    }
    term_list(obj);
    os << "\nsubject to\n";
    for (const auto& c : p.constraints) {
        os << ' ' << c.name << ": ";
        term_list(c.terms);
        os << (c.rel == Relation::LessEqual ? " <= " : c.rel == Relation::Equal ? " = " : " >= ")
           << format_number<T>(c.rhs) << '\n';
    }
    os << "bounds\n";
    for (std::size_t j = 0; j < p.num_variables(); ++j) {
        os << ' ' << format_number<T>(p.lower[j]) << " <= " << p.names[j];
        if (p.upper[j]) os << " <= " << format_number<T>(*p.upper[j]);
        os << '\n';
    }
    if (!binaries.empty()) {
        os << "binary\n";
        for (auto b : binaries) os << ' ' << p.names[b] << '\n';
    }
    os << "end\n";
}

template <Scalar T>
T max_violation(const LinearProgram<T>& p, const std::vector<T>& x) {
    T worst(0);
    auto note = [&](const T& v) {
        if (v > worst) worst = v;
    };
    for (std::size_t j = 0; j < p.num_variables(); ++j) {
        note(p.lower[j] - x[j]);
        if (p.upper[j]) note(x[j] - *p.upper[j]);
    }
    for (const auto& c : p.constraints) {
        T lhs(0);
        for (const auto& t : c.terms) lhs += t.coef * x[t.var];
        switch (c.rel) {
            case Relation::LessEqual: note(lhs - c.rhs); break;
            case Relation::GreaterEqual: note(c.rhs - lhs); break;
            case Relation::Equal: {
                T d = lhs - c.rhs;
                note(d < T(0) ? T(-d) : d);
                break;
            }
        }
    }
    return worst;
}

#define SDARB_INSTANTIATE_LP(T)                                                                       \
    template struct LinearProgram<T>;                                                                 \
    template struct MixedIntegerProgram<T>;                                                           \
    template OptResult<T> solve_lp<T>(const LinearProgram<T>&, const SolverOptions&);                 \
    template OptResult<T> solve_milp<T>(const MixedIntegerProgram<T>&, const SolverOptions&);         \
    template void write_program<T>(std::ostream&, const LinearProgram<T>&, const std::vector<std::size_t>&); \
    template T max_violation<T>(const LinearProgram<T>&, const std::vector<T>&);

SDARB_INSTANTIATE_LP(Rational)
SDARB_INSTANTIATE_LP(double)

}  // namespace sdarb::lp
