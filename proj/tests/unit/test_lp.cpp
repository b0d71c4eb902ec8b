#include <doctest.h>

#include <sstream>

#include "common.hpp"
#include "sdarb/checks.hpp"
#include "sdarb/error.hpp"
#include "sdarb/lp.hpp"

using namespace sdarb;
using namespace sdarb::test;
using namespace sdarb::lp;

TEST_CASE_TEMPLATE("single bound", T, Rational, double) {
    LinearProgram<T> p;
    p.add_variable(T(1));
    p.add_constraint({{0, T(1)}}, Relation::GreaterEqual, T(3));
    const auto r = solve_lp(p);
    REQUIRE(r.optimal());
    CHECK(close(r.objective, T(3)));
    CHECK(close(r.solution[0], T(3)));
    CHECK(r.nodes == 1);
}

TEST_CASE_TEMPLATE("equality row", T, Rational, double) {
    LinearProgram<T> p;
    p.add_variable(T(1));
    p.add_variable(T(1));
    p.add_constraint({{0, T(1)}, {1, T(1)}}, Relation::GreaterEqual, T(2));
    p.add_constraint({{0, T(1)}, {1, T(-1)}}, Relation::Equal, T(0));
    const auto r = solve_lp(p);
    REQUIRE(r.optimal());
    CHECK(close(r.objective, T(2)));
    CHECK(close(std::span<const T>(r.solution), nums<T>({"1", "1"})));
}

TEST_CASE_TEMPLATE("infeasible and unbounded are statuses", T, Rational, double) {
    LinearProgram<T> p;
    p.add_variable(T(1), T(0), T(1));
    p.add_constraint({{0, T(1)}}, Relation::GreaterEqual, T(2));
    CHECK(solve_lp(p).status == Status::Infeasible);

    LinearProgram<T> u;
    u.add_variable(T(-1));
    u.add_variable(T(0));
    u.add_constraint({{0, T(1)}, {1, T(-1)}}, Relation::LessEqual, T(1));
    CHECK(solve_lp(u).status == Status::Unbounded);
}

TEST_CASE("malformed programs are rejected") {
    LinearProgram<Rational> p;
    p.add_variable(Rational(1));
    p.add_constraint({{3, Rational(1)}}, Relation::GreaterEqual, Rational(1));
    CHECK_THROWS_AS(solve_lp(p), Error);
}

TEST_CASE("strong duality on random programs") {
    // min c.x, A x >= b, x >= 0 against max b.y, A^T y <= c, y >= 0.
    checks::Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const auto rows = static_cast<std::size_t>(rng.uniform(1, 5));
        const auto cols = static_cast<std::size_t>(rng.uniform(1, 5));
        std::vector<std::vector<Rational>> a(rows, std::vector<Rational>(cols));
        std::vector<Rational> b(rows);
        std::vector<Rational> c(cols);
        for (auto& row : a) {
            for (auto& v : row) v = Rational(rng.uniform(0, 6));
        }
        for (std::size_t i = 0; i < rows; ++i) {
            a[i][static_cast<std::size_t>(rng.uniform(0, static_cast<long>(cols) - 1))] += 1;
            b[i] = Rational(rng.uniform(-3, 9));
        }
        for (auto& v : c) v = ratio<Rational>(rng.uniform(1, 9), rng.uniform(1, 4));

        LinearProgram<Rational> primal;
        for (const auto& v : c) primal.add_variable(v);
        for (std::size_t i = 0; i < rows; ++i) {
            std::vector<Term<Rational>> terms;
            for (std::size_t j = 0; j < cols; ++j) terms.push_back({j, a[i][j]});
            primal.add_constraint(std::move(terms), Relation::GreaterEqual, b[i]);
        }
        LinearProgram<Rational> dual;
        for (const auto& v : b) dual.add_variable(Rational(-v));
        for (std::size_t j = 0; j < cols; ++j) {
            std::vector<Term<Rational>> terms;
            for (std::size_t i = 0; i < rows; ++i) terms.push_back({i, a[i][j]});
            dual.add_constraint(std::move(terms), Relation::LessEqual, c[j]);
        }
        const auto rp = solve_lp(primal);
        const auto rd = solve_lp(dual);
        CAPTURE(trial);
        REQUIRE(rp.optimal());
        REQUIRE(rd.optimal());
        CHECK(rp.objective == -rd.objective);
        CHECK(max_violation(primal, rp.solution) == 0);
        CHECK(max_violation(dual, rd.solution) == 0);

        // float mode agrees
        LinearProgram<double> fp;
        for (const auto& v : c) fp.add_variable(v.get_d());
        for (const auto& con : primal.constraints) {
            std::vector<Term<double>> terms;
            for (const auto& t : con.terms) terms.push_back({t.var, t.coef.get_d()});
            fp.add_constraint(std::move(terms), con.rel, con.rhs.get_d());
        }
        const auto rf = solve_lp(fp);
        REQUIRE(rf.optimal());
        CHECK(std::fabs(rf.objective - rp.objective.get_d()) <= 1e-7);
    }
}

TEST_CASE_TEMPLATE("binary forced up", T, Rational, double) {
    MixedIntegerProgram<T> p;
    p.add_binary(T(1));
    p.lp.add_constraint({{0, T(1)}}, Relation::GreaterEqual, num<T>("3/10"));
    const auto r = solve_milp(p);
    REQUIRE(r.optimal());
    CHECK(close(r.solution[0], T(1)));
    REQUIRE(r.relaxation_objective);
    CHECK(close(*r.relaxation_objective, num<T>("3/10")));
}

TEST_CASE("covering knapsacks match enumeration") {
    checks::Rng rng(5);
    for (int trial = 0; trial < 150; ++trial) {
        const auto n = static_cast<std::size_t>(rng.uniform(1, 7));
        std::vector<long> w(n);
        std::vector<long> c(n);
        long total = 0;
        for (std::size_t i = 0; i < n; ++i) {
            w[i] = rng.uniform(1, 9);
            c[i] = rng.uniform(1, 9);
            total += w[i];
        }
        const long need = rng.uniform(1, total);
        MixedIntegerProgram<Rational> p;
        std::vector<Term<Rational>> terms;
        for (std::size_t i = 0; i < n; ++i) terms.push_back({p.add_binary(Rational(c[i])), Rational(w[i])});
        p.lp.add_constraint(std::move(terms), Relation::GreaterEqual, Rational(need));

        long best = -1;
        for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
            long weight = 0;
            long cost = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (mask >> i & 1) {
                    weight += w[i];
                    cost += c[i];
                }
            }
            if (weight >= need && (best < 0 || cost < best)) best = cost;
        }
        const auto r = solve_milp(p);
        CAPTURE(trial);
        REQUIRE(r.optimal());
        CHECK(r.objective == Rational(best));
        REQUIRE(r.relaxation_objective);
        CHECK(*r.relaxation_objective <= r.objective);
    }
}

TEST_CASE("node limit keeps the incumbent") {
    MixedIntegerProgram<Rational> p;
    std::vector<Term<Rational>> terms;
    for (long i = 0; i < 10; ++i) terms.push_back({p.add_binary(Rational(3 + i % 4)), Rational(2 + i % 3)});
    p.lp.add_constraint(std::move(terms), Relation::GreaterEqual, Rational(11));
    SolverOptions opts;
    opts.max_nodes = 1;
    const auto r = solve_milp(p, opts);
    if (r.status == Status::NodeLimit && !r.solution.empty()) {
        CHECK(max_violation(p.lp, r.solution) == 0);
        CHECK(r.objective >= solve_milp(p).objective);
    } else {
        CHECK((r.status == Status::Optimal || r.status == Status::NodeLimit));
    }
}

TEST_CASE("standard-form dump") {
    LinearProgram<Rational> p;
    p.add_variable(ratio<Rational>(1, 3), Rational(0), Rational(2), "t0");
    p.add_constraint({{0, Rational(-1)}}, Relation::LessEqual, ratio<Rational>(-1, 2), "floor");
    std::ostringstream os;
    write_program(os, p, {});
    CHECK(os.str() == "minimize\n obj: 1/3 t0\nsubject to\n floor: - 1 t0 <= -1/2\nbounds\n 0 <= t0 <= 2\nend\n");
}
