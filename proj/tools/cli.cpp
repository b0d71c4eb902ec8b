#include "cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "sdarb/arbitrage.hpp"
#include "sdarb/checks.hpp"
#include "sdarb/discretize.hpp"
#include "sdarb/io.hpp"
#include "sdarb/ompd.hpp"
#include "sdarb/synthetic.hpp"

namespace sdarb::cli {

namespace fs = std::filesystem;

namespace {

struct SolverFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string market;
    std::string out;
    std::string order = "ssd";
    std::string dump_lp;
    std::string json_out;
    std::string density_csv;
    std::string kernel_csv;
    std::vector<std::size_t> n_list{5, 20, 80};
    double lo = 0.85;
    double hi = 1.15;
    std::size_t max_nodes = lp::SolverOptions{}.max_nodes;
    std::string suite = "prop1";
    std::size_t trials = 1000;
    std::uint64_t seed = checks::default_seed;
    std::string config = "data/synthetic.json";
};

io::Json load_market_json(const std::string& path) { return io::parse_json(io::read_file(path)); }

template <class F>
auto with_market(const std::string& path, F&& f) {
    const auto j = load_market_json(path);
    if (io::resolve_mode(j) == Mode::Rational) {
        return f(io::market_from_json<Rational>(j));
    }
    return f(io::market_from_json<double>(j));
}

template <Scalar T>
int inspect(const MarketModel<T>& m, const Options& o, std::ostream& out) {
    out << "mode\t" << (is_exact_v<T> ? "rational" : "float") << '\n';
    out << "atoms\t";
    for (std::size_t i = 0; i < m.size(); ++i) out << (i ? " " : "") << format_number(m.grid()[i]);
    out << "\nkernel\t";
    for (std::size_t i = 0; i < m.size(); ++i) out << (i ? " " : "") << format_number(m.kernel()[i]);
    out << "\nmonotone\t" << (is_kernel_monotone(m) ? "true" : "false") << '\n';
    out << "adequate\t" << (is_adequate(m) ? "true" : "false") << '\n';
    out << "market_price\t" << format_number(market_price(m)) << '\n';
    out << "lower_bound\t" << format_number(ssd_lower_bound(m)) << '\n';
    if (!o.json_out.empty()) io::write_file(o.json_out, io::market_report(m).dump(2) + "\n");
    return Ok;
}

template <Scalar T>
int minimize(const MarketModel<T>& m, const Options& o, std::ostream& out) {
    const auto rel = parse_order(o.order);
    if (!o.dump_lp.empty()) {
        const auto prog = build_program(m, rel);
        std::ofstream lp(o.dump_lp);
        if (!lp) throw Error(Errc::Parse, "cannot write " + o.dump_lp);
        lp::write_program(lp, prog.lp, prog.binaries);
    }
    const auto r = min_price(m, rel);
    const auto report = io::min_price_report(m, r).dump(2) + "\n";
    if (o.out.empty()) {
        out << report;
    } else {
        io::write_file(o.out, report);
    }
    if (!r.optimal()) throw SolverFailed(std::string("solver stopped with status ") + std::string(lp::to_string(r.opt.status)));
    if (!o.out.empty()) out << to_string(rel) << '\t' << format_number(r.price) << '\n';
    return Ok;
}

template <Scalar T>
int write_ompd(const MarketModel<T>& m, const Options& o, std::ostream& out) {
    const auto v = ompd(m);
    std::ostringstream tsv;
    tsv << "# ompd price " << format_number(price(m, v)) << '\n';
    tsv << "# atom\tompd\n";
    for (std::size_t i = 0; i < m.size(); ++i) tsv << format_number(m.grid()[i]) << '\t' << format_number(v[i]) << '\n';
    if (o.out.empty()) {
        out << tsv.str();
    } else {
        io::write_file(o.out, tsv.str());
    }
    return Ok;
}

int illustrate(const Options& o, std::ostream& out) {
    auto [dx, dp] = io::read_two_columns(o.density_csv);
    auto [kx, kv] = io::read_two_columns(o.kernel_csv);
    const DensityTable<double> density(std::move(dx), std::move(dp));
    const KernelTable kernel(std::move(kx), std::move(kv));
    const std::function<double(double)> kernel_at = [&](double x) { return kernel(x); };
    ConvergenceConfig cfg;
    cfg.lo = o.lo;
    cfg.hi = o.hi;
    cfg.n_list = o.n_list;
    cfg.arbitrage.solver.max_nodes = o.max_nodes;
    const auto rows = convergence_study(density, kernel_at, cfg);
    fs::create_directories(o.out);
    io::write_file(fs::path(o.out) / "gaps.tsv", io::convergence_tsv(rows));
    for (std::size_t k = 0; k < rows.size(); k += cfg.relations.size()) {
        std::ostringstream tsv;
        tsv << "atom";
        for (std::size_t r = 0; r < cfg.relations.size(); ++r) tsv << '\t' << to_string(rows[k + r].relation);
        tsv << "\tompd\n";
        for (std::size_t i = 0; i < rows[k].atoms.size(); ++i) {
            tsv << format_double(rows[k].atoms[i]);
            for (std::size_t r = 0; r < cfg.relations.size(); ++r) {
                const auto& th = rows[k + r].theta;
                tsv << '\t' << (th.empty() ? std::string("nan") : format_double(th[i]));
            }
            tsv << '\t' << format_double(rows[k].ompd[i]) << '\n';
        }
        io::write_file(fs::path(o.out) / ("minimizers_n" + std::to_string(rows[k].n) + ".tsv"), tsv.str());
    }
    const ContinuousOmpd v(density, kernel_at);
    std::ostringstream curve;
    curve << "x\tompd\n";
    for (double x : density.grid()) {
        if (x < o.lo || x > o.hi) continue;
        curve << format_double(x) << '\t' << format_double(v(x)) << '\n';
    }
    io::write_file(fs::path(o.out) / "ompd_curve.tsv", curve.str());
    out << io::convergence_tsv(rows);
    for (const auto& r : rows) {
        if (r.status != lp::Status::Optimal) {
            throw SolverFailed("convergence study: n=" + std::to_string(r.n) + " " + std::string(to_string(r.relation)) +
                               " stopped with status " + std::string(lp::to_string(r.status)));
        }
    }
    return Ok;
}

int synth(const Options& o, std::ostream& out) {
    const auto cfg = synthetic_from_json(io::parse_json(io::read_file(o.config)));
    fs::create_directories(o.out);
    const auto density = synthetic_density(cfg);
    std::ostringstream d;
    d << "x,pdf\n";
    for (std::size_t i = 0; i < density.grid().size(); ++i) {
        d << format_double(density.grid()[i]) << ',' << format_double(density.pdf()[i]) << '\n';
    }
    io::write_file(fs::path(o.out) / "density.csv", d.str());
    for (const auto& [name, spec] : cfg.kernels) {
        (void)spec;
        const auto k = synthetic_kernel(cfg, name);
        std::ostringstream s;
        s << "x,kernel\n";
        for (std::size_t i = 0; i < k.grid().size(); ++i) {
            s << format_double(k.grid()[i]) << ',' << format_double(k.values()[i]) << '\n';
        }
        io::write_file(fs::path(o.out) / ("kernel_" + name + ".csv"), s.str());
        out << "wrote kernel_" << name << ".csv\n";
    }
    out << "wrote density.csv\n";
    return Ok;
}

int report_suites(const std::vector<checks::SuiteResult>& results, std::ostream& out) {
    bool ok = true;
    for (const auto& r : results) {
        out << r.name << ": " << (r.trials - r.failures) << "/" << r.trials << " passed\n";
        for (const auto& c : r.counterexamples) out << "  counterexample " << c << '\n';
        ok = ok && r.ok();
    }
    return ok ? Ok : PropertyViolation;
}

int check(const Options& o, std::ostream& out) {
    if (!o.market.empty()) {
        // a single given model instead of random draws
        return with_market(o.market, [&](const auto& m) {
            checks::SuiteResult r{o.suite, 1, 0, {}};
            bool holds = false;
            if (o.suite == "prop1") {
                holds = check_prop1(m).holds();
            } else if (o.suite == "prop2") {
                holds = check_prop2(m).holds();
            } else {
                throw Error(Errc::UnknownMethod, "--market works with prop1 or prop2");
            }
            if (!holds) {
                r.failures = 1;
                r.counterexamples.push_back(io::market_to_json(m).dump());
            }
            return report_suites({r}, out);
        });
    }
    checks::SuiteConfig cfg;
    cfg.trials = o.trials;
    cfg.seed = o.seed;
    return report_suites(checks::run_suite(o.suite, cfg), out);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Stochastic arbitrage on a discrete payoff grid"};
    app.require_subcommand(1);
    Options o;

    auto* inspect_cmd = app.add_subcommand("inspect", "Kernel, monotonicity, adequacy, market price, lower bound");
    inspect_cmd->add_option("market", o.market, "Market JSON file")->required();
    inspect_cmd->add_option("--json", o.json_out, "Also write the full report (all relations, bound chain)");

    auto* minimize_cmd = app.add_subcommand("minimize", "Minimum price under a stochastic-order constraint");
    minimize_cmd->add_option("market", o.market, "Market JSON file")->required();
    minimize_cmd->add_option("--order", o.order, "eq | fsd | cv | ssd")
        ->check(CLI::IsMember({"eq", "fsd", "cv", "ssd"}));
    minimize_cmd->add_option("--out", o.out, "Report JSON (stdout if omitted)");
    minimize_cmd->add_option("--dump-lp", o.dump_lp, "Write the program in LP format");

    auto* ompd_cmd = app.add_subcommand("ompd", "Optimal measure preserving derivative as TSV");
    ompd_cmd->add_option("market", o.market, "Market JSON file")->required();
    ompd_cmd->add_option("--out", o.out, "TSV file (stdout if omitted)");

    auto* illustrate_cmd = app.add_subcommand("illustrate", "Discretization convergence study");
    illustrate_cmd->add_option("density", o.density_csv, "Density CSV (x, pdf)")->required();
    illustrate_cmd->add_option("kernel", o.kernel_csv, "Kernel CSV (x, pi)")->required();
    illustrate_cmd->add_option("--n-list", o.n_list, "Increasing cell counts")->delimiter(',');
    illustrate_cmd->add_option("--lo", o.lo, "Left end of the discretized interval");
    illustrate_cmd->add_option("--hi", o.hi, "Right end of the discretized interval");
    illustrate_cmd->add_option("--out", o.out, "Output directory")->required();
    illustrate_cmd->add_option("--max-nodes", o.max_nodes, "Branch-and-bound node budget per program");

    auto* check_cmd = app.add_subcommand("check", "Randomized property suites");
    check_cmd->add_option("--suite", o.suite, "prop1 | prop2 | lemmas | bounds")
        ->check(CLI::IsMember({"prop1", "prop2", "lemmas", "bounds"}));
    check_cmd->add_option("--trials", o.trials, "Random models per suite");
    check_cmd->add_option("--seed", o.seed, "Generator seed");
    check_cmd->add_option("--market", o.market, "Check one market file instead of random models");

    auto* synth_cmd = app.add_subcommand("synth", "Write the synthetic density and kernel tables");
    synth_cmd->add_option("--config", o.config, "Synthetic config JSON");
    synth_cmd->add_option("--out", o.out, "Output directory")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? Ok : InputError;
    }

    try {
        if (inspect_cmd->parsed()) return with_market(o.market, [&](const auto& m) { return inspect(m, o, out); });
        if (minimize_cmd->parsed()) return with_market(o.market, [&](const auto& m) { return minimize(m, o, out); });
        if (ompd_cmd->parsed()) return with_market(o.market, [&](const auto& m) { return write_ompd(m, o, out); });
        if (illustrate_cmd->parsed()) return illustrate(o, out);
        if (check_cmd->parsed()) return check(o, out);
        if (synth_cmd->parsed()) return synth(o, out);
    } catch (const SolverFailed& e) {
        err << "error: " << e.what() << '\n';
        return SolverError;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.code() == Errc::SolverFailure ? SolverError : InputError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return InputError;
    }
    return InputError;
}

}  // namespace sdarb::cli
