#include "sdarb/checks.hpp"

#include <algorithm>
#include <numeric>

#include "sdarb/io.hpp"
#include "sdarb/ompd.hpp"
#include "sdarb/rearrangement.hpp"

namespace sdarb::checks {

namespace {

std::vector<Rational> random_weights(Rng& rng, std::size_t n) {
    std::vector<Rational> w(n);
    Rational total(0);
    for (auto& x : w) {
        x = Rational(rng.uniform(1, 6));
        total += x;
    }
    for (auto& x : w) x /= total;
    return w;
}

std::vector<Rational> random_grid(Rng& rng, std::size_t n) {
    std::vector<Rational> atoms(n);
    long x = rng.uniform(0, 3);
    for (auto& a : atoms) {
        a = Rational(x);
        x += rng.uniform(1, 4);
    }
    return atoms;
}

std::size_t draw_size(Rng& rng, const SuiteConfig& cfg) {
    return static_cast<std::size_t>(rng.uniform(static_cast<long>(cfg.min_atoms), static_cast<long>(cfg.max_atoms)));
}

void record(SuiteResult& r, const SuiteConfig& cfg, const MarketModel<Rational>& m, const std::string& why) {
    ++r.failures;
    if (r.counterexamples.size() < cfg.max_counterexamples) {
        r.counterexamples.push_back(why + ": " + io::market_to_json(m).dump());
    }
}

void record(SuiteResult& r, const SuiteConfig& cfg, const std::string& why) {
    ++r.failures;
    if (r.counterexamples.size() < cfg.max_counterexamples) r.counterexamples.push_back(why);
}

std::string describe(const DiscreteMeasure<Rational>& d) {
    io::Json j;
    j["atoms"] = io::Json::array();
    j["masses"] = io::Json::array();
    for (std::size_t i = 0; i < d.size(); ++i) {
        j["atoms"].push_back(format_rational(d.atoms()[i]));
        j["masses"].push_back(format_rational(d.masses()[i]));
    }
    return j.dump();
}

/// A measure dominated by d in the second order: lower some atoms, and
/// spread a pair of atoms apart keeping the mean.
DiscreteMeasure<Rational> degrade(Rng& rng, const DiscreteMeasure<Rational>& d) {
    std::vector<std::pair<Rational, Rational>> pts;
    for (std::size_t i = 0; i < d.size(); ++i) pts.emplace_back(d.atoms()[i], d.masses()[i]);
    for (auto& [x, w] : pts) {
        if (rng.coin(1, 3)) x = std::max(Rational(0), Rational(x - rng.uniform(0, 2)));
    }
    if (rng.coin()) {
        const auto i = static_cast<std::size_t>(rng.uniform(0, static_cast<long>(pts.size()) - 1));
        const Rational w = pts[i].second / 2;
        const Rational x = pts[i].first;
        const Rational h = ratio<Rational>(rng.uniform(1, 3), 2);
        pts[i].second = w;
        pts[i].first = x - std::min(h, x);
        pts.emplace_back(x + std::min(h, x), w);
    }
    std::vector<Rational> xs;
    std::vector<Rational> ws;
    for (auto& p : pts) {
        xs.push_back(p.first);
        ws.push_back(p.second);
    }
    return distribution_of<Rational>(ws, xs);
}

}  // namespace

DiscreteMeasure<Rational> random_measure(Rng& rng, std::size_t n) {
    return DiscreteMeasure<Rational>(random_grid(rng, n), random_weights(rng, n));
}

MarketModel<Rational> random_market(Rng& rng, std::size_t n, bool equal_mass) {
    auto atoms = random_grid(rng, n);
    std::vector<Rational> mu;
    if (equal_mass) {
        mu.assign(n, Rational(1, static_cast<long>(n)));
    } else {
        mu = random_weights(rng, n);
    }
    // kernel values p/q with q in {1,2,3,4}; a small pool forces repeats
    const bool pooled = rng.coin(1, 4);
    std::vector<Rational> pool;
    for (int k = 0; k < 3; ++k) pool.push_back(ratio<Rational>(rng.uniform(1, 8), rng.uniform(1, 4)));
    std::vector<Rational> kernel(n);
    for (auto& k : kernel) {
        if (pooled) {
            k = pool[static_cast<std::size_t>(rng.uniform(0, 2))];
        } else {
            k = ratio<Rational>(rng.uniform(1, 12), rng.uniform(1, 4));
        }
    }
    if (rng.coin(1, 4)) std::sort(kernel.begin(), kernel.end(), std::greater<>());
    std::vector<Rational> nu(n);
    for (std::size_t i = 0; i < n; ++i) nu[i] = kernel[i] * mu[i];
    return new_market(std::move(atoms), std::move(mu), std::move(nu));
}

Rational permutation_minimum(const MarketModel<Rational>& m) {
    std::vector<std::size_t> perm(m.size());
    std::iota(perm.begin(), perm.end(), 0);
    bool first = true;
    Rational best;
    do {
        Rational p(0);
        for (std::size_t i = 0; i < perm.size(); ++i) p += m.nu()[i] * m.grid()[perm[i]];
        if (first || p < best) best = p;
        first = false;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

SuiteResult run_prop1(const SuiteConfig& cfg) {
    SuiteResult r{"prop1", cfg.trials, 0, {}};
    Rng rng(cfg.seed);
    for (std::size_t t = 0; t < cfg.trials; ++t) {
        const auto m = random_market(rng, draw_size(rng, cfg), rng.coin(1, 4));
        const auto rep = check_prop1(m, cfg.arbitrage);
        if (!rep.holds()) {
            record(r, cfg, m,
                   "ssd_arbitrage=" + std::to_string(rep.ssd_arbitrage) + " cv_arbitrage=" +
                       std::to_string(rep.cv_arbitrage) + " kernel_nonmonotone=" + std::to_string(rep.kernel_nonmonotone));
        }
    }
    return r;
}

SuiteResult run_prop2(const SuiteConfig& cfg) {
    SuiteResult r{"prop2", cfg.trials, 0, {}};
    Rng rng(cfg.seed);
    for (std::size_t t = 0; t < cfg.trials; ++t) {
        const std::size_t n = draw_size(rng, cfg);
        const auto m = random_market(rng, n, true);
        const auto rep = check_prop2(m, cfg.arbitrage);
        if (!rep.holds()) {
            record(r, cfg, m,
                   "minima_equal=" + std::to_string(rep.minima_equal) + " attained_by_ompd=" +
                       std::to_string(rep.attained_by_ompd) + " matches_lower_bound=" +
                       std::to_string(rep.matches_lower_bound) + " countermonotone=" +
                       std::to_string(rep.ompd_countermonotone) + " preserves_law=" +
                       std::to_string(rep.ompd_preserves_distribution) + " equivalence=" +
                       std::to_string(rep.equivalence()));
            continue;
        }
        if (n <= 6) {
            const Rational brute = permutation_minimum(m);
            const Rational eq = rep.minima[static_cast<std::size_t>(OrderRelation::Equal)];
            if (brute != eq) {
                record(r, cfg, m, "Equal optimum " + format_rational(eq) + " vs permutations " + format_rational(brute));
            }
        }
    }
    return r;
}

SuiteResult run_bounds(const SuiteConfig& cfg) {
    SuiteResult r{"bounds", cfg.trials, 0, {}};
    Rng rng(cfg.seed);
    for (std::size_t t = 0; t < cfg.trials; ++t) {
        const auto m = random_market(rng, draw_size(rng, cfg), rng.coin());
        const auto eq = min_price(m, OrderRelation::Equal, cfg.arbitrage);
        const auto fsd = min_price(m, OrderRelation::FirstOrder, cfg.arbitrage);
        const auto ssd = min_price(m, OrderRelation::SecondOrder, cfg.arbitrage);
        if (!eq.optimal() || !fsd.optimal() || !ssd.optimal()) {
            record(r, cfg, m, "solver did not reach optimality");
            continue;
        }
        const Rational mp = market_price(m);
        const Rational lb = ssd_lower_bound(m);
        if (!(mp >= eq.price && eq.price >= fsd.price && fsd.price >= ssd.price && ssd.price >= lb)) {
            record(r, cfg, m,
                   "chain " + format_rational(mp) + " >= " + format_rational(eq.price) + " >= " +
                       format_rational(fsd.price) + " >= " + format_rational(ssd.price) + " >= " + format_rational(lb));
            continue;
        }
        const auto x = m.objective_measure();
        const auto ssd_law = pushforward(m, *ssd.theta);
        for (auto method : {SsdMethod::CdfIntegral, SsdMethod::QuantileIntegral, SsdMethod::Shortfall}) {
            if (!dominates_ssd(ssd_law, x, method)) {
                record(r, cfg, m, "second-order minimizer fails the dominance check");
                break;
            }
        }
        if (!dominates_fsd(pushforward(m, *fsd.theta), x) || !same_distribution(pushforward(m, *eq.theta), x)) {
            record(r, cfg, m, "minimizer fails its own order");
        }
    }
    return r;
}

std::vector<SuiteResult> run_lemmas(const SuiteConfig& cfg) {
    Rng rng(cfg.seed);
    std::vector<SuiteResult> out;

    // Q(F(x)) <= x at every atom and at points between atoms.
    {
        SuiteResult r{"quantile-of-cdf", cfg.trials, 0, {}};
        for (std::size_t t = 0; t < cfg.trials; ++t) {
            const auto d = random_measure(rng, draw_size(rng, cfg));
            const auto f = cdf(d);
            const auto q = quantile(d);
            bool ok = true;
            for (std::size_t i = 0; i < d.size(); ++i) {
                const Rational x = d.atoms()[i];
                ok = ok && q(f(x)) <= x;
                if (i + 1 < d.size()) {
                    const Rational mid = (x + d.atoms()[i + 1]) / 2;
                    ok = ok && q(f(mid)) <= mid;
                }
            }
            if (!ok) record(r, cfg, describe(d));
        }
        out.push_back(std::move(r));
    }

    // mu{F(X) <= u} = u for u in the range of F.
    {
        SuiteResult r{"cdf-level-mass", cfg.trials, 0, {}};
        for (std::size_t t = 0; t < cfg.trials; ++t) {
            const auto d = random_measure(rng, draw_size(rng, cfg));
            const auto f = cdf(d);
            bool ok = true;
            for (std::size_t k = 0; k < d.size(); ++k) {
                const Rational u = f(d.atoms()[k]);
                Rational mass(0);
                for (std::size_t i = 0; i < d.size(); ++i) {
                    if (f(d.atoms()[i]) <= u) mass += d.masses()[i];
                }
                ok = ok && mass == u;
            }
            if (!ok) record(r, cfg, describe(d));
        }
        out.push_back(std::move(r));
    }

    // the three second-order tests agree, on random and on dominated pairs.
    {
        SuiteResult r{"ssd-methods", cfg.trials, 0, {}};
        for (std::size_t t = 0; t < cfg.trials; ++t) {
            const auto d1 = random_measure(rng, draw_size(rng, cfg));
            const auto d2 = rng.coin() ? degrade(rng, d1) : random_measure(rng, draw_size(rng, cfg));
            const bool a = dominates_ssd(d1, d2, SsdMethod::CdfIntegral);
            const bool b = dominates_ssd(d1, d2, SsdMethod::QuantileIntegral);
            const bool c = dominates_ssd(d1, d2, SsdMethod::Shortfall);
            if (a != b || b != c) record(r, cfg, describe(d1) + " vs " + describe(d2));
        }
        out.push_back(std::move(r));
    }

    // int_0^v Q1 >= int_0^v Q2 for all v implies the same with any
    // nonincreasing nonnegative weight g.
    {
        SuiteResult r{"weighted-majorization", cfg.trials, 0, {}};
        std::size_t done = 0;
        while (done < cfg.trials) {
            const auto d1 = random_measure(rng, draw_size(rng, cfg));
            const auto d2 = degrade(rng, d1);
            const auto q1 = quantile(d1);
            const auto q2 = quantile(d2);
            const StepFunction<Rational> one({}, {Rational(1)}, Continuity::Left);
            if (!hardy_majorization_holds(q1, q2, one)) continue;
            ++done;
            const std::size_t pieces = static_cast<std::size_t>(rng.uniform(1, 5));
            std::vector<Rational> cuts;
            for (std::size_t k = 0; k + 1 < pieces; ++k) cuts.push_back(ratio<Rational>(rng.uniform(1, 19), 20));
            std::sort(cuts.begin(), cuts.end());
            cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
            std::vector<Rational> vals;
            for (std::size_t k = 0; k <= cuts.size(); ++k) vals.emplace_back(rng.uniform(0, 9));
            std::sort(vals.begin(), vals.end(), std::greater<>());
            const StepFunction<Rational> g(cuts, vals, Continuity::Left);
            if (!hardy_majorization_holds(q1, q2, g)) record(r, cfg, describe(d1) + " vs " + describe(d2));
        }
        out.push_back(std::move(r));
    }

    // lower <= actual <= upper, with equality for counter/comonotone pairs.
    {
        SuiteResult r{"rearrangement-bounds", cfg.trials, 0, {}};
        for (std::size_t t = 0; t < cfg.trials; ++t) {
            const std::size_t n = draw_size(rng, cfg);
            const auto m = random_market(rng, n, rng.coin());
            std::vector<Rational> fv(n);
            std::vector<Rational> gv(n);
            for (auto& v : fv) v = Rational(rng.uniform(0, 6));
            for (auto& v : gv) v = Rational(rng.uniform(0, 6));
            const long shape = rng.uniform(0, 2);
            if (shape == 1) {
                std::sort(fv.begin(), fv.end());
                std::sort(gv.begin(), gv.end());
            } else if (shape == 2) {
                std::sort(fv.begin(), fv.end());
                std::sort(gv.begin(), gv.end(), std::greater<>());
            }
            const PayoffProfile<Rational> f(fv);
            const PayoffProfile<Rational> g(gv);
            const auto b = hardy_littlewood_bounds(m, f, g);
            bool ok = b.lower <= b.actual && b.actual <= b.upper;
            if (is_countermonotone(m, f, g)) ok = ok && b.actual == b.lower;
            if (is_comonotone(m, f, g)) ok = ok && b.actual == b.upper;
            if (shape == 1) ok = ok && is_comonotone(m, f, g);
            if (shape == 2) ok = ok && is_countermonotone(m, f, g);
            if (!ok) record(r, cfg, m, "f=" + io::profile_to_json(f).dump() + " g=" + io::profile_to_json(g).dump());
        }
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<SuiteResult> run_suite(std::string_view name, const SuiteConfig& cfg) {
    if (name == "prop1") return {run_prop1(cfg)};
    if (name == "prop2") return {run_prop2(cfg)};
    if (name == "bounds") return {run_bounds(cfg)};
    if (name == "lemmas") return run_lemmas(cfg);
    throw Error(Errc::UnknownMethod, "unknown suite '" + std::string(name) + "'");
}

}  // namespace sdarb::checks
