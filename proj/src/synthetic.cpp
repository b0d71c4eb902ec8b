#include "sdarb/synthetic.hpp"

#include <cmath>
#include <numbers>

namespace sdarb {

namespace {

double get(const io::Json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_number()) throw Error(Errc::Parse, std::string("config: missing number '") + key + "'");
    return it->get<double>();
}

std::vector<double> table_grid(const SyntheticConfig& cfg) {
    std::vector<double> g(cfg.samples);
    const double step = (cfg.table_hi - cfg.table_lo) / static_cast<double>(cfg.samples - 1);
    for (std::size_t k = 0; k < cfg.samples; ++k) g[k] = cfg.table_lo + step * static_cast<double>(k);
    g.back() = cfg.table_hi;
    return g;
}

}  // namespace

SyntheticConfig synthetic_from_json(const io::Json& j) {
    SyntheticConfig c;
    try {
        c.version = j.at("version").get<int>();
        const auto& t = j.at("table");
        c.table_lo = get(t, "lo");
        c.table_hi = get(t, "hi");
        c.samples = t.at("samples").get<std::size_t>();
        const auto& iv = j.at("interval");
        c.lo = iv.at(0).get<double>();
        c.hi = iv.at(1).get<double>();
        c.n_list = j.at("n_list").get<std::vector<std::size_t>>();
        for (const auto& b : j.at("density")) c.density.push_back({get(b, "weight"), get(b, "mean"), get(b, "sd")});
        for (const auto& [name, k] : j.at("kernels").items()) {
            c.kernels[name] = {get(k, "slope"), get(k, "height"), get(k, "center"), get(k, "width")};
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::Parse, std::string("config: ") + e.what());
    }
    if (c.samples < 2 || !(c.table_lo < c.lo && c.lo < c.hi && c.hi < c.table_hi) || c.density.empty()) {
        throw Error(Errc::Parse, "config: need samples >= 2 and table_lo < lo < hi < table_hi");
    }
    return c;
}

DensityTable<double> synthetic_density(const SyntheticConfig& cfg) {
    auto grid = table_grid(cfg);
    std::vector<double> pdf;
    pdf.reserve(grid.size());
    for (double x : grid) {
        double p = 0;
        for (const auto& b : cfg.density) {
            const double z = (x - b.mean) / b.sd;
            p += b.weight * std::exp(-0.5 * z * z) / (b.sd * std::sqrt(2 * std::numbers::pi));
        }
        pdf.push_back(p);
    }
    return DensityTable<double>(std::move(grid), std::move(pdf));
}

KernelTable synthetic_kernel(const SyntheticConfig& cfg, const std::string& name) {
    auto it = cfg.kernels.find(name);
    if (it == cfg.kernels.end()) throw Error(Errc::Parse, "config: no kernel named '" + name + "'");
    const auto& k = it->second;
    const auto density = synthetic_density(cfg);
    auto grid = table_grid(cfg);
    std::vector<double> raw;
    raw.reserve(grid.size());
    for (double x : grid) {
        const double z = (x - k.center) / k.width;
        raw.push_back(std::exp(-k.slope * (x - 1)) * (1 + k.height * std::exp(-0.5 * z * z)));
    }
    // normalize against the interpolated density with the same trapezoid rule
    double num = 0;
    double den = 0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double h = grid[i] - grid[i - 1];
        num += h * (raw[i] * density.pdf()[i] + raw[i - 1] * density.pdf()[i - 1]) / 2;
        den += h * (density.pdf()[i] + density.pdf()[i - 1]) / 2;
    }
    for (auto& v : raw) v *= den / num;
    return KernelTable(std::move(grid), std::move(raw));
}

}  // namespace sdarb
