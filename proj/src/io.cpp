#include "sdarb/io.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "sdarb/ompd.hpp"

namespace sdarb::io {

std::optional<Mode> mode_from_env() {
    const char* v = std::getenv("SD_ARB_MODE");
    if (v == nullptr || *v == '\0') return std::nullopt;
    const std::string_view s(v);
    if (s == "rational") return Mode::Rational;
    if (s == "float") return Mode::Float;
    throw Error(Errc::Parse, "SD_ARB_MODE must be rational or float, got '" + std::string(s) + "'");
}

Json parse_json(std::string_view text) {
    try {
        return Json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        // nlohmann reports a byte offset; turn it into line:column.
        std::size_t line = 1;
        std::size_t col = 1;
        const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        for (std::size_t i = 0; i < end; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw Error(Errc::Parse, "JSON syntax error at line " + std::to_string(line) + ", column " +
                                     std::to_string(col) + ": " + e.what());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::Parse, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::Parse, "cannot write " + path.string());
    out << contents;
}

namespace {

const Json& field(const Json& j, const char* key) {
    if (!j.is_object()) throw Error(Errc::Parse, "market file must be a JSON object");
    auto it = j.find(key);
    if (it == j.end()) throw Error(Errc::Parse, std::string("missing key '") + key + "'");
    if (!it->is_array()) throw Error(Errc::Parse, std::string("'") + key + "' must be an array");
    return *it;
}

template <Scalar T>
std::vector<T> numbers(const Json& arr, const char* key) {
    std::vector<T> out;
    out.reserve(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) {
        try {
            out.push_back(number_from_json<T>(arr[i]));
        } catch (const Error& e) {
            throw Error(Errc::Parse, std::string(key) + "[" + std::to_string(i) + "]: " + e.what());
        }
    }
    return out;
}

}  // namespace

Mode infer_mode(const Json& market) {
    for (const char* key : {"atoms", "mu", "nu"}) {
        for (const auto& v : field(market, key)) {
            if (!v.is_string()) return Mode::Float;
        }
    }
    return Mode::Rational;
}

Mode resolve_mode(const Json& market) {
    if (auto m = mode_from_env()) return *m;
    return infer_mode(market);
}

template <Scalar T>
T number_from_json(const Json& j) {
    if (j.is_string()) return parse_number<T>(j.get<std::string>());
    if (j.is_number()) {
        if constexpr (is_exact_v<T>) {
            // the shortest round-trip text of the double, so 0.1 means 1/10
            return parse_rational(j.dump());
        } else {
            return j.get<double>();
        }
    }
    throw Error(Errc::Parse, "expected a number or numeric string, got " + j.dump());
}

template <Scalar T>
Json number_to_json(const T& v) {
    if constexpr (is_exact_v<T>) {
        return format_rational(v);
    } else {
        return v;
    }
}

template <Scalar T>
MarketModel<T> market_from_json(const Json& j) {
    return new_market(numbers<T>(field(j, "atoms"), "atoms"), numbers<T>(field(j, "mu"), "mu"),
                      numbers<T>(field(j, "nu"), "nu"));
}

namespace {

template <Scalar T>
Json array(std::span<const T> xs) {
    Json a = Json::array();
    for (const auto& x : xs) a.push_back(number_to_json(x));
    return a;
}

}  // namespace

template <Scalar T>
Json market_to_json(const MarketModel<T>& m) {
    Json j;
    j["atoms"] = array(m.grid());
    j["mu"] = array(m.mu());
    j["nu"] = array(m.nu());
    return j;
}

template <Scalar T>
Json profile_to_json(const PayoffProfile<T>& p) {
    return array(p.values());
}

template <Scalar T>
Json min_price_report(const MarketModel<T>& m, const MinPriceResult<T>& r) {
    Json j;
    j["mode"] = is_exact_v<T> ? "rational" : "float";
    j["order"] = std::string(to_string(r.relation));
    j["status"] = std::string(lp::to_string(r.opt.status));
    if (r.theta) {  // on NodeLimit this is the best feasible point found
        j["price"] = number_to_json(r.price);
        j["theta"] = profile_to_json(*r.theta);
        const T mp = market_price(m);
        j["has_arbitrage"] = definitely_less(r.price, mp, 1e-8);
    } else {
        j["price"] = nullptr;
        j["theta"] = nullptr;
    }
    j["market_price"] = number_to_json(market_price(m));
    j["kernel_monotone"] = is_kernel_monotone(m);
    j["adequate"] = is_adequate(m);
    j["ssd_lower_bound"] = number_to_json(ssd_lower_bound(m));
    j["iterations"] = r.opt.iterations;
    j["nodes"] = r.opt.nodes;
    if (r.cuts > 0) j["cuts"] = r.cuts;
    return j;
}

template <Scalar T>
Json market_report(const MarketModel<T>& m, const ArbitrageOptions& opts) {
    Json j;
    j["mode"] = is_exact_v<T> ? "rational" : "float";
    j["atoms"] = array(m.grid());
    j["kernel"] = array(m.kernel());
    j["kernel_monotone"] = is_kernel_monotone(m);
    j["adequate"] = is_adequate(m);
    const T mp = market_price(m);
    j["market_price"] = number_to_json(mp);
    j["ompd"] = profile_to_json(ompd(m));
    j["ompd_price"] = number_to_json(ompd_price(m));
    Json rel = Json::object();
    Json chain = Json::array();
    chain.push_back(number_to_json(mp));
    for (auto r : {OrderRelation::Equal, OrderRelation::FirstOrder, OrderRelation::Concave, OrderRelation::SecondOrder}) {
        const auto res = min_price(m, r, opts);
        Json e;
        e["status"] = std::string(lp::to_string(res.opt.status));
        if (res.optimal()) {
            e["price"] = number_to_json(res.price);
            e["theta"] = profile_to_json(*res.theta);
            e["has_arbitrage"] = definitely_less(res.price, mp, 1e-8);
            if (r != OrderRelation::Concave) chain.push_back(number_to_json(res.price));
        } else {
            e["price"] = nullptr;
            if (r != OrderRelation::Concave) chain.push_back(nullptr);
        }
        rel[std::string(to_string(r))] = std::move(e);
    }
    const T bound = ssd_lower_bound(m);
    chain.push_back(number_to_json(bound));
    j["ssd_lower_bound"] = number_to_json(bound);
    j["relations"] = std::move(rel);
    j["bound_chain"] = std::move(chain);  // market, eq, fsd, ssd, lower bound
    return j;
}

std::pair<std::vector<double>, std::vector<double>> read_two_columns(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::Parse, "cannot open " + path.string());
    std::vector<double> xs;
    std::vector<double> ys;
    std::string line;
    std::size_t lineno = 0;
    bool header_skipped = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        for (char& c : line) {
            if (c == ',' || c == ';' || c == '\t') c = ' ';
        }
        std::istringstream row(line);
        std::string a;
        std::string b;
        std::string extra;
        row >> a >> b;
        try {
            std::size_t pa = 0;
            std::size_t pb = 0;
            const double x = std::stod(a, &pa);
            const double y = std::stod(b, &pb);
            if (pa != a.size() || pb != b.size() || (row >> extra)) throw std::invalid_argument("shape");
            xs.push_back(x);
            ys.push_back(y);
        } catch (const std::exception&) {
            if (xs.empty() && !header_skipped) {
                header_skipped = true;
                continue;
            }
            throw Error(Errc::Parse, path.string() + ":" + std::to_string(lineno) + ": expected two numbers");
        }
    }
    if (xs.empty()) throw Error(Errc::Parse, path.string() + ": no data rows");
    return {std::move(xs), std::move(ys)};
}

std::string convergence_tsv(const std::vector<ConvergenceRow>& rows) {
    std::ostringstream out;
    out << "n\trelation\tstatus\tmin_price\tmarket_price\tsup_gap\n";
    for (const auto& r : rows) {
        out << r.n << '\t' << to_string(r.relation) << '\t' << lp::to_string(r.status) << '\t'
            << format_double(r.min_price) << '\t' << format_double(r.market_price) << '\t'
            << format_double(r.sup_gap) << '\n';
    }
    return out.str();
}

#define SDARB_INSTANTIATE_IO(T)                                                        \
    template T number_from_json<T>(const Json&);                                       \
    template Json number_to_json<T>(const T&);                                         \
    template MarketModel<T> market_from_json<T>(const Json&);                          \
    template Json market_to_json<T>(const MarketModel<T>&);                            \
    template Json profile_to_json<T>(const PayoffProfile<T>&);                         \
    template Json min_price_report<T>(const MarketModel<T>&, const MinPriceResult<T>&); \
    template Json market_report<T>(const MarketModel<T>&, const ArbitrageOptions&);

SDARB_INSTANTIATE_IO(Rational)
SDARB_INSTANTIATE_IO(double)

}  // namespace sdarb::io
