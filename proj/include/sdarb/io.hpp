#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>
#include "sdarb/arbitrage.hpp"
#include "sdarb/discretize.hpp"
#include "sdarb/measures.hpp"

namespace sdarb::io {

using Json = nlohmann::ordered_json;

/// SD_ARB_MODE=rational|float, or nullopt when unset. Throws Parse on any
/// other value.
std::optional<Mode> mode_from_env();

/// Parses JSON text; syntax errors become Error(Parse) carrying line and
/// column.
Json parse_json(std::string_view text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

/// Rational when every number in atoms/mu/nu is a string, float otherwise.
Mode infer_mode(const Json& market);

/// Mode for a market document: SD_ARB_MODE if set, else infer_mode.
Mode resolve_mode(const Json& market);

template <Scalar T>
T number_from_json(const Json& j);

/// "p/q" strings in rational mode, JSON numbers in float mode.
template <Scalar T>
Json number_to_json(const T& v);

template <Scalar T>
MarketModel<T> market_from_json(const Json& j);

template <Scalar T>
Json market_to_json(const MarketModel<T>& m);

template <Scalar T>
Json profile_to_json(const PayoffProfile<T>& p);

/// One optimization: status, price, theta, and the market's headline figures.
template <Scalar T>
Json min_price_report(const MarketModel<T>& m, const MinPriceResult<T>& r);

/// Every relation's optimum, the bound chain, and the market flags.
template <Scalar T>
Json market_report(const MarketModel<T>& m, const ArbitrageOptions& opts = {});

/// Two numeric columns; blank lines, '#' comments and a non-numeric header
/// row are skipped.
std::pair<std::vector<double>, std::vector<double>> read_two_columns(const std::filesystem::path& path);

/// Tab-separated rows, doubles at 17 significant digits.
std::string convergence_tsv(const std::vector<ConvergenceRow>& rows);

#define SDARB_EXTERN_IO(T)                                                                 \
    extern template T number_from_json<T>(const Json&);                                    \
    extern template Json number_to_json<T>(const T&);                                      \
    extern template MarketModel<T> market_from_json<T>(const Json&);                       \
    extern template Json market_to_json<T>(const MarketModel<T>&);                         \
    extern template Json profile_to_json<T>(const PayoffProfile<T>&);                      \
    extern template Json min_price_report<T>(const MarketModel<T>&, const MinPriceResult<T>&); \
    extern template Json market_report<T>(const MarketModel<T>&, const ArbitrageOptions&);

SDARB_EXTERN_IO(Rational)
SDARB_EXTERN_IO(double)
#undef SDARB_EXTERN_IO

}  // namespace sdarb::io
