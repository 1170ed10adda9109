#pragma once

#include "bubbledyn/combined.hpp"
#include "bubbledyn/ethanol.hpp"
#include "bubbledyn/speculator.hpp"
#include "bubbledyn/statistics.hpp"
#include "bubbledyn/supply_demand.hpp"
#include "bubbledyn/timeseries.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace bubbledyn::io {

enum class Transform { none, inverse };
enum class Format { csv, json };

[[nodiscard]] std::optional<Format> format_from_string(std::string_view name) noexcept;

struct SeriesSpec {
    std::filesystem::path path;
    std::string date_column = "date";
    std::string value_column = "value";
    Frequency frequency = Frequency::monthly;
    std::string label;
    Transform transform = Transform::none;
};

/// Reads a headed CSV. Dates are ISO year-month ("YYYY-MM", "YYYY-MM-DD" or,
/// for annual data, "YYYY"); they must advance by exactly one frequency unit
/// per row. `source` names the input in error messages.
[[nodiscard]] TimeSeries parse_series_csv(std::string_view text, const SeriesSpec& spec, std::string_view source);
[[nodiscard]] TimeSeries load_series(const SeriesSpec& spec);

/// production - consumption on the common annual span.
[[nodiscard]] TimeSeries derive_surplus(const TimeSeries& production, const TimeSeries& consumption);

/// Shortest decimal that parses back to the same double.
[[nodiscard]] std::string format_double(double value);

[[nodiscard]] nlohmann::json to_json(const TimeSeries& s);
[[nodiscard]] nlohmann::json to_json(const speculator::RegimeClassification& c);
[[nodiscard]] nlohmann::json to_json(const speculator::PhaseGrid& grid);
[[nodiscard]] nlohmann::json to_json(const supply_demand::EquilibriumPath& path);
[[nodiscard]] nlohmann::json to_json(const supply_demand::SupplyDemandFit& fit);
[[nodiscard]] nlohmann::json to_json(const ethanol::QuadraticTrend& trend);
[[nodiscard]] nlohmann::json to_json(const ethanol::TrendComparison& cmp);
[[nodiscard]] nlohmann::json to_json(const combined::CombinedParams& params);
[[nodiscard]] nlohmann::json to_json(const combined::CombinedFit& fit);
[[nodiscard]] nlohmann::json to_json(const LagScan& scan);

/// CSV with a date column followed by one column per named series; all
/// series must share start, frequency and length.
[[nodiscard]] std::string render_table_csv(std::span<const std::pair<std::string, const TimeSeries*>> columns);

[[nodiscard]] std::string render(const TimeSeries& s, Format format);
[[nodiscard]] std::string render(const speculator::PhaseGrid& grid, Format format);
[[nodiscard]] std::string render(const supply_demand::EquilibriumPath& path, Format format);
[[nodiscard]] std::string render(const LagScan& scan, Format format);
[[nodiscard]] std::string render_json(const nlohmann::json& doc);

/// Writes `content` to `destination`; failures raise IoError naming the path.
void emit(std::string_view content, const std::filesystem::path& destination);

template <typename T>
void emit(const T& value, Format format, const std::filesystem::path& destination) {
    emit(render(value, format), destination);
}

}  // namespace bubbledyn::io
