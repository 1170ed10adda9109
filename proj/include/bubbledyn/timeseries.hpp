#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bubbledyn {

enum class Frequency { monthly, annual };

[[nodiscard]] const char* to_string(Frequency f) noexcept;

/// Calendar month. Annual series carry month 1.
struct YearMonth {
    int year = 2000;
    int month = 1;

    friend constexpr auto operator<=>(const YearMonth&, const YearMonth&) = default;

    /// Parses "YYYY", "YYYY-MM" or "YYYY-MM-DD" (the day is ignored).
    [[nodiscard]] static std::optional<YearMonth> parse(std::string_view text);
    [[nodiscard]] std::string iso() const;
};

/// Half-open index range [begin_index, end_index).
struct Window {
    std::size_t begin_index = 0;
    std::size_t end_index = 0;

    [[nodiscard]] bool contains(std::size_t i) const noexcept {
        return i >= begin_index && i < end_index;
    }
    [[nodiscard]] std::size_t length() const noexcept { return end_index - begin_index; }
};

/// Gap-free, finite-valued series on a regular monthly or annual calendar.
/// Index 0 corresponds to start(); each index step is one frequency unit.
class TimeSeries {
public:
    TimeSeries(YearMonth start, Frequency frequency, std::vector<double> values, std::string unit = {});

    [[nodiscard]] YearMonth start() const noexcept { return start_; }
    [[nodiscard]] Frequency frequency() const noexcept { return frequency_; }
    [[nodiscard]] const std::string& unit() const noexcept { return unit_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] double operator[](std::size_t i) const noexcept { return values_[i]; }

    [[nodiscard]] YearMonth date_at(std::size_t i) const;
    [[nodiscard]] YearMonth end_date() const { return date_at(size() - 1); }
    /// Index of the given calendar date, if the series covers it.
    [[nodiscard]] std::optional<std::size_t> index_of(YearMonth date) const;

    /// Sub-series [begin, end).
    [[nodiscard]] TimeSeries slice(std::size_t begin, std::size_t end) const;
    /// Sub-series covering the inclusive calendar range [first, last] clipped to the series.
    [[nodiscard]] TimeSeries between(YearMonth first, YearMonth last) const;
    /// Same calendar and unit with new values.
    [[nodiscard]] TimeSeries with_values(std::vector<double> values) const;

    /// Window over this series for the inclusive calendar range [first, last], clipped.
    [[nodiscard]] std::optional<Window> window_between(YearMonth first, YearMonth last) const;

    friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

private:
    YearMonth start_;
    Frequency frequency_;
    std::vector<double> values_;
    std::string unit_;
};

/// Ordinal of a date in frequency units (months since year 0, or years).
[[nodiscard]] long ordinal(YearMonth date, Frequency frequency) noexcept;
[[nodiscard]] YearMonth from_ordinal(long ordinal, Frequency frequency) noexcept;

/// Throws InvalidArgument if the window does not fit a series of `size` points.
void validate_window(const Window& window, std::size_t size);

struct AlignedPair {
    TimeSeries first;
    TimeSeries second;
};

/// Trims both series to their common calendar span. Mismatched frequency or
/// an empty overlap is an AlignmentError; series are never resampled.
[[nodiscard]] AlignedPair align(const TimeSeries& a, const TimeSeries& b);

}  // namespace bubbledyn
