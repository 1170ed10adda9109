#pragma once

#include "bubbledyn/timeseries.hpp"

#include <optional>
#include <span>

namespace bubbledyn::ethanol {

/// y(t) = a + b t^2, t in index units from the first point of the fitted series.
struct QuadraticTrend {
    double a = 0.0;
    double b = 0.0;
    double r_squared = 0.0;

    [[nodiscard]] double at(double t) const noexcept { return a + b * t * t; }
};

/// Least squares on the columns (1, t^2) over the non-excluded points.
[[nodiscard]] QuadraticTrend quadratic_fit(const TimeSeries& s, std::optional<Window> exclude = std::nullopt);
/// Same, leaving out every point covered by any of the windows.
[[nodiscard]] QuadraticTrend quadratic_fit(const TimeSeries& s, std::span<const Window> excludes);

/// Constant terms of Q_x(t) = (beta_d + beta_s) P(t) + Q_t - alpha_d.
struct EthanolLinkParams {
    double beta_sum = 1.0;
    double alpha_d = 0.0;
    double q_total = 0.0;

    void validate() const;
};

/// P(t) = (Q_x(t) - Q_t + alpha_d) / (beta_d + beta_s), element-wise.
[[nodiscard]] TimeSeries implied_food_price(const TimeSeries& q_x, const EthanolLinkParams& link);

struct TrendComparison {
    QuadraticTrend trend_a;
    QuadraticTrend trend_b;
    /// trend_a.b - trend_b.b
    double coefficient_difference = 0.0;
    /// Pearson rho of the normalized series over the common non-excluded points.
    double rho = 0.0;
    std::size_t common_points = 0;
    TimeSeries normalized_a;
    TimeSeries normalized_b;
    std::optional<Window> exclude_b;
};

/// Aligns both series on their common span, normalizes each to [0, 1]
/// (exclude_b, given in series_b's own indices, is left out of series_b's
/// normalization and fit), and fits a quadratic trend to each.
[[nodiscard]] TrendComparison trend_comparison(const TimeSeries& series_a, const TimeSeries& series_b,
                                               std::optional<Window> exclude_b = std::nullopt);

}  // namespace bubbledyn::ethanol
