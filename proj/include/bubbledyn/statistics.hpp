#pragma once

#include "bubbledyn/timeseries.hpp"

#include <optional>
#include <span>
#include <vector>

namespace bubbledyn {

/// Below this |lambda| the Box-Cox transform uses its logarithmic limit.
inline constexpr double kBoxCoxLambdaEps = 1e-8;

/// (x^lambda - 1) / lambda, or ln(x) as lambda -> 0. Requires x > 0.
[[nodiscard]] double box_cox(double x, double lambda);

/// Inverse of box_cox. Requires lambda*y + 1 > 0 on the power branch.
[[nodiscard]] double inverse_box_cox(double y, double lambda);

/// Sample Pearson correlation of two equally long sequences.
[[nodiscard]] double pearson_correlation(std::span<const double> xs, std::span<const double> ys);

/// Pearson correlation of two series covering the same calendar span.
[[nodiscard]] double pearson_correlation(const TimeSeries& xs, const TimeSeries& ys);

/// Affine map sending the min/max of the non-excluded points to 0/1. Excluded
/// points go through the same map and can land outside [0, 1].
[[nodiscard]] TimeSeries normalize_unit_interval(const TimeSeries& s, std::optional<Window> exclude = std::nullopt);

struct LagCorrelation {
    int lag = 0;
    double rho = 0.0;
    std::size_t overlap = 0;
};

struct LagScan {
    std::vector<LagCorrelation> points;
    std::vector<int> omitted_lags;

    [[nodiscard]] bool warning() const noexcept { return !omitted_lags.empty(); }
    /// Entry with the largest rho; nullopt when every lag was omitted.
    [[nodiscard]] std::optional<LagCorrelation> peak() const;
};

/// rho of xs(t) against ys(t + lag) for lag in [0, max_lag], after aligning
/// both series on their common calendar span. Lags with fewer than three
/// overlapping points, or a constant segment, are omitted and flagged.
[[nodiscard]] LagScan lagged_cross_correlation(const TimeSeries& xs, const TimeSeries& ys, int max_lag);

/// nominal(t) / cpi(t) * cpi(t_ref) over the common span; t_ref is its first date.
[[nodiscard]] TimeSeries deflate(const TimeSeries& nominal, const TimeSeries& cpi);

}  // namespace bubbledyn
