#pragma once

#include "bubbledyn/ethanol.hpp"
#include "bubbledyn/fitting.hpp"
#include "bubbledyn/speculator.hpp"
#include "bubbledyn/timeseries.hpp"

#include <span>
#include <vector>

namespace bubbledyn::combined {

/// k_c(t) = (a + b t^2) k_sd + b (2t + 1). The second term keeps the price
/// path on the moving equilibrium a + b t^2 instead of one step behind it.
[[nodiscard]] double kc_of_t(double trend_a, double trend_b, double k_sd, int t) noexcept;

/// P(t+1) = k_c(t) + (1 - k_sd) P(t) + k_sp [P(t) - P(t-1)] + sum_i k_i [M_i(t) - M_i(t-1)],
/// with the speculator and market terms active only from switch_index on.
struct CombinedParams {
    double k_sd = 0.1;
    double k_sp = 0.0;
    /// One coupling per alternative market; expected <= 0.
    std::vector<double> couplings;
    double trend_a = 0.0;
    double trend_b = 0.0;
    int switch_index = 1;

    void validate(std::size_t market_count) const;
};

/// Output has steps + 1 values, p0 and p1 first. Every market needs at least
/// steps + 1 points sharing the output's index.
[[nodiscard]] TimeSeries simulate_combined(const CombinedParams& params, std::span<const TimeSeries> markets, double p0,
                                           double p1, int steps, YearMonth start = {2000, 1});

struct CombinedFitOptions {
    /// Start points drawn from the seed box per switch candidate.
    std::size_t grid_starts = 12;
    /// Offset into the deterministic start sequence.
    std::size_t seed = 0;
    /// Also start from the one-step-ahead least-squares estimate.
    bool regression_start = true;
    fitting::Tolerances tolerances{};
};

struct SwitchCandidateResult {
    int switch_index = 0;
    double sse = 0.0;
    bool usable = false;
};

struct CombinedFit {
    CombinedParams params;
    YearMonth switch_date;
    double sse = 0.0;
    double r_squared = 0.0;
    TimeSeries path;
    speculator::RegimeClassification regime;
    fitting::FitReport optimizer;
    std::vector<SwitchCandidateResult> candidates;
};

/// Minimizes the SSE of simulate_combined against `food` over (k_sd, k_sp, k_1..k_N)
/// for each switch candidate and keeps the best. The path starts from the
/// first two food observations; markets are trimmed to food's calendar.
[[nodiscard]] CombinedFit fit_combined(const TimeSeries& food, std::span<const TimeSeries> markets,
                                       const ethanol::QuadraticTrend& trend, std::span<const int> switch_candidates,
                                       const CombinedFitOptions& options = {});

/// Indices of the twelve months of `year` within `food`.
[[nodiscard]] std::vector<int> months_of_year(const TimeSeries& food, int year);

}  // namespace bubbledyn::combined
