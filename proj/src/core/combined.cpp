#include "bubbledyn/combined.hpp"

#include "bubbledyn/error.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

namespace bubbledyn::combined {

namespace {

constexpr fitting::Interval kKsdBounds{1e-4, 2.0};
constexpr fitting::Interval kKspBounds{0.0, 3.0};
constexpr fitting::Interval kCouplingBounds{-200.0, 100.0};

constexpr fitting::Interval kKsdStarts{0.01, 0.5};
constexpr fitting::Interval kKspStarts{0.5, 2.0};
constexpr fitting::Interval kCouplingStarts{-100.0, 0.0};

std::vector<TimeSeries> trim_markets(const TimeSeries& food, std::span<const TimeSeries> markets) {
    std::vector<TimeSeries> out;
    out.reserve(markets.size());
    for (std::size_t i = 0; i < markets.size(); ++i) {
        if (markets[i].frequency() != food.frequency()) {
            throw AlignmentError("market series " + std::to_string(i) + " has a different frequency than food");
        }
        if (!markets[i].index_of(food.start()) || !markets[i].index_of(food.end_date())) {
            throw AlignmentError("market series " + std::to_string(i) + " (" + markets[i].start().iso() + ".." +
                                 markets[i].end_date().iso() + ") does not cover " + food.start().iso() + ".." +
                                 food.end_date().iso());
        }
        out.push_back(markets[i].between(food.start(), food.end_date()));
    }
    return out;
}

// Conditional least squares on the one-step-ahead form of the recurrence,
// which is linear in (k_sd, k_sp, k_1..k_N) given the observed path.
std::vector<double> regression_estimate(const TimeSeries& food, std::span<const TimeSeries> markets,
                                        const ethanol::QuadraticTrend& trend, int switch_index) {
    const std::size_t cols = 2 + markets.size();
    std::vector<double> design;
    std::vector<double> y;
    for (std::size_t t = 1; t + 1 < food.size(); ++t) {
        const double td = static_cast<double>(t);
        const bool active = static_cast<int>(t) >= switch_index;
        design.push_back(trend.a + trend.b * td * td - food[t]);
        design.push_back(active ? food[t] - food[t - 1] : 0.0);
        for (const TimeSeries& m : markets) {
            design.push_back(active ? m[t] - m[t - 1] : 0.0);
        }
        y.push_back(food[t + 1] - food[t] - trend.b * (2.0 * td + 1.0));
    }
    return fitting::least_squares(design, cols, y);
}

}  // namespace

double kc_of_t(double trend_a, double trend_b, double k_sd, int t) noexcept {
    const double td = static_cast<double>(t);
    return (trend_a + trend_b * td * td) * k_sd + trend_b * (2.0 * td + 1.0);
}

void CombinedParams::validate(std::size_t market_count) const {
    if (couplings.size() != market_count) {
        throw InvalidArgument("combined model has " + std::to_string(couplings.size()) + " couplings for " +
                              std::to_string(market_count) + " market series");
    }
    if (switch_index < 1) {
        throw InvalidArgument("switch_index must be >= 1");
    }
    if (!(k_sp >= 0.0)) {
        throw InvalidArgument("k_sp must be >= 0");
    }
}

TimeSeries simulate_combined(const CombinedParams& params, std::span<const TimeSeries> markets, double p0, double p1,
                             int steps, YearMonth start) {
    params.validate(markets.size());
    if (steps < 2) {
        throw InvalidArgument("simulate_combined: steps must be >= 2");
    }
    const auto length = static_cast<std::size_t>(steps) + 1;
    for (std::size_t i = 0; i < markets.size(); ++i) {
        if (markets[i].size() < length) {
            throw InvalidArgument("market series " + std::to_string(i) + " (" + markets[i].unit() + ") has " +
                                  std::to_string(markets[i].size()) + " points, need " + std::to_string(length));
        }
    }
    std::vector<double> p(length);
    p[0] = p0;
    p[1] = p1;
    for (std::size_t t = 1; t + 1 < length; ++t) {
        const int ti = static_cast<int>(t);
        double next = kc_of_t(params.trend_a, params.trend_b, params.k_sd, ti) + (1.0 - params.k_sd) * p[t];
        if (ti >= params.switch_index) {
            next += params.k_sp * (p[t] - p[t - 1]);
            for (std::size_t i = 0; i < markets.size(); ++i) {
                next += params.couplings[i] * (markets[i][t] - markets[i][t - 1]);
            }
        }
        p[t + 1] = next;
    }
    return TimeSeries(start, Frequency::monthly, std::move(p));
}

std::vector<int> months_of_year(const TimeSeries& food, int year) {
    std::vector<int> out;
    for (int month = 1; month <= 12; ++month) {
        if (const auto idx = food.index_of({year, month})) {
            out.push_back(static_cast<int>(*idx));
        }
    }
    return out;
}

CombinedFit fit_combined(const TimeSeries& food, std::span<const TimeSeries> markets,
                         const ethanol::QuadraticTrend& trend, std::span<const int> switch_candidates,
                         const CombinedFitOptions& options) {
    if (switch_candidates.empty()) {
        throw InvalidArgument("fit_combined: no switch candidates");
    }
    if (food.frequency() != Frequency::monthly) {
        throw AlignmentError("fit_combined: food series must be monthly");
    }
    if (food.size() < 4) {
        throw DegenerateInputError("fit_combined: food series too short");
    }
    for (int s : switch_candidates) {
        if (s < 1 || s + 1 >= static_cast<int>(food.size())) {
            throw InvalidArgument("fit_combined: switch candidate " + std::to_string(s) + " outside the food series");
        }
    }
    const std::vector<TimeSeries> trimmed = trim_markets(food, markets);
    const std::size_t dim = 2 + trimmed.size();
    const int steps = static_cast<int>(food.size()) - 1;

    std::vector<fitting::Interval> bounds{kKsdBounds, kKspBounds};
    std::vector<fitting::Interval> seed_box{kKsdStarts, kKspStarts};
    for (std::size_t i = 0; i < trimmed.size(); ++i) {
        bounds.push_back(kCouplingBounds);
        seed_box.push_back(kCouplingStarts);
    }

    auto params_from = [&](std::span<const double> x, int switch_index) {
        CombinedParams p;
        p.k_sd = x[0];
        p.k_sp = x[1];
        p.couplings.assign(x.begin() + 2, x.end());
        p.trend_a = trend.a;
        p.trend_b = trend.b;
        p.switch_index = switch_index;
        return p;
    };

    std::vector<SwitchCandidateResult> results;
    std::optional<fitting::FitReport> best_report;
    int best_switch = 0;
    for (int switch_index : switch_candidates) {
        std::vector<std::vector<double>> starts = fitting::halton_starts(seed_box, options.grid_starts, options.seed);
        if (options.regression_start) {
            try {
                std::vector<double> seed = regression_estimate(food, trimmed, trend, switch_index);
                for (std::size_t d = 0; d < dim; ++d) {
                    seed[d] = std::clamp(seed[d], bounds[d].lo, bounds[d].hi);
                }
                starts.insert(starts.begin(), std::move(seed));
            } catch (const DegenerateInputError&) {
                // Markets without variation leave the couplings unidentified; grid starts only.
            }
        }
        const fitting::Objective objective = [&, switch_index](std::span<const double> x) {
            const TimeSeries path = simulate_combined(params_from(x, switch_index), trimmed, food[0], food[1], steps);
            double sse = 0.0;
            for (std::size_t t = 0; t < food.size(); ++t) {
                sse += (path[t] - food[t]) * (path[t] - food[t]);
            }
            return std::isfinite(sse) ? sse : fitting::kPenaltySentinel;
        };
        try {
            // Divergent trial parameters overflow inside TimeSeries construction.
            const fitting::Objective guarded = [&objective](std::span<const double> x) {
                try {
                    return objective(x);
                } catch (const Error&) {
                    return fitting::kPenaltySentinel;
                }
            };
            fitting::FitReport report = fitting::minimize(guarded, starts, bounds, options.tolerances);
            results.push_back({switch_index, report.objective_value, true});
            if (!best_report || report.objective_value < best_report->objective_value) {
                best_report = std::move(report);
                best_switch = switch_index;
            }
        } catch (const fitting::FitError&) {
            results.push_back({switch_index, fitting::kPenaltySentinel, false});
        }
    }
    if (!best_report) {
        throw fitting::FitError("fit_combined: no switch candidate produced a finite fit", fitting::FitReport{});
    }

    CombinedParams params = params_from(best_report->parameter_vector, best_switch);
    TimeSeries path = simulate_combined(params, trimmed, food[0], food[1], steps, food.start());
    const double r2 = fitting::r_squared(food.values(), path.values());
    return CombinedFit{std::move(params),
                       food.date_at(static_cast<std::size_t>(best_switch)),
                       best_report->objective_value,
                       r2,
                       std::move(path),
                       speculator::classify(best_report->parameter_vector[0], best_report->parameter_vector[1]),
                       *best_report,
                       std::move(results)};
}

}  // namespace bubbledyn::combined
