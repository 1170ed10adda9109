#include "bubbledyn/ethanol.hpp"

#include "bubbledyn/error.hpp"
#include "bubbledyn/fitting.hpp"
#include "bubbledyn/statistics.hpp"

#include <algorithm>
#include <string>

namespace bubbledyn::ethanol {

QuadraticTrend quadratic_fit(const TimeSeries& s, std::optional<Window> exclude) {
    if (exclude) {
        return quadratic_fit(s, std::span<const Window>(&*exclude, 1));
    }
    return quadratic_fit(s, std::span<const Window>());
}

QuadraticTrend quadratic_fit(const TimeSeries& s, std::span<const Window> excludes) {
    for (const Window& w : excludes) {
        validate_window(w, s.size());
    }
    std::vector<double> design;
    std::vector<double> y;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (std::any_of(excludes.begin(), excludes.end(), [i](const Window& w) { return w.contains(i); })) {
            continue;
        }
        const double t = static_cast<double>(i);
        design.push_back(1.0);
        design.push_back(t * t);
        y.push_back(s[i]);
    }
    if (y.size() < 3) {
        throw DegenerateInputError("quadratic_fit needs at least 3 usable points, got " + std::to_string(y.size()));
    }
    const std::vector<double> coef = fitting::least_squares(design, 2, y);
    QuadraticTrend trend{coef[0], coef[1], 1.0};

    double mean = 0.0;
    for (double v : y) {
        mean += v;
    }
    mean /= static_cast<double>(y.size());
    double sse = 0.0;
    double sst = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) {
        const double fitted = coef[0] + coef[1] * design[2 * k + 1];
        sse += (y[k] - fitted) * (y[k] - fitted);
        sst += (y[k] - mean) * (y[k] - mean);
    }
    // A constant series is reproduced exactly by b = 0.
    trend.r_squared = sst > 0.0 ? std::clamp(1.0 - sse / sst, 0.0, 1.0) : 1.0;
    return trend;
}

void EthanolLinkParams::validate() const {
    if (!(beta_sum > 0.0)) {
        throw InvalidArgument("ethanol link requires beta_d + beta_s > 0");
    }
}

TimeSeries implied_food_price(const TimeSeries& q_x, const EthanolLinkParams& link) {
    link.validate();
    std::vector<double> p(q_x.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = (q_x[i] - link.q_total + link.alpha_d) / link.beta_sum;
    }
    return q_x.with_values(std::move(p));
}

TrendComparison trend_comparison(const TimeSeries& series_a, const TimeSeries& series_b,
                                 std::optional<Window> exclude_b) {
    if (exclude_b) {
        validate_window(*exclude_b, series_b.size());
    }
    const auto [a, b] = align(series_a, series_b);
    if (a.size() < 4) {
        throw DegenerateInputError("trend_comparison needs an overlap of at least 4 points, got " +
                                   std::to_string(a.size()));
    }

    std::optional<Window> window;
    if (exclude_b) {
        const std::size_t offset = *series_b.index_of(b.start());
        const std::size_t lo = exclude_b->begin_index > offset ? exclude_b->begin_index - offset : 0;
        const std::size_t hi = std::min(exclude_b->end_index > offset ? exclude_b->end_index - offset : 0, b.size());
        if (lo < hi) {
            window = Window{lo, hi};
        }
    }

    TimeSeries norm_a = normalize_unit_interval(a);
    TimeSeries norm_b = normalize_unit_interval(b, window);
    const QuadraticTrend trend_a = quadratic_fit(norm_a);
    const QuadraticTrend trend_b = quadratic_fit(norm_b, window);

    std::vector<double> xa;
    std::vector<double> xb;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (window && window->contains(i)) {
            continue;
        }
        xa.push_back(norm_a[i]);
        xb.push_back(norm_b[i]);
    }
    const double rho = pearson_correlation(xa, xb);
    return TrendComparison{trend_a, trend_b, trend_a.b - trend_b.b, rho, xa.size(),
                           std::move(norm_a), std::move(norm_b), window};
}

}  // namespace bubbledyn::ethanol
