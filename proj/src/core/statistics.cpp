#include "bubbledyn/statistics.hpp"

#include "bubbledyn/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace bubbledyn {

double box_cox(double x, double lambda) {
    if (!(x > 0.0)) {
        throw DomainError("box_cox requires x > 0, got " + std::to_string(x));
    }
    const double log_x = std::log(x);
    if (std::abs(lambda) < kBoxCoxLambdaEps) {
        return log_x;
    }
    // expm1 keeps full precision when lambda * ln(x) is small.
    return std::expm1(lambda * log_x) / lambda;
}

double inverse_box_cox(double y, double lambda) {
    if (std::abs(lambda) < kBoxCoxLambdaEps) {
        return std::exp(y);
    }
    const double base = lambda * y + 1.0;
    if (!(base > 0.0)) {
        throw DomainError("inverse_box_cox requires lambda*y + 1 > 0, got " + std::to_string(base));
    }
    return std::exp(std::log1p(lambda * y) / lambda);
}

double pearson_correlation(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) {
        throw InvalidArgument("pearson_correlation: length mismatch " + std::to_string(xs.size()) + " vs " +
                              std::to_string(ys.size()));
    }
    const std::size_t n = xs.size();
    if (n < 2) {
        throw DegenerateInputError("pearson_correlation needs at least 2 points");
    }
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw DegenerateInputError("pearson_correlation: constant series (zero variance)");
    }
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double pearson_correlation(const TimeSeries& xs, const TimeSeries& ys) {
    if (xs.frequency() != ys.frequency()) {
        throw AlignmentError("pearson_correlation: frequency mismatch");
    }
    if (xs.size() != ys.size()) {
        throw InvalidArgument("pearson_correlation: length mismatch " + std::to_string(xs.size()) + " vs " +
                              std::to_string(ys.size()));
    }
    if (xs.start() != ys.start()) {
        throw AlignmentError("pearson_correlation: series start on different dates (" + xs.start().iso() + " vs " +
                             ys.start().iso() + ")");
    }
    return pearson_correlation(xs.values(), ys.values());
}

TimeSeries normalize_unit_interval(const TimeSeries& s, std::optional<Window> exclude) {
    if (exclude) {
        validate_window(*exclude, s.size());
    }
    double lo = 0.0;
    double hi = 0.0;
    bool seen = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (exclude && exclude->contains(i)) {
            continue;
        }
        if (!seen) {
            lo = hi = s[i];
            seen = true;
        } else {
            lo = std::min(lo, s[i]);
            hi = std::max(hi, s[i]);
        }
    }
    if (!seen || hi == lo) {
        throw DegenerateInputError("normalize_unit_interval: non-excluded values span a zero range");
    }
    const double range = hi - lo;
    std::vector<double> out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        out[i] = (s[i] - lo) / range;
    }
    return s.with_values(std::move(out));
}

std::optional<LagCorrelation> LagScan::peak() const {
    if (points.empty()) {
        return std::nullopt;
    }
    return *std::max_element(points.begin(), points.end(),
                             [](const LagCorrelation& a, const LagCorrelation& b) { return a.rho < b.rho; });
}

LagScan lagged_cross_correlation(const TimeSeries& xs, const TimeSeries& ys, int max_lag) {
    if (max_lag < 0) {
        throw InvalidArgument("lagged_cross_correlation: max_lag must be >= 0");
    }
    const auto [x, y] = align(xs, ys);
    const std::size_t n = x.size();
    LagScan scan;
    for (int lag = 0; lag <= max_lag; ++lag) {
        const auto shift = static_cast<std::size_t>(lag);
        if (shift + 3 > n) {
            scan.omitted_lags.push_back(lag);
            continue;
        }
        const std::size_t overlap = n - shift;
        const auto xv = x.values().subspan(0, overlap);
        const auto yv = y.values().subspan(shift, overlap);
        try {
            scan.points.push_back({lag, pearson_correlation(xv, yv), overlap});
        } catch (const DegenerateInputError&) {
            scan.omitted_lags.push_back(lag);
        }
    }
    return scan;
}

TimeSeries deflate(const TimeSeries& nominal, const TimeSeries& cpi) {
    const auto [p, c] = align(nominal, cpi);
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (!(c[i] > 0.0)) {
            throw DomainError("deflate: non-positive CPI value at " + c.date_at(i).iso());
        }
    }
    const double ref = c[0];
    std::vector<double> out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        out[i] = p[i] / c[i] * ref;
    }
    return p.with_values(std::move(out));
}

}  // namespace bubbledyn
