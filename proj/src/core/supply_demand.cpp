#include "bubbledyn/supply_demand.hpp"

#include "bubbledyn/error.hpp"
#include "bubbledyn/statistics.hpp"

#include <array>
#include <cmath>
#include <numeric>
#include <string>

namespace bubbledyn::supply_demand {

namespace {

// alpha_s(0) is searched as a fraction of Q(0, lambda); fractions above 1
// would make beta_s negative.
constexpr fitting::Interval kLambdaBounds{0.05, 2.0};
constexpr fitting::Interval kBetaDBounds{0.0, 20.0};
constexpr fitting::Interval kSupplyFractionBounds{-1.0, 1.0};

constexpr fitting::Interval kLambdaStarts{0.5, 1.2};
constexpr fitting::Interval kBetaDStarts{0.1, 5.0};
constexpr fitting::Interval kSupplyFractionStarts{0.1, 0.95};

struct Aligned {
    TimeSeries price;
    TimeSeries consumption;
    TimeSeries surplus;
};

Aligned align_three(const TimeSeries& price, const TimeSeries& consumption, const TimeSeries& surplus) {
    auto pc = align(price, consumption);
    auto ps = align(pc.first, surplus);
    auto cs = align(pc.second, ps.second);
    return {ps.first.between(cs.first.start(), cs.first.end_date()), std::move(cs.first), std::move(cs.second)};
}

double variance(std::span<const double> v) {
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double acc = 0.0;
    for (double x : v) {
        acc += (x - mean) * (x - mean);
    }
    return acc / static_cast<double>(v.size());
}

double sse(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += (a[i] - b[i]) * (a[i] - b[i]);
    }
    return acc;
}

FreeParameters from_vector(std::span<const double> x, double quantity0) {
    const double q0 = box_cox(quantity0, x[0]);
    return {x[0], x[1], x[2] * q0};
}

}  // namespace

void SupplyDemandParams::validate() const {
    if (!(beta_d >= 0.0) || !(beta_s >= 0.0)) {
        throw InvalidArgument("supply/demand slopes must be non-negative");
    }
    if (!(beta_d + beta_s > 0.0)) {
        throw DegenerateInputError("beta_d + beta_s must be positive");
    }
}

Intercepts shock_update(double alpha_d, double alpha_s, double surplus_prev) noexcept {
    if (surplus_prev < 0.0) {
        return {alpha_d - surplus_prev, alpha_s};
    }
    if (surplus_prev > 0.0) {
        return {alpha_d, alpha_s + surplus_prev};
    }
    return {alpha_d, alpha_s};
}

Equilibrium equilibrium(const SupplyDemandParams& params) {
    const double slope = params.beta_d + params.beta_s;
    if (slope == 0.0) {
        throw DegenerateInputError("equilibrium undefined for beta_d + beta_s = 0");
    }
    return {(params.alpha_d - params.alpha_s) / slope,
            (params.alpha_d * params.beta_s + params.alpha_s * params.beta_d) / slope};
}

EquilibriumPath simulate_equilibrium_path(const TimeSeries& surplus, const SupplyDemandParams& params0) {
    params0.validate();
    const std::size_t n = surplus.size();
    std::vector<double> prices(n);
    std::vector<double> quantities(n);
    std::vector<Intercepts> trace(n);
    SupplyDemandParams params = params0;
    for (std::size_t t = 0; t < n; ++t) {
        if (t > 0) {
            const Intercepts next = shock_update(params.alpha_d, params.alpha_s, surplus[t - 1]);
            params.alpha_d = next.alpha_d;
            params.alpha_s = next.alpha_s;
        }
        trace[t] = {params.alpha_d, params.alpha_s};
        const Equilibrium eq = equilibrium(params);
        try {
            prices[t] = inverse_box_cox(eq.price, params.lambda);
            quantities[t] = inverse_box_cox(eq.quantity, params.lambda);
        } catch (const DomainError& e) {
            throw DomainError("equilibrium path leaves the Box-Cox domain at step " + std::to_string(t) + " (" +
                              surplus.date_at(t).iso() + "): " + e.what());
        }
    }
    return {TimeSeries(surplus.start(), surplus.frequency(), std::move(prices)),
            TimeSeries(surplus.start(), surplus.frequency(), std::move(quantities)), std::move(trace)};
}

SupplyDemandParams determine_params(const FreeParameters& free, double price0, double quantity0) {
    const double p0 = box_cox(price0, free.lambda);
    const double q0 = box_cox(quantity0, free.lambda);
    if (p0 == 0.0) {
        throw DegenerateInputError("transformed initial price P(0, lambda) is zero");
    }
    SupplyDemandParams params;
    params.lambda = free.lambda;
    params.beta_d = free.beta_d;
    params.alpha_s = free.alpha_s0;
    params.alpha_d = q0 + free.beta_d * p0;
    params.beta_s = (q0 - free.alpha_s0) / p0;
    return params;
}

double joint_objective(const FreeParameters& free, const TimeSeries& price, const TimeSeries& consumption,
                       const TimeSeries& surplus) {
    try {
        const SupplyDemandParams params = determine_params(free, price[0], consumption[0]);
        if (params.beta_s < 0.0 || params.beta_d < 0.0 || params.beta_d + params.beta_s <= 0.0) {
            return fitting::kPenaltySentinel;
        }
        const EquilibriumPath path = simulate_equilibrium_path(surplus, params);
        const double fp = sse(price.values(), path.prices.values()) / variance(price.values());
        const double fq = sse(consumption.values(), path.quantities.values()) / variance(consumption.values());
        const double f = fp + fq;
        return std::isfinite(f) ? f : fitting::kPenaltySentinel;
    } catch (const Error&) {
        return fitting::kPenaltySentinel;
    }
}

SupplyDemandFit fit_supply_demand(const TimeSeries& price, const TimeSeries& consumption, const TimeSeries& surplus,
                                  const FitOptions& options) {
    const Aligned data = align_three(price, consumption, surplus);
    if (data.price.size() < 5) {
        throw DegenerateInputError("fit_supply_demand needs at least 5 aligned points, got " +
                                   std::to_string(data.price.size()));
    }
    if (!(data.price[0] > 0.0) || !(data.consumption[0] > 0.0)) {
        throw DomainError("fit_supply_demand: initial price and consumption must be positive");
    }
    if (variance(data.price.values()) == 0.0 || variance(data.consumption.values()) == 0.0) {
        throw DegenerateInputError("fit_supply_demand: price or consumption is constant");
    }
    const double q_initial = data.consumption[0];

    const std::array<fitting::Interval, 3> bounds{kLambdaBounds, kBetaDBounds, kSupplyFractionBounds};
    const std::array<fitting::Interval, 3> start_box{kLambdaStarts, kBetaDStarts, kSupplyFractionStarts};
    const auto starts = fitting::halton_starts(start_box, options.restarts, options.seed);

    const fitting::Objective objective = [&](std::span<const double> x) {
        return joint_objective(from_vector(x, q_initial), data.price, data.consumption, data.surplus);
    };
    const fitting::FitReport report = fitting::minimize(objective, starts, bounds, options.tolerances);

    const FreeParameters free = from_vector(report.parameter_vector, q_initial);
    const SupplyDemandParams params = determine_params(free, data.price[0], q_initial);
    EquilibriumPath path = simulate_equilibrium_path(data.surplus, params);
    std::vector<double> rp(data.price.size());
    std::vector<double> rq(data.price.size());
    for (std::size_t i = 0; i < rp.size(); ++i) {
        rp[i] = data.price[i] - path.prices[i];
        rq[i] = data.consumption[i] - path.quantities[i];
    }
    const double r2_price = fitting::r_squared(data.price, path.prices);
    const double r2_consumption = fitting::r_squared(data.consumption, path.quantities);
    return SupplyDemandFit{params,
                           free,
                           r2_price,
                           r2_consumption,
                           std::move(path),
                           data.price.with_values(std::move(rp)),
                           data.consumption.with_values(std::move(rq)),
                           report};
}

}  // namespace bubbledyn::supply_demand
