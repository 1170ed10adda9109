#pragma once

#include "bubbledyn/fitting.hpp"
#include "bubbledyn/timeseries.hpp"

#include <vector>

namespace bubbledyn::supply_demand {

/// Box-Cox demand/supply curves Q_d = alpha_d - beta_d P and Q_s = alpha_s + beta_s P,
/// both sides in transformed units.
struct SupplyDemandParams {
    double lambda = 1.0;
    double alpha_d = 0.0;
    double beta_d = 0.0;
    double alpha_s = 0.0;
    double beta_s = 0.0;

    /// Throws InvalidArgument unless both slopes are non-negative with a positive sum.
    void validate() const;
};

struct Intercepts {
    double alpha_d = 0.0;
    double alpha_s = 0.0;

    friend bool operator==(const Intercepts&, const Intercepts&) = default;
};

/// A shortage (surplus_prev < 0) raises the demand intercept by the shortfall;
/// a surplus raises the supply intercept by the excess.
[[nodiscard]] Intercepts shock_update(double alpha_d, double alpha_s, double surplus_prev) noexcept;

struct Equilibrium {
    double price = 0.0;
    double quantity = 0.0;
};

/// Intersection of the two curves, in transformed units.
[[nodiscard]] Equilibrium equilibrium(const SupplyDemandParams& params);

struct EquilibriumPath {
    TimeSeries prices;
    TimeSeries quantities;
    std::vector<Intercepts> intercept_trace;
};

/// Applies shock_update with S(t-1) at each step t >= 1 and maps each
/// equilibrium back to original price/quantity units.
[[nodiscard]] EquilibriumPath simulate_equilibrium_path(const TimeSeries& surplus, const SupplyDemandParams& params0);

/// The three quantities the fitter searches over.
struct FreeParameters {
    double lambda = 1.0;
    double beta_d = 1.0;
    double alpha_s0 = 0.0;
};

/// Completes the free parameters so that the t = 0 equilibrium reproduces the
/// observed (price0, quantity0): alpha_d = Q(0,l) + beta_d P(0,l) and
/// beta_s = (Q(0,l) - alpha_s0) / P(0,l).
[[nodiscard]] SupplyDemandParams determine_params(const FreeParameters& free, double price0, double quantity0);

struct FitOptions {
    std::size_t restarts = 20;
    /// Offset into the deterministic start sequence.
    std::size_t seed = 0;
    fitting::Tolerances tolerances{};
};

struct SupplyDemandFit {
    SupplyDemandParams params;
    FreeParameters free;
    double r2_price = 0.0;
    double r2_consumption = 0.0;
    EquilibriumPath path;
    TimeSeries price_residuals;
    TimeSeries consumption_residuals;
    fitting::FitReport optimizer;
};

/// Variance-normalized joint SSE of the simulated path against price and consumption.
[[nodiscard]] double joint_objective(const FreeParameters& free, const TimeSeries& price,
                                     const TimeSeries& consumption, const TimeSeries& surplus);

/// Three-parameter fit (lambda, beta_d, alpha_s(0)); the series are aligned on
/// their common calendar span, which must hold at least 5 points.
[[nodiscard]] SupplyDemandFit fit_supply_demand(const TimeSeries& price, const TimeSeries& consumption,
                                                const TimeSeries& surplus, const FitOptions& options = {});

}  // namespace bubbledyn::supply_demand
