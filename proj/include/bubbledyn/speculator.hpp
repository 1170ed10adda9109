#pragma once

#include "bubbledyn/timeseries.hpp"

#include <algorithm>
#include <array>
#include <complex>
#include <optional>
#include <string_view>
#include <vector>

namespace bubbledyn::speculator {

/// |delta| below this is treated as a repeated root.
inline constexpr double kDiscriminantEps = 1e-12;
/// Open band (1 - tol, 1 + tol) labelled as sustained oscillation.
inline constexpr double kSustainedTol = 1e-9;

/// Coefficients of the price recurrence
///   P(t+1) + P(t)(k_sd - k_sp - 1) + P(t-1) k_sp = k_c
/// with k_sd = gamma0 (beta_d + beta_s), k_sp = mu gamma0, k_c = gamma0 (alpha_d - alpha_s).
struct SpeculatorParams {
    double k_sd = 0.0;
    double k_sp = 0.0;
    double k_c = 0.0;

    /// Equilibrium price k_c / k_sd.
    [[nodiscard]] double equilibrium() const;
    /// Linear coefficient of the characteristic polynomial m^2 + b m + k_sp.
    [[nodiscard]] double b() const noexcept { return k_sd - k_sp - 1.0; }
    [[nodiscard]] double discriminant() const noexcept { return b() * b() - 4.0 * k_sp; }
};

enum class Regime {
    FirstOrderMonotoneConvergent,
    FirstOrderMonotoneDivergent,
    FirstOrderAlternating,
    RealConvergent,
    RealDivergent,
    DampedOscillation,
    SustainedOscillation,
    AmplifiedOscillation,
    RepeatedRootConvergent,
    RepeatedRootDivergent,
};

[[nodiscard]] std::string_view to_string(Regime r) noexcept;
[[nodiscard]] std::optional<Regime> regime_from_string(std::string_view name) noexcept;
[[nodiscard]] bool is_convergent(Regime r) noexcept;
[[nodiscard]] bool is_monotone(Regime r) noexcept;

struct RegimeClassification {
    double k_sd = 0.0;
    double k_sp = 0.0;
    double discriminant = 0.0;
    std::array<std::complex<double>, 2> roots{};
    /// Present only for complex roots.
    std::optional<double> theta;
    std::optional<double> period;
    Regime label = Regime::FirstOrderMonotoneConvergent;

    [[nodiscard]] double spectral_radius() const noexcept {
        return std::max(std::abs(roots[0]), std::abs(roots[1]));
    }
};

/// theta = arcsin sqrt(1 - b^2 / (4 k_sp)) for a complex-root pair.
/// Evaluated in the equivalent atan2 form, which stays accurate near pi/2.
[[nodiscard]] double oscillation_angle(double b, double k_sp);

/// Walrasian recurrence P(t+1) = k_c - (k_sd - 1) P(t). Output has steps + 1
/// values starting at p0.
[[nodiscard]] TimeSeries simulate_first_order(const SpeculatorParams& params, double p0, int steps,
                                              YearMonth start = {2000, 1});

/// (P(0) - P_e)(1 - k_sd)^t + P_e with P(0) = p_init.
[[nodiscard]] double closed_form_first_order(const SpeculatorParams& params, double p_init, int t);

/// Trend-follower recurrence P(t+1) = k_c + (1 + k_sp - k_sd) P(t) - k_sp P(t-1).
/// Output has steps + 1 values starting at p0, p1.
[[nodiscard]] TimeSeries simulate_second_order(const SpeculatorParams& params, double p0, double p1, int steps,
                                               YearMonth start = {2000, 1});

/// Closed-form solution with P(0) = P_e and P(1) = P_e + p1_deviation.
/// Dispatches on the discriminant: distinct real roots, repeated root, or the
/// oscillating complex-root case.
[[nodiscard]] double closed_form_second_order(const SpeculatorParams& params, double p1_deviation, int t);

[[nodiscard]] RegimeClassification classify(double k_sd, double k_sp);

struct GridAxis {
    double lo = 0.0;
    double hi = 0.0;
    int n = 2;

    [[nodiscard]] double at(int i) const noexcept {
        return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
};

/// Row-major phase diagram: row j holds k_sp = k_sp_axis.at(j) for every k_sd node.
struct PhaseGrid {
    GridAxis k_sd_axis;
    GridAxis k_sp_axis;
    std::vector<RegimeClassification> nodes;

    [[nodiscard]] const RegimeClassification& at(int i_sd, int j_sp) const {
        return nodes[static_cast<std::size_t>(j_sp) * static_cast<std::size_t>(k_sd_axis.n) +
                     static_cast<std::size_t>(i_sd)];
    }
};

[[nodiscard]] PhaseGrid phase_grid(const GridAxis& k_sd_axis, const GridAxis& k_sp_axis);

}  // namespace bubbledyn::speculator
