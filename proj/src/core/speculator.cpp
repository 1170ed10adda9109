#include "bubbledyn/speculator.hpp"

#include "bubbledyn/error.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace bubbledyn::speculator {

namespace {

constexpr std::array<std::pair<Regime, std::string_view>, 10> kRegimeNames{{
    {Regime::FirstOrderMonotoneConvergent, "FirstOrderMonotoneConvergent"},
    {Regime::FirstOrderMonotoneDivergent, "FirstOrderMonotoneDivergent"},
    {Regime::FirstOrderAlternating, "FirstOrderAlternating"},
    {Regime::RealConvergent, "RealConvergent"},
    {Regime::RealDivergent, "RealDivergent"},
    {Regime::DampedOscillation, "DampedOscillation"},
    {Regime::SustainedOscillation, "SustainedOscillation"},
    {Regime::AmplifiedOscillation, "AmplifiedOscillation"},
    {Regime::RepeatedRootConvergent, "RepeatedRootConvergent"},
    {Regime::RepeatedRootDivergent, "RepeatedRootDivergent"},
}};

void require_steps(int steps, int minimum) {
    if (steps < minimum) {
        throw InvalidArgument("steps must be >= " + std::to_string(minimum) + ", got " + std::to_string(steps));
    }
}

}  // namespace

std::string_view to_string(Regime r) noexcept {
    for (const auto& [regime, name] : kRegimeNames) {
        if (regime == r) {
            return name;
        }
    }
    return "Unknown";
}

std::optional<Regime> regime_from_string(std::string_view name) noexcept {
    for (const auto& [regime, n] : kRegimeNames) {
        if (n == name) {
            return regime;
        }
    }
    return std::nullopt;
}

bool is_convergent(Regime r) noexcept {
    switch (r) {
    case Regime::FirstOrderMonotoneConvergent:
    case Regime::FirstOrderAlternating:
    case Regime::RealConvergent:
    case Regime::DampedOscillation:
    case Regime::RepeatedRootConvergent:
        return true;
    default:
        return false;
    }
}

bool is_monotone(Regime r) noexcept {
    return r == Regime::FirstOrderMonotoneConvergent || r == Regime::FirstOrderMonotoneDivergent;
}

double SpeculatorParams::equilibrium() const {
    if (k_sd == 0.0) {
        throw DegenerateInputError("equilibrium price undefined for k_sd = 0");
    }
    return k_c / k_sd;
}

double oscillation_angle(double b, double k_sp) {
    const double gap = 4.0 * k_sp - b * b;
    if (!(gap > 0.0)) {
        throw DomainError("oscillation angle requires a negative discriminant");
    }
    return std::atan2(std::sqrt(gap), std::abs(b));
}

TimeSeries simulate_first_order(const SpeculatorParams& params, double p0, int steps, YearMonth start) {
    require_steps(steps, 1);
    std::vector<double> p(static_cast<std::size_t>(steps) + 1);
    p[0] = p0;
    if (params.k_sd == 0.0) {
        for (std::size_t t = 0; t + 1 < p.size(); ++t) {
            p[t + 1] = params.k_c + p[t];
        }
    } else {
        // Iterating the deviation from P_e keeps the fixed point exact.
        const double pe = params.equilibrium();
        for (std::size_t t = 0; t + 1 < p.size(); ++t) {
            p[t + 1] = pe + (1.0 - params.k_sd) * (p[t] - pe);
        }
    }
    return TimeSeries(start, Frequency::monthly, std::move(p));
}

double closed_form_first_order(const SpeculatorParams& params, double p_init, int t) {
    if (t < 0) {
        throw InvalidArgument("closed_form_first_order: t must be >= 0");
    }
    if (t == 0) {
        return p_init;
    }
    const double pe = params.equilibrium();
    return (p_init - pe) * std::pow(1.0 - params.k_sd, t) + pe;
}

TimeSeries simulate_second_order(const SpeculatorParams& params, double p0, double p1, int steps, YearMonth start) {
    require_steps(steps, 2);
    std::vector<double> p(static_cast<std::size_t>(steps) + 1);
    p[0] = p0;
    p[1] = p1;
    const double carry = 1.0 + params.k_sp - params.k_sd;
    if (params.k_sd == 0.0) {
        for (std::size_t t = 1; t + 1 < p.size(); ++t) {
            p[t + 1] = params.k_c + carry * p[t] - params.k_sp * p[t - 1];
        }
    } else {
        const double pe = params.equilibrium();
        for (std::size_t t = 1; t + 1 < p.size(); ++t) {
            p[t + 1] = pe + carry * (p[t] - pe) - params.k_sp * (p[t - 1] - pe);
        }
    }
    return TimeSeries(start, Frequency::monthly, std::move(p));
}

double closed_form_second_order(const SpeculatorParams& params, double p1_deviation, int t) {
    if (t < 0) {
        throw InvalidArgument("closed_form_second_order: t must be >= 0");
    }
    const double pe = params.equilibrium();
    if (t == 0) {
        return pe;
    }
    const double b = params.b();
    const double delta = params.discriminant();

    if (delta > kDiscriminantEps) {
        const double root = std::sqrt(delta);
        const double m1 = (-b + root) / 2.0;
        const double m2 = (-b - root) / 2.0;
        return p1_deviation * (std::pow(m1, t) - std::pow(m2, t)) / root + pe;
    }
    if (delta >= -kDiscriminantEps) {
        return p1_deviation * std::pow(-b / 2.0, t - 1) * static_cast<double>(t) + pe;
    }

    const double theta = oscillation_angle(b, params.k_sp);
    const double sin_theta = std::sin(theta);
    if (sin_theta == 0.0) {
        throw DegenerateInputError("closed_form_second_order: sin(theta) = 0");
    }
    const double sign = (b >= 0.0) ? ((t - 1) % 2 == 0 ? 1.0 : -1.0) : 1.0;
    const double modulus = std::sqrt(params.k_sp);
    return sign * std::pow(modulus, t - 1) * p1_deviation * std::sin(theta * t) / sin_theta + pe;
}

RegimeClassification classify(double k_sd, double k_sp) {
    if (k_sp < 0.0) {
        throw InvalidArgument("classify: k_sp must be >= 0");
    }
    RegimeClassification c;
    c.k_sd = k_sd;
    c.k_sp = k_sp;
    const double b = k_sd - k_sp - 1.0;
    c.discriminant = b * b - 4.0 * k_sp;

    if (k_sp == 0.0) {
        // First-order recurrence: single root 1 - k_sd.
        const double r = 1.0 - k_sd;
        c.roots = {std::complex<double>(r, 0.0), std::complex<double>(0.0, 0.0)};
        if (std::abs(r) < 1.0) {
            c.label = r >= 0.0 ? Regime::FirstOrderMonotoneConvergent : Regime::FirstOrderAlternating;
        } else {
            c.label = r > 0.0 ? Regime::FirstOrderMonotoneDivergent : Regime::RealDivergent;
        }
        return c;
    }

    if (std::abs(c.discriminant) <= kDiscriminantEps) {
        const double m = -b / 2.0;
        c.roots = {std::complex<double>(m, 0.0), std::complex<double>(m, 0.0)};
        c.label = std::abs(m) < 1.0 ? Regime::RepeatedRootConvergent : Regime::RepeatedRootDivergent;
        return c;
    }

    if (c.discriminant > 0.0) {
        const double root = std::sqrt(c.discriminant);
        c.roots = {std::complex<double>((-b + root) / 2.0, 0.0), std::complex<double>((-b - root) / 2.0, 0.0)};
        c.label = c.spectral_radius() < 1.0 ? Regime::RealConvergent : Regime::RealDivergent;
        return c;
    }

    const double imag = std::sqrt(-c.discriminant) / 2.0;
    c.roots = {std::complex<double>(-b / 2.0, imag), std::complex<double>(-b / 2.0, -imag)};
    c.theta = oscillation_angle(b, k_sp);
    c.period = 2.0 * std::numbers::pi / *c.theta;
    if (k_sp > 1.0 - kSustainedTol && k_sp < 1.0 + kSustainedTol) {
        c.label = Regime::SustainedOscillation;
    } else if (k_sp < 1.0) {
        c.label = Regime::DampedOscillation;
    } else {
        c.label = Regime::AmplifiedOscillation;
    }
    return c;
}

PhaseGrid phase_grid(const GridAxis& k_sd_axis, const GridAxis& k_sp_axis) {
    for (const auto* axis : {&k_sd_axis, &k_sp_axis}) {
        if (axis->n < 2 || !(axis->lo < axis->hi)) {
            throw InvalidArgument("phase_grid: each axis needs n >= 2 and lo < hi");
        }
    }
    if (k_sp_axis.lo < 0.0) {
        throw InvalidArgument("phase_grid: k_sp axis must be non-negative");
    }
    PhaseGrid grid{k_sd_axis, k_sp_axis, {}};
    grid.nodes.reserve(static_cast<std::size_t>(k_sd_axis.n) * static_cast<std::size_t>(k_sp_axis.n));
    for (int j = 0; j < k_sp_axis.n; ++j) {
        for (int i = 0; i < k_sd_axis.n; ++i) {
            grid.nodes.push_back(classify(k_sd_axis.at(i), k_sp_axis.at(j)));
        }
    }
    return grid;
}

}  // namespace bubbledyn::speculator
