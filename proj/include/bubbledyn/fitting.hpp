#pragma once

#include "bubbledyn/error.hpp"
#include "bubbledyn/timeseries.hpp"

#include <functional>
#include <span>
#include <vector>

namespace bubbledyn::fitting {

/// Objectives return this (or anything larger) for infeasible points.
inline constexpr double kPenaltySentinel = 1e150;

using Objective = std::function<double(std::span<const double>)>;

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    [[nodiscard]] double span() const noexcept { return hi - lo; }
};

struct Tolerances {
    /// Simplex diameter, measured in units of each bound's span.
    double diameter = 1e-8;
    /// Absolute improvement of the best vertex required over `stall_iterations`.
    double improvement = 1e-10;
    int stall_iterations = 50;
    int max_evaluations = 20000;
    /// Initial simplex edge as a fraction of each bound's span.
    double initial_step = 0.1;
};

struct FitReport {
    double objective_value = 0.0;
    int evaluations = 0;
    bool converged = false;
    int restarts_used = 0;
    std::vector<double> parameter_vector;
};

/// Thrown when no start yields a usable objective value. Carries the best
/// point seen so far.
class FitError : public Error {
public:
    FitError(const std::string& message, FitReport best) : Error(ErrorCode::fit, message), best_(std::move(best)) {}

    [[nodiscard]] const FitReport& best_so_far() const noexcept { return best_; }

private:
    FitReport best_;
};

/// Simplex descent (reflection, expansion, contraction, shrink) from each
/// start; returns the best terminal point over all starts. Bounds are enforced
/// by an additive quadratic penalty, so the simplex itself is unconstrained.
/// Starts run concurrently; the result does not depend on scheduling.
[[nodiscard]] FitReport minimize(const Objective& objective, std::span<const std::vector<double>> starts,
                                 std::span<const Interval> bounds, const Tolerances& tolerances = {});

/// 1 - SSE/SST, SST about the observed mean.
[[nodiscard]] double r_squared(std::span<const double> observed, std::span<const double> modeled);
[[nodiscard]] double r_squared(const TimeSeries& observed, const TimeSeries& modeled);

/// Deterministic start points spread over a box (Halton sequence, bases 2, 3, 5, ...).
/// `skip` offsets into the sequence, which is how a CLI seed varies the grid.
[[nodiscard]] std::vector<std::vector<double>> halton_starts(std::span<const Interval> box, std::size_t count,
                                                             std::size_t skip = 0);

/// Solves the linear least-squares problem min |A x - y|; A is row-major
/// with `cols` columns. Throws DegenerateInputError if A is rank deficient.
[[nodiscard]] std::vector<double> least_squares(std::span<const double> a, std::size_t cols,
                                                std::span<const double> y);

}  // namespace bubbledyn::fitting
