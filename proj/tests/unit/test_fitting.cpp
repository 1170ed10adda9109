#include "bubbledyn/error.hpp"
#include "bubbledyn/fitting.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <atomic>
#include <cmath>

using namespace bubbledyn;
using namespace bubbledyn::fitting;
using Catch::Matchers::WithinAbs;

TEST_CASE("one-dimensional convex objective", "[minimize]") {
    const Objective f = [](std::span<const double> x) { return (x[0] - 3.0) * (x[0] - 3.0); };
    const std::vector<std::vector<double>> starts{{0.0}};
    const Interval bounds[] = {{-10.0, 10.0}};
    const FitReport r = minimize(f, starts, bounds);
    CHECK_THAT(r.parameter_vector[0], WithinAbs(3.0, 1e-6));
    CHECK(r.converged);
    CHECK(r.objective_value >= 0.0);
}

TEST_CASE("Rosenbrock valley from five starts", "[minimize]") {
    const Objective f = [](std::span<const double> x) {
        const double a = 1.0 - x[0];
        const double b = x[1] - x[0] * x[0];
        return a * a + 100.0 * b * b;
    };
    const std::vector<std::vector<double>> starts{{-1.2, 1.0}, {0.0, 0.0}, {2.0, 2.0}, {-1.5, 2.5}, {1.5, -0.5}};
    const Interval bounds[] = {{-3.0, 3.0}, {-3.0, 3.0}};
    const FitReport r = minimize(f, starts, bounds);
    CHECK_THAT(r.parameter_vector[0], WithinAbs(1.0, 1e-4));
    CHECK_THAT(r.parameter_vector[1], WithinAbs(1.0, 1e-4));
}

TEST_CASE("all starts in the penalty region is an error", "[minimize]") {
    const Objective f = [](std::span<const double>) { return kPenaltySentinel; };
    const std::vector<std::vector<double>> starts{{0.0}, {1.0}};
    const Interval bounds[] = {{-5.0, 5.0}};
    CHECK_THROWS_AS(minimize(f, starts, bounds), FitError);
}

TEST_CASE("invalid minimize inputs", "[minimize]") {
    const Objective f = [](std::span<const double> x) { return x[0] * x[0]; };
    const Interval bounds[] = {{-1.0, 1.0}};
    CHECK_THROWS_AS(minimize(f, std::vector<std::vector<double>>{}, bounds), InvalidArgument);
    CHECK_THROWS_AS(minimize(f, std::vector<std::vector<double>>{{2.0}}, bounds), InvalidArgument);
    CHECK_THROWS_AS(minimize(f, std::vector<std::vector<double>>{{0.0, 0.0}}, bounds), InvalidArgument);
}

TEST_CASE("bounds are respected through the penalty", "[minimize]") {
    const Objective f = [](std::span<const double> x) { return (x[0] - 5.0) * (x[0] - 5.0); };
    const std::vector<std::vector<double>> starts{{0.0}};
    const Interval bounds[] = {{-1.0, 1.0}};
    const FitReport r = minimize(f, starts, bounds);
    CHECK(r.parameter_vector[0] <= 1.0 + 1e-6);
    CHECK_THAT(r.parameter_vector[0], WithinAbs(1.0, 1e-3));
}

TEST_CASE("minimize is monotone across restarts and deterministic", "[minimize][property]") {
    const Objective f = [](std::span<const double> x) {
        return std::sin(3.0 * x[0]) * std::cos(2.0 * x[1]) + 0.1 * (x[0] * x[0] + x[1] * x[1]);
    };
    const Interval bounds[] = {{-4.0, 4.0}, {-4.0, 4.0}};
    const auto starts = halton_starts(bounds, 9);
    const FitReport a = minimize(f, starts, bounds);
    const FitReport b = minimize(f, starts, bounds);
    for (const auto& s : starts) {
        CHECK(a.objective_value <= f(s));
    }
    CHECK(a.objective_value == b.objective_value);
    CHECK(a.parameter_vector == b.parameter_vector);
    CHECK(a.evaluations == b.evaluations);
}

TEST_CASE("the evaluation cap stops a run", "[minimize]") {
    std::atomic<int> calls{0};
    const Objective f = [&](std::span<const double> x) {
        ++calls;
        return x[0] * x[0] + x[1] * x[1];
    };
    Tolerances tol;
    tol.max_evaluations = 30;
    tol.stall_iterations = 1000;
    tol.diameter = 0.0;
    const std::vector<std::vector<double>> starts{{0.9, -0.8}};
    const Interval bounds[] = {{-1.0, 1.0}, {-1.0, 1.0}};
    const FitReport r = minimize(f, starts, bounds, tol);
    CHECK_FALSE(r.converged);
    CHECK(r.evaluations <= 40);
}

TEST_CASE("r_squared examples", "[r_squared]") {
    const std::vector<double> obs{1, 2, 3};
    CHECK(r_squared(obs, obs) == 1.0);
    CHECK_THAT(r_squared(obs, std::vector<double>{2, 2, 2}), WithinAbs(0.0, 1e-15));
    CHECK_THAT(r_squared(obs, std::vector<double>{1, 2, 4}), WithinAbs(0.5, 1e-15));
    CHECK_THROWS_AS(r_squared(std::vector<double>{4, 4}, std::vector<double>{1, 2}), DegenerateInputError);
    CHECK_THROWS_AS(r_squared(obs, std::vector<double>{1, 2}), InvalidArgument);
}

TEST_CASE("r_squared invariant under a common affine map", "[r_squared][property]") {
    const std::vector<double> obs{1.0, 2.5, 2.0, 4.0, 3.5};
    const std::vector<double> mod{1.2, 2.1, 2.4, 3.7, 3.6};
    std::vector<double> obs_t, mod_t;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        obs_t.push_back(-2.5 * obs[i] + 7.0);
        mod_t.push_back(-2.5 * mod[i] + 7.0);
    }
    CHECK_THAT(r_squared(obs_t, mod_t), WithinAbs(r_squared(obs, mod), 1e-12));
}

TEST_CASE("halton_starts stay inside the box", "[halton]") {
    const Interval box[] = {{0.0, 1.0}, {-5.0, 5.0}, {10.0, 20.0}};
    const auto a = halton_starts(box, 50);
    const auto b = halton_starts(box, 50, 7);
    REQUIRE(a.size() == 50);
    CHECK(a != b);
    for (const auto& p : a) {
        for (std::size_t d = 0; d < 3; ++d) {
            CHECK(p[d] >= box[d].lo);
            CHECK(p[d] <= box[d].hi);
        }
    }
    CHECK(a == halton_starts(box, 50));
}

TEST_CASE("least_squares solves a consistent system", "[least_squares]") {
    // y = 2 + 3x
    const std::vector<double> a{1, 0, 1, 1, 1, 2, 1, 3};
    const std::vector<double> y{2, 5, 8, 11};
    const auto x = least_squares(a, 2, y);
    CHECK_THAT(x[0], WithinAbs(2.0, 1e-12));
    CHECK_THAT(x[1], WithinAbs(3.0, 1e-12));
    const std::vector<double> rank_one{1, 2, 1, 2, 1, 2};
    CHECK_THROWS_AS(least_squares(rank_one, 2, std::vector<double>{1, 2, 3}), DegenerateInputError);
}
