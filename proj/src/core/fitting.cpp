#include "bubbledyn/fitting.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

namespace bubbledyn::fitting {

namespace {

struct RunResult {
    std::vector<double> x;
    double value = kPenaltySentinel;
    int evaluations = 0;
    bool converged = false;
    bool usable = false;
};

/// One Nelder-Mead descent in coordinates normalized to the bound box.
class SimplexRun {
public:
    SimplexRun(const Objective& objective, std::span<const Interval> bounds, const Tolerances& tol)
        : objective_(objective), bounds_(bounds), tol_(tol), dim_(bounds.size()) {}

    RunResult operator()(const std::vector<double>& start) {
        RunResult result;
        std::vector<double> u(dim_);
        for (std::size_t i = 0; i < dim_; ++i) {
            u[i] = (start[i] - bounds_[i].lo) / bounds_[i].span();
        }
        const double f0 = raw(u);
        if (f0 >= kPenaltySentinel) {
            result.x = start;
            result.evaluations = evaluations_;
            return result;
        }
        penalty_scale_ = 1e4 * (1.0 + std::abs(f0));

        double best = f0;
        std::vector<double> best_u = u;
        double step = tol_.initial_step;
        bool converged = false;
        // A converged simplex is re-seeded at its best vertex with a smaller
        // edge; descent stops once a re-seed brings no improvement.
        for (int pass = 0; pass < 3 && evaluations_ < tol_.max_evaluations; ++pass) {
            auto [u_pass, f_pass, conv] = descend(best_u, best, step);
            const bool improved = f_pass < best - tol_.improvement;
            if (f_pass < best) {
                best = f_pass;
                best_u = std::move(u_pass);
            }
            converged = conv;
            if (!conv || (pass > 0 && !improved)) {
                break;
            }
            step *= 0.1;
        }

        result.x = to_x(clamped(best_u));
        result.value = best;
        result.evaluations = evaluations_;
        result.converged = converged;
        result.usable = best < kPenaltySentinel;
        return result;
    }

private:
    struct Descent {
        std::vector<double> u;
        double value;
        bool converged;
    };

    std::vector<double> clamped(std::vector<double> u) const {
        for (auto& v : u) {
            v = std::clamp(v, 0.0, 1.0);
        }
        return u;
    }

    std::vector<double> to_x(const std::vector<double>& u) const {
        std::vector<double> x(dim_);
        for (std::size_t i = 0; i < dim_; ++i) {
            x[i] = bounds_[i].lo + u[i] * bounds_[i].span();
        }
        return x;
    }

    double raw(const std::vector<double>& u) {
        ++evaluations_;
        const double f = objective_(to_x(clamped(u)));
        if (!std::isfinite(f) || f >= kPenaltySentinel) {
            return kPenaltySentinel;
        }
        return f;
    }

    double penalized(const std::vector<double>& u) {
        double outside = 0.0;
        for (double v : u) {
            const double d = v - std::clamp(v, 0.0, 1.0);
            outside += d * d;
        }
        const double f = raw(u);
        if (f >= kPenaltySentinel) {
            return f;
        }
        return f + penalty_scale_ * outside;
    }

    Descent descend(const std::vector<double>& origin, double f_origin, double step) {
        constexpr double kReflect = 1.0;
        constexpr double kExpand = 2.0;
        constexpr double kContract = 0.5;
        constexpr double kShrink = 0.5;

        const std::size_t n = dim_;
        std::vector<std::vector<double>> vertex(n + 1, origin);
        std::vector<double> value(n + 1, f_origin);
        for (std::size_t i = 0; i < n; ++i) {
            vertex[i + 1][i] += (origin[i] + step <= 1.0) ? step : -step;
            value[i + 1] = penalized(vertex[i + 1]);
        }

        std::vector<std::size_t> order(n + 1);
        std::vector<double> history;
        std::vector<double> centroid(n);
        std::vector<double> trial(n);
        auto point_along = [&](double coeff, const std::vector<double>& from) {
            for (std::size_t i = 0; i < n; ++i) {
                trial[i] = centroid[i] + coeff * (from[i] - centroid[i]);
            }
            return trial;
        };

        bool converged = false;
        while (evaluations_ < tol_.max_evaluations) {
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(),
                             [&](std::size_t a, std::size_t b) { return value[a] < value[b]; });
            const std::size_t best = order.front();
            const std::size_t worst = order.back();
            const std::size_t second_worst = order[n - 1];

            double diameter = 0.0;
            for (std::size_t v = 0; v <= n; ++v) {
                for (std::size_t i = 0; i < n; ++i) {
                    diameter = std::max(diameter, std::abs(vertex[v][i] - vertex[best][i]));
                }
            }
            history.push_back(value[best]);
            const auto iterations = static_cast<int>(history.size());
            if (diameter < tol_.diameter) {
                converged = true;
                break;
            }
            if (iterations > tol_.stall_iterations &&
                history[static_cast<std::size_t>(iterations - 1 - tol_.stall_iterations)] - value[best] <
                    tol_.improvement) {
                converged = true;
                break;
            }

            std::fill(centroid.begin(), centroid.end(), 0.0);
            for (std::size_t v = 0; v <= n; ++v) {
                if (v == worst) {
                    continue;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    centroid[i] += vertex[v][i] / static_cast<double>(n);
                }
            }

            const std::vector<double> reflected = point_along(-kReflect, vertex[worst]);
            const double f_reflected = penalized(reflected);
            if (f_reflected < value[best]) {
                const std::vector<double> expanded = point_along(-kReflect * kExpand, vertex[worst]);
                const double f_expanded = penalized(expanded);
                if (f_expanded < f_reflected) {
                    vertex[worst] = expanded;
                    value[worst] = f_expanded;
                } else {
                    vertex[worst] = reflected;
                    value[worst] = f_reflected;
                }
                continue;
            }
            if (f_reflected < value[second_worst]) {
                vertex[worst] = reflected;
                value[worst] = f_reflected;
                continue;
            }
            if (f_reflected < value[worst]) {
                const std::vector<double> contracted = point_along(kContract, reflected);
                const double f_contracted = penalized(contracted);
                if (f_contracted <= f_reflected) {
                    vertex[worst] = contracted;
                    value[worst] = f_contracted;
                    continue;
                }
            } else {
                const std::vector<double> contracted = point_along(kContract, vertex[worst]);
                const double f_contracted = penalized(contracted);
                if (f_contracted < value[worst]) {
                    vertex[worst] = contracted;
                    value[worst] = f_contracted;
                    continue;
                }
            }
            for (std::size_t v = 0; v <= n; ++v) {
                if (v == best) {
                    continue;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    vertex[v][i] = vertex[best][i] + kShrink * (vertex[v][i] - vertex[best][i]);
                }
                value[v] = penalized(vertex[v]);
            }
        }

        const auto best_it = std::min_element(value.begin(), value.end());
        const auto best = static_cast<std::size_t>(best_it - value.begin());
        // The penalized optimum lies in the box; report the in-box projection.
        std::vector<double> u = clamped(vertex[best]);
        const double f = raw(u);
        return {std::move(u), f, converged};
    }

    const Objective& objective_;
    std::span<const Interval> bounds_;
    Tolerances tol_;
    std::size_t dim_;
    double penalty_scale_ = 1.0;
    int evaluations_ = 0;
};

}  // namespace

FitReport minimize(const Objective& objective, std::span<const std::vector<double>> starts,
                   std::span<const Interval> bounds, const Tolerances& tolerances) {
    if (starts.empty()) {
        throw InvalidArgument("minimize: no start points");
    }
    if (bounds.empty()) {
        throw InvalidArgument("minimize: zero-dimensional problem");
    }
    for (std::size_t i = 0; i < bounds.size(); ++i) {
        if (!(bounds[i].lo < bounds[i].hi)) {
            throw InvalidArgument("minimize: empty bound interval in dimension " + std::to_string(i));
        }
    }
    for (std::size_t s = 0; s < starts.size(); ++s) {
        if (starts[s].size() != bounds.size()) {
            throw InvalidArgument("minimize: start " + std::to_string(s) + " has wrong dimension");
        }
        for (std::size_t i = 0; i < bounds.size(); ++i) {
            if (starts[s][i] < bounds[i].lo || starts[s][i] > bounds[i].hi) {
                throw InvalidArgument("minimize: start " + std::to_string(s) + " outside bounds in dimension " +
                                      std::to_string(i));
            }
        }
    }

    std::vector<RunResult> results(starts.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t s = next++; s < starts.size(); s = next++) {
            SimplexRun run(objective, bounds, tolerances);
            results[s] = run(starts[s]);
        }
    };
    const std::size_t threads =
        std::min<std::size_t>(starts.size(), std::max(1U, std::thread::hardware_concurrency()));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
    }

    FitReport report;
    report.objective_value = kPenaltySentinel;
    report.parameter_vector = starts.front();
    std::size_t best = results.size();
    for (std::size_t s = 0; s < results.size(); ++s) {
        report.evaluations += results[s].evaluations;
        if (!results[s].usable) {
            continue;
        }
        ++report.restarts_used;
        if (best == results.size() || results[s].value < results[best].value) {
            best = s;
        }
    }
    if (best == results.size()) {
        throw FitError("minimize: every start evaluates to the penalty sentinel", report);
    }
    report.objective_value = results[best].value;
    report.parameter_vector = results[best].x;
    report.converged = results[best].converged;
    return report;
}

double r_squared(std::span<const double> observed, std::span<const double> modeled) {
    if (observed.size() != modeled.size()) {
        throw InvalidArgument("r_squared: length mismatch");
    }
    if (observed.size() < 2) {
        throw DegenerateInputError("r_squared needs at least 2 points");
    }
    const double mean = std::accumulate(observed.begin(), observed.end(), 0.0) / static_cast<double>(observed.size());
    double sse = 0.0;
    double sst = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        sse += (observed[i] - modeled[i]) * (observed[i] - modeled[i]);
        sst += (observed[i] - mean) * (observed[i] - mean);
    }
    if (sst == 0.0) {
        throw DegenerateInputError("r_squared: observed series is constant");
    }
    return 1.0 - sse / sst;
}

double r_squared(const TimeSeries& observed, const TimeSeries& modeled) {
    return r_squared(observed.values(), modeled.values());
}

std::vector<std::vector<double>> halton_starts(std::span<const Interval> box, std::size_t count, std::size_t skip) {
    static constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
    if (box.size() > std::size(kPrimes)) {
        throw InvalidArgument("halton_starts: too many dimensions");
    }
    std::vector<std::vector<double>> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        std::vector<double> point(box.size());
        for (std::size_t d = 0; d < box.size(); ++d) {
            // Radical inverse of index (k + skip + 1) in base kPrimes[d].
            double fraction = 1.0;
            double h = 0.0;
            for (std::size_t i = k + skip + 1; i > 0; i /= static_cast<std::size_t>(kPrimes[d])) {
                fraction /= kPrimes[d];
                h += fraction * static_cast<double>(i % static_cast<std::size_t>(kPrimes[d]));
            }
            point[d] = box[d].lo + h * box[d].span();
        }
        out.push_back(std::move(point));
    }
    return out;
}

std::vector<double> least_squares(std::span<const double> a, std::size_t cols, std::span<const double> y) {
    if (cols == 0 || a.size() != cols * y.size()) {
        throw InvalidArgument("least_squares: design matrix shape mismatch");
    }
    const auto rows = static_cast<Eigen::Index>(y.size());
    const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> design(
        a.data(), rows, static_cast<Eigen::Index>(cols));
    const Eigen::Map<const Eigen::VectorXd> rhs(y.data(), rows);
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < static_cast<Eigen::Index>(cols)) {
        throw DegenerateInputError("least_squares: rank-deficient design matrix");
    }
    const Eigen::VectorXd solution = qr.solve(rhs);
    return {solution.data(), solution.data() + solution.size()};
}

}  // namespace bubbledyn::fitting
