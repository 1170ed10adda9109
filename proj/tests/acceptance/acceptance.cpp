// Acceptance checks. Prints one PASS/FAIL/SKIP line per criterion and exits
// nonzero when any criterion fails. Data-dependent criteria read fixtures from
// BUBBLEDYN_DATA_DIR (falling back to data/fixtures in the source tree).

#include "bubbledyn/combined.hpp"
#include "bubbledyn/error.hpp"
#include "bubbledyn/ethanol.hpp"
#include "bubbledyn/io.hpp"
#include "bubbledyn/speculator.hpp"
#include "bubbledyn/statistics.hpp"
#include "bubbledyn/supply_demand.hpp"

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace bubbledyn;
namespace fs = std::filesystem;

namespace {

enum class Outcome { pass, fail, skip };

struct Verdict {
    Outcome outcome;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double time_limit_s;  // 0: no limit
    std::function<Verdict()> run;
};

Verdict pass(std::string d) { return {Outcome::pass, std::move(d)}; }
Verdict fail(std::string d) { return {Outcome::fail, std::move(d)}; }
Verdict skip(std::string d) { return {Outcome::skip, std::move(d)}; }

template <typename... Args>
std::string fmt(const char* f, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// ---- fixtures --------------------------------------------------------------

fs::path data_dir() {
    if (const char* env = std::getenv("BUBBLEDYN_DATA_DIR"); env != nullptr && *env != '\0') {
        return env;
    }
    return fs::path(BUBBLEDYN_SOURCE_DIR) / "data" / "fixtures";
}

struct Missing {
    std::string list;
};

// Returns the paths of the named fixtures or the list of the absent ones.
std::vector<fs::path> fixtures(std::initializer_list<const char*> names, Missing& missing) {
    std::vector<fs::path> out;
    for (const char* n : names) {
        const fs::path p = data_dir() / n;
        if (!fs::exists(p)) {
            missing.list += (missing.list.empty() ? "" : ", ") + std::string(n);
        }
        out.push_back(p);
    }
    return out;
}

Verdict skip_missing(const Missing& m) {
    return skip("fixtures absent in " + data_dir().string() + ": " + m.list);
}

TimeSeries load(const fs::path& path, Frequency f, io::Transform t = io::Transform::none) {
    io::SeriesSpec spec;
    spec.path = path;
    spec.frequency = f;
    spec.transform = t;
    return io::load_series(spec);
}

// ---- 1. closed form vs iteration ---------------------------------------------

double root_modulus(double k_sd, double k_sp) {
    const double b = k_sd - k_sp - 1.0;
    const std::complex<double> s = std::sqrt(std::complex<double>(b * b - 4.0 * k_sp, 0.0));
    return std::max(std::abs((-b + s) / 2.0), std::abs((-b - s) / 2.0));
}

// Relative error against the running maximum magnitude of the iterated path,
// so zero crossings of an oscillating path do not divide by ~0.
double oracle_error(double k_sd, double k_sp, double pe, double dev) {
    const speculator::SpeculatorParams p{k_sd, k_sp, pe * k_sd};
    const auto sim = speculator::simulate_second_order(p, p.equilibrium(), p.equilibrium() + dev, 100);
    double worst = 0.0;
    double scale = 0.0;
    for (int t = 0; t <= 100; ++t) {
        const double e = sim[static_cast<std::size_t>(t)];
        scale = std::max(scale, std::abs(e));
        worst = std::max(worst, std::abs(speculator::closed_form_second_order(p, dev, t) - e) / scale);
    }
    return worst;
}

Verdict closed_form_oracle() {
    std::mt19937_64 rng(20110401);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto pe = [&] { return 10.0 + 90.0 * unit(rng); };
    const auto dev = [&] { return (unit(rng) < 0.5 ? -1.0 : 1.0) * (0.1 + 2.0 * unit(rng)); };

    std::vector<std::pair<std::string, double>> worst;
    const auto draw = [&](const std::string& name, auto sample) {
        double w = 0.0;
        for (int i = 0; i < 100; ++i) {
            const auto [k_sd, k_sp] = sample();
            w = std::max(w, oracle_error(k_sd, k_sp, pe(), dev()));
        }
        worst.emplace_back(name, w);
    };

    const auto real_roots = [&](bool convergent) {
        return [&, convergent] {
            for (;;) {
                const double k_sp = 1.5 * unit(rng);
                const double k_sd = 0.01 + 5.0 * unit(rng);
                const double b = k_sd - k_sp - 1.0;
                if (b * b - 4.0 * k_sp > 1e-3 && (root_modulus(k_sd, k_sp) < 1.0) == convergent) {
                    return std::pair{k_sd, k_sp};
                }
            }
        };
    };
    draw("real/convergent", real_roots(true));
    draw("real/divergent", real_roots(false));
    for (const double k_sp : {0.5, 1.0, 1.5}) {
        draw(fmt("complex k_sp=%.1f", k_sp), [&, k_sp] {
            const double b = (2.0 * unit(rng) - 1.0) * 0.999 * 2.0 * std::sqrt(k_sp);
            return std::pair{b + k_sp + 1.0, k_sp};
        });
    }
    draw("repeated", [&] {
        const double k_sp = unit(rng) < 0.5 ? 0.01 + 0.7 * unit(rng) : 1.3 + 1.5 * unit(rng);
        const double sign = unit(rng) < 0.5 ? -1.0 : 1.0;
        return std::pair{1.0 + k_sp + sign * 2.0 * std::sqrt(k_sp), k_sp};
    });

    double overall = 0.0;
    std::string detail;
    for (const auto& [name, w] : worst) {
        overall = std::max(overall, w);
        detail += fmt("%s %.1e; ", name.c_str(), w);
    }
    detail += "tolerance 1e-8";
    return overall <= 1e-8 ? pass(detail) : fail(detail);
}

// ---- 2. period ---------------------------------------------------------------

Verdict period_formula() {
    const auto c = speculator::classify(0.098, 1.29);
    if (!c.period) {
        return fail("no complex roots at (0.098, 1.29)");
    }
    const double p = *c.period;
    const std::string d = fmt("2pi/theta = %.4f steps (theta = %.6f), target 23.6 +/- 0.1", p, *c.theta);
    return std::abs(p - 23.6) <= 0.1 ? pass(d) : fail(d);
}

// ---- 3. phase diagram structure ------------------------------------------------

Verdict phase_structure() {
    std::string problems;

    // (a) contiguous convergent window strictly inside (0, 1] at k_sd = 3.
    const int n = 2001;
    double lo = 0, hi = 0;
    int runs = 0;
    bool prev = false;
    for (int j = 0; j < n; ++j) {
        const double k_sp = 2.0 * j / (n - 1);
        const bool conv = speculator::is_convergent(speculator::classify(3.0, k_sp).label);
        if (conv && !prev) {
            ++runs;
            if (runs == 1) {
                lo = k_sp;
            }
        }
        if (conv) {
            hi = k_sp;
        }
        prev = conv;
    }
    if (runs != 1 || !(lo > 0.0) || hi > 1.0) {
        problems += fmt("(a) window runs=%d [%.4f, %.4f]; ", runs, lo, hi);
    }

    // (b) no stabilization for k_sd >= 4.
    int convergent_b = 0;
    for (const double k_sd : {4.0, 4.5}) {
        for (int j = 0; j < 1000; ++j) {
            convergent_b += speculator::is_convergent(speculator::classify(k_sd, 2.0 * j / 999.0).label) ? 1 : 0;
        }
    }
    if (convergent_b != 0) {
        problems += fmt("(b) %d convergent nodes at k_sd in {4, 4.5}; ", convergent_b);
    }

    // (c) the k_sp = 0 row follows first-order theory.
    int mismatches = 0;
    const auto row = speculator::phase_grid({0.0025, 4.9975, 1000}, {0.0, 2.0, 2});
    for (int i = 0; i < 1000; ++i) {
        const auto& node = row.at(i, 0);
        const bool conv = speculator::is_convergent(node.label);
        const bool mono = speculator::is_monotone(node.label);
        if (conv != (node.k_sd < 2.0) || mono != (node.k_sd < 1.0)) {
            ++mismatches;
        }
    }
    if (mismatches != 0) {
        problems += fmt("(c) %d first-order mismatches; ", mismatches);
    }

    const std::string d = fmt("(a) k_sd=3 convergent for k_sp in [%.4f, %.4f]; (b) 0 of 2000 convergent; (c) 1000 row "
                              "nodes agree",
                              lo, hi);
    return problems.empty() ? pass(d) : fail(problems);
}

// ---- 4. synthetic recovery -------------------------------------------------------

Verdict fit_recovery() {
    constexpr int n = 88;  // Jan 2004 .. Apr 2011
    std::vector<double> equity, bonds;
    for (int t = 0; t < n; ++t) {
        equity.push_back(1150.0 + 180.0 * std::sin(2.0 * std::numbers::pi * t / 43.0) + 1.5 * t);
        bonds.push_back(1.0 / (4.4 - 0.012 * t + 0.25 * std::cos(2.0 * std::numbers::pi * t / 31.0)));
    }
    const TimeSeries markets[] = {TimeSeries({2004, 1}, Frequency::monthly, equity, "index"),
                                  TimeSeries({2004, 1}, Frequency::monthly, bonds, "1/percent")};
    const double a = 128.0;
    const double b = 0.009;
    const combined::CombinedParams truth{0.098, 1.29, {-0.095, -67.9}, a, b, 40};  // switch May 2007
    const auto food = combined::simulate_combined(truth, markets, a, a + b, n - 1, {2004, 1});

    const auto candidates = combined::months_of_year(food, 2007);
    const auto fit = combined::fit_combined(food, markets, {a, b, 1.0}, candidates);

    const auto rel = [](double got, double want) { return std::abs(got - want) / std::abs(want); };
    const double e_sd = rel(fit.params.k_sd, 0.098);
    const double e_sp = rel(fit.params.k_sp, 1.29);
    const double e_k1 = rel(fit.params.couplings[0], -0.095);
    const double e_k2 = rel(fit.params.couplings[1], -67.9);
    const std::string d = fmt("k_sd=%.5f k_sp=%.5f k1=%.5f k2=%.3f switch=%s; rel err %.1e %.1e %.1e %.1e", fit.params.k_sd,
                              fit.params.k_sp, fit.params.couplings[0], fit.params.couplings[1],
                              fit.switch_date.iso().c_str(), e_sd, e_sp, e_k1, e_k2);
    return e_sd <= 0.05 && e_sp <= 0.05 && e_k1 <= 0.10 && e_k2 <= 0.10 ? pass(d) : fail(d);
}

// ---- 5. reproduction on FAO / equity / bond fixtures ----------------------------

Verdict paper_parameters() {
    Missing missing;
    const auto paths = fixtures({"fao_food_price_index_monthly.csv", "sp500_monthly.csv", "us_10y_note_yield_monthly.csv"},
                                missing);
    if (!missing.list.empty()) {
        return skip_missing(missing);
    }
    const auto food = load(paths[0], Frequency::monthly).between({2004, 1}, {2011, 4});
    const TimeSeries markets[] = {load(paths[1], Frequency::monthly),
                                  load(paths[2], Frequency::monthly, io::Transform::inverse)};
    std::vector<Window> excludes;
    for (const auto& [first, last] : {std::pair{YearMonth{2007, 1}, YearMonth{2008, 12}},
                                      std::pair{YearMonth{2010, 6}, YearMonth{9999, 12}}}) {
        if (const auto w = food.window_between(first, last)) {
            excludes.push_back(*w);
        }
    }
    const auto trend = ethanol::quadratic_fit(food, excludes);
    const auto fit = combined::fit_combined(food, markets, trend, combined::months_of_year(food, 2007));
    const auto& p = fit.params;
    const bool ok = p.k_sd >= 0.07 && p.k_sd <= 0.13 && p.k_sp >= 1.1 && p.k_sp <= 1.5 && p.couplings[0] < 0 &&
                    p.couplings[1] < 0 && fit.switch_date.year == 2007 &&
                    fit.regime.label == speculator::Regime::AmplifiedOscillation;
    const std::string d = fmt("k_sd=%.4f k_sp=%.4f k_equity=%.4f k_bonds=%.3f switch=%s regime=%s period=%.2f", p.k_sd,
                              p.k_sp, p.couplings[0], p.couplings[1], fit.switch_date.iso().c_str(),
                              std::string(speculator::to_string(fit.regime.label)).c_str(),
                              fit.regime.period.value_or(0.0));
    return ok ? pass(d) : fail(d);
}

// ---- 6. ethanol trend ------------------------------------------------------------

Verdict ethanol_trend() {
    Missing missing;
    const auto paths = fixtures({"us_corn_ethanol_annual.csv", "fao_food_price_index_annual.csv"}, missing);
    if (!missing.list.empty()) {
        return skip_missing(missing);
    }
    const auto ethanol = load(paths[0], Frequency::annual).between({1999, 1}, {2010, 1});
    const auto food = load(paths[1], Frequency::annual).between({1999, 1}, {2010, 1});
    const auto peak = food.window_between({2007, 1}, {2008, 1});
    const auto cmp = ethanol::trend_comparison(ethanol, food, peak);
    const double gap = std::abs(cmp.coefficient_difference);
    const std::string d = fmt("b_ethanol=%.5f b_food=%.5f |gap|=%.5f rho=%.4f", cmp.trend_a.b, cmp.trend_b.b, gap, cmp.rho);
    return gap <= 0.0006 && cmp.rho >= 0.95 ? pass(d) : fail(d);
}

// ---- 7. supply/demand on wheat ------------------------------------------------------

Verdict wheat_fit() {
    Missing missing;
    const auto paths = fixtures(
        {"wheat_price_annual.csv", "wheat_consumption_annual.csv", "wheat_production_annual.csv"}, missing);
    if (!missing.list.empty()) {
        return skip_missing(missing);
    }
    const auto price = load(paths[0], Frequency::annual).between({1982, 1}, {2010, 1});
    const auto consumption = load(paths[1], Frequency::annual).between({1982, 1}, {2010, 1});
    const auto surplus = io::derive_surplus(load(paths[2], Frequency::annual), consumption);
    const auto fit = supply_demand::fit_supply_demand(price, consumption, surplus);

    // Joint residual in the objective's variance-normalized units.
    const auto variance = [](const TimeSeries& s) {
        double m = 0.0;
        for (double v : s.values()) {
            m += v;
        }
        m /= static_cast<double>(s.size());
        double ss = 0.0;
        for (double v : s.values()) {
            ss += (v - m) * (v - m);
        }
        return ss / static_cast<double>(s.size());
    };
    const double vp = variance(align(price, fit.price_residuals).first);
    const double vq = variance(align(consumption, fit.consumption_residuals).first);
    double pre = 0.0, post = 0.0;
    int n_pre = 0, n_post = 0;
    for (std::size_t t = 0; t < fit.price_residuals.size(); ++t) {
        const double rp = fit.price_residuals[t];
        const double rq = fit.consumption_residuals[t];
        const double r2 = rp * rp / vp + rq * rq / vq;
        if (fit.price_residuals.date_at(t).year >= 2000) {
            post += r2;
            ++n_post;
        } else {
            pre += r2;
            ++n_pre;
        }
    }
    if (n_pre == 0 || n_post == 0) {
        return fail("wheat fixture does not straddle 2000");
    }
    const double ratio = std::sqrt(post / n_post) / std::sqrt(pre / n_pre);
    const bool ok = std::abs(fit.free.lambda - 1.0) <= 0.05 && std::abs(fit.free.beta_d - 1.01) <= 0.26 && ratio >= 2.0;
    const std::string d = fmt("lambda=%.4f beta_d=%.4f alpha_d0=%.1f; post/pre-2000 residual RMS ratio %.2f",
                              fit.free.lambda, fit.free.beta_d, fit.params.alpha_d, ratio);
    return ok ? pass(d) : fail(d);
}

// ---- 8. invariant suites ---------------------------------------------------------------

Verdict invariants() {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int checks = 0;
    int failures = 0;
    std::string first_failure;
    const auto expect = [&](bool ok, const char* what) {
        ++checks;
        if (!ok) {
            if (failures++ == 0) {
                first_failure = what;
            }
        }
    };

    for (int i = 0; i < 20000; ++i) {
        const double x = std::exp(std::log(1e-3) + unit(rng) * std::log(1e6));
        const double l = -2.0 + 4.0 * unit(rng);
        expect(std::abs(inverse_box_cox(box_cox(x, l), l) - x) <= 1e-10 * x, "box-cox round trip");
    }
    for (double x = 0.1; x <= 100.0; x *= 1.01) {
        expect(std::abs(box_cox(x, kBoxCoxLambdaEps) - std::log(x)) < 1e-6, "box-cox continuity");
    }

    for (int i = 0; i < 2000; ++i) {
        const speculator::SpeculatorParams p{0.01 + 4.0 * unit(rng), 2.0 * unit(rng), -50.0 + 100.0 * unit(rng)};
        const double pe = p.equilibrium();
        const auto s1 = speculator::simulate_first_order(p, pe, 100);
        const auto s2 = speculator::simulate_second_order(p, pe, pe, 100);
        bool fixed = true;
        for (std::size_t t = 0; t < s1.size(); ++t) {
            fixed = fixed && s1[t] == pe && s2[t] == pe;
        }
        expect(fixed, "fixed-point invariance");
    }

    for (int i = 0; i < 5000; ++i) {
        const supply_demand::SupplyDemandParams p{1.0, 100.0 * unit(rng), 0.1 + 5.0 * unit(rng), 100.0 * unit(rng),
                                                  0.1 + 5.0 * unit(rng)};
        const double s = 0.01 + 10.0 * unit(rng);
        const double base = supply_demand::equilibrium(p).price;
        const auto up = supply_demand::shock_update(p.alpha_d, p.alpha_s, -s);
        const auto down = supply_demand::shock_update(p.alpha_d, p.alpha_s, s);
        expect(supply_demand::equilibrium({1.0, up.alpha_d, p.beta_d, up.alpha_s, p.beta_s}).price > base,
               "shortage raises price");
        expect(supply_demand::equilibrium({1.0, down.alpha_d, p.beta_d, down.alpha_s, p.beta_s}).price < base,
               "surplus lowers price");
    }

    for (int i = 0; i < 500; ++i) {
        std::vector<double> v(30);
        for (auto& x : v) {
            x = -100.0 + 200.0 * unit(rng);
        }
        const TimeSeries s({2000, 1}, Frequency::monthly, v);
        const Window w{10, 14};
        const auto once = normalize_unit_interval(s, w);
        const auto twice = normalize_unit_interval(once, w);
        bool same = true;
        for (std::size_t t = 0; t < v.size(); ++t) {
            same = same && std::abs(once[t] - twice[t]) <= 1e-12;
        }
        expect(same, "normalization idempotence");
    }

    const fs::path tmp = fs::temp_directory_path() / "bubbledyn_acceptance_roundtrip.csv";
    for (int i = 0; i < 50; ++i) {
        std::vector<double> v(100);
        for (auto& x : v) {
            x = (unit(rng) - 0.5) * std::pow(10.0, -20.0 + 40.0 * unit(rng));
        }
        const auto freq = i % 2 == 0 ? Frequency::monthly : Frequency::annual;
        const TimeSeries s({1950, 1}, freq, v);
        io::emit(s, io::Format::csv, tmp);
        const auto back = load(tmp, freq);
        expect(back.values().size() == v.size() && std::equal(v.begin(), v.end(), back.values().begin()),
               "emit/load round trip");
    }
    fs::remove(tmp);

    const std::string d = fmt("%d checks, %d failures", checks, failures) +
                          (failures > 0 ? " (first: " + first_failure + ")" : std::string());
    return failures == 0 ? pass(d) : fail(d);
}

// ---- 9. lag diagnostic ---------------------------------------------------------------------

Verdict lag_diagnostic() {
    Missing missing;
    const auto paths = fixtures({"fao_food_price_index_monthly.csv", "grain_inventory_change_monthly.csv"}, missing);
    if (!missing.list.empty()) {
        return skip_missing(missing);
    }
    const auto inventory = load(paths[1], Frequency::monthly);
    const auto price = align(load(paths[0], Frequency::monthly), inventory).first;
    const auto trend = ethanol::quadratic_fit(price);
    std::vector<double> dev(price.size());
    for (std::size_t t = 0; t < dev.size(); ++t) {
        dev[t] = price[t] - trend.at(static_cast<double>(t));
    }
    const auto scan = lagged_cross_correlation(price.with_values(dev), inventory, 24);
    const auto peak = scan.peak();
    if (!peak) {
        return fail("every lag was omitted");
    }
    const std::string d = fmt("peak rho=%.3f at lag %d months", peak->rho, peak->lag);
    return peak->lag >= 9 && peak->lag <= 15 ? pass(d) : fail(d);
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "closed form matches iteration in every regime", 5.0, closed_form_oracle},
        {2, "oscillation period at (0.098, 1.29)", 0.0, period_formula},
        {3, "phase diagram structure", 2.0, phase_structure},
        {4, "combined fit recovers synthetic parameters", 60.0, fit_recovery},
        {5, "combined fit on FAO, equity and bond fixtures", 300.0, paper_parameters},
        {6, "ethanol and food price trends agree", 0.0, ethanol_trend},
        {7, "supply/demand fit on wheat fixtures", 0.0, wheat_fit},
        {8, "invariant suites", 5.0, invariants},
        {9, "price deviation leads inventory change by about a year", 0.0, lag_diagnostic},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v = fail(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (v.outcome == Outcome::pass && c.time_limit_s > 0.0 && secs > c.time_limit_s) {
            v = fail(v.detail + fmt("; exceeded %.0f s limit", c.time_limit_s));
        }
        const char* tag = v.outcome == Outcome::pass ? "PASS" : v.outcome == Outcome::fail ? "FAIL" : "SKIP";
        std::printf("[%s] %d. %s: %s (%.2f s)\n", tag, c.id, c.name, v.detail.c_str(), secs);
        failed += v.outcome == Outcome::fail ? 1 : 0;
    }
    return failed == 0 ? 0 : 1;
}
