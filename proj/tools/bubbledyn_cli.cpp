// bubbledyn command-line front end. Talks to the engine only through the C API.

#include "bubbledyn/bubbledyn.h"

#include "CLI11.hpp"
#include "json.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitFit = 4;
constexpr int kExitInternal = 1;

struct Failure {
    bd_status status;
    std::string message;
};

[[noreturn]] void usage(const std::string& message) { throw Failure{BD_ERR_INVALID_ARGUMENT, message}; }

void check(bd_status status) {
    if (status != BD_OK) {
        throw Failure{status, bd_last_error()};
    }
}

int exit_code(bd_status status) {
    switch (status) {
    case BD_OK: return 0;
    case BD_ERR_INVALID_ARGUMENT: return kExitUsage;
    case BD_ERR_FIT: return kExitFit;
    case BD_ERR_INTERNAL: return kExitInternal;
    default: return kExitData;
    }
}

struct SeriesDeleter {
    void operator()(bd_series* s) const { bd_series_free(s); }
};
struct ReportDeleter {
    void operator()(bd_report* r) const { bd_report_free(r); }
};
struct TextDeleter {
    void operator()(bd_text* t) const { bd_text_free(t); }
};
struct GridDeleter {
    void operator()(bd_grid* g) const { bd_grid_free(g); }
};
using Series = std::unique_ptr<bd_series, SeriesDeleter>;
using Report = std::unique_ptr<bd_report, ReportDeleter>;
using Text = std::unique_ptr<bd_text, TextDeleter>;
using Grid = std::unique_ptr<bd_grid, GridDeleter>;

template <typename T>
T parse_number(std::string_view text, const std::string& what) {
    T value{};
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || end != text.data() + text.size()) {
        usage("invalid " + what + ": '" + std::string(text) + "'");
    }
    return value;
}

bd_date parse_date(std::string_view text, const std::string& what) {
    bd_date d{0, 1};
    if (text.size() == 4) {
        d.year = parse_number<int>(text, what);
    } else if (text.size() == 7 && text[4] == '-') {
        d.year = parse_number<int>(text.substr(0, 4), what);
        d.month = parse_number<int>(text.substr(5), what);
    } else {
        usage("invalid " + what + ": '" + std::string(text) + "' (expected YYYY or YYYY-MM)");
    }
    if (d.month < 1 || d.month > 12) {
        usage("invalid " + what + ": month out of range in '" + std::string(text) + "'");
    }
    return d;
}

bd_axis parse_range(const std::string& text, const std::string& what) {
    const auto first = text.find(':');
    const auto second = first == std::string::npos ? first : text.find(':', first + 1);
    if (second == std::string::npos) {
        usage("invalid " + what + " range '" + text + "' (expected lo:hi:n)");
    }
    const std::string_view view(text);
    return {parse_number<double>(view.substr(0, first), what),
            parse_number<double>(view.substr(first + 1, second - first - 1), what),
            parse_number<int>(view.substr(second + 1), what)};
}

struct CalendarRange {
    bd_date first;
    std::optional<bd_date> last;  // open-ended when absent
};

CalendarRange parse_calendar_range(const std::string& text, const std::string& what) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        const bd_date d = parse_date(text, what);
        return {d, d};
    }
    CalendarRange r{parse_date(std::string_view(text).substr(0, colon), what), std::nullopt};
    if (colon + 1 < text.size()) {
        r.last = parse_date(std::string_view(text).substr(colon + 1), what);
    }
    return r;
}

fs::path resolve(const std::string& path) {
    const fs::path p(path);
    if (p.is_relative() && !fs::exists(p)) {
        if (const char* root = std::getenv("BUBBLEDYN_DATA_DIR"); root != nullptr && *root != '\0') {
            return fs::path(root) / p;
        }
    }
    return p;
}

// Input syntax: path[@value_column][:inverse]
Series load(const std::string& text, bd_frequency frequency) {
    std::string path = text;
    bd_transform transform = BD_TRANSFORM_NONE;
    constexpr std::string_view suffix = ":inverse";
    if (path.size() > suffix.size() && path.ends_with(suffix)) {
        transform = BD_TRANSFORM_INVERSE;
        path.resize(path.size() - suffix.size());
    }
    std::string column;
    if (const auto at = path.rfind('@'); at != std::string::npos) {
        column = path.substr(at + 1);
        path.resize(at);
    }
    const std::string resolved = resolve(path).string();
    const bd_series_spec spec{resolved.c_str(), nullptr, column.empty() ? nullptr : column.c_str(), frequency,
                              nullptr, transform};
    bd_series* out = nullptr;
    check(bd_series_load(&spec, &out));
    return Series(out);
}

Series clip(const Series& s, bd_date first, bd_date last) {
    bd_series* out = nullptr;
    check(bd_series_between(s.get(), first, last, &out));
    return Series(out);
}

bd_date end_date(const bd_series* s) {
    const bd_date start = bd_series_start(s);
    const int n = static_cast<int>(bd_series_length(s)) - 1;
    if (bd_series_frequency(s) == BD_ANNUAL) {
        return {start.year + n, 1};
    }
    const int months = start.year * 12 + (start.month - 1) + n;
    return {months / 12, months % 12 + 1};
}

std::optional<bd_window> window_of(const bd_series* s, const CalendarRange& r) {
    bd_window w{};
    if (bd_series_window(s, r.first, r.last.value_or(end_date(s)), &w) != BD_OK) {
        return std::nullopt;
    }
    return w;
}

bd_frequency to_frequency(const std::string& name) { return name == "annual" ? BD_ANNUAL : BD_MONTHLY; }

struct Output {
    std::string path;
    std::string format;
    std::string plot_script;

    bd_format resolve(bd_format fallback) const {
        if (!format.empty()) {
            return format == "json" ? BD_FORMAT_JSON : BD_FORMAT_CSV;
        }
        const auto ext = fs::path(path).extension();
        if (ext == ".json") {
            return BD_FORMAT_JSON;
        }
        if (ext == ".csv") {
            return BD_FORMAT_CSV;
        }
        return fallback;
    }

    void write(std::string_view content) const {
        if (path.empty()) {
            std::fwrite(content.data(), 1, content.size(), stdout);
            std::fflush(stdout);
            return;
        }
        FILE* f = std::fopen(path.c_str(), "wb");
        const bool ok = f != nullptr && std::fwrite(content.data(), 1, content.size(), f) == content.size();
        if (f == nullptr || std::fclose(f) != 0 || !ok) {
            throw Failure{BD_ERR_IO, "cannot write output file '" + path + "'"};
        }
    }

    void write(const Text& text) const {
        if (path.empty()) {
            write(std::string_view(bd_text_data(text.get()), bd_text_size(text.get())));
            return;
        }
        check(bd_text_save(text.get(), path.c_str()));
    }
};

const char* const kLinePlot = R"(import csv
import sys

import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else "{data}"
with open(path, newline="") as f:
    rows = list(csv.DictReader(f))
x_name = next(iter(rows[0]))
x = [r[x_name] for r in rows]
for name in rows[0]:
    if name == x_name:
        continue
    try:
        y = [float(r[name]) if r[name] else float("nan") for r in rows]
    except ValueError:
        continue
    plt.plot(range(len(x)), y, label=name)
step = max(1, len(x) // 10)
plt.xticks(range(0, len(x), step), x[::step], rotation=45)
plt.xlabel(x_name)
plt.legend()
plt.tight_layout()
plt.show()
)";

const char* const kPhasePlot = R"(import csv
import sys

import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else "{data}"
groups = {}
with open(path, newline="") as f:
    for r in csv.DictReader(f):
        groups.setdefault(r["label"], ([], []))
        groups[r["label"]][0].append(float(r["k_sd"]))
        groups[r["label"]][1].append(float(r["k_sp"]))
for label, (ksd, ksp) in sorted(groups.items()):
    plt.scatter(ksd, ksp, s=2, label=label)
plt.xlabel("k_sd")
plt.ylabel("k_sp")
plt.legend(markerscale=5)
plt.tight_layout()
plt.show()
)";

void write_plot_script(const Output& out, const char* templ) {
    if (out.plot_script.empty()) {
        return;
    }
    std::string script(templ);
    const std::string data = out.path.empty() ? "data.csv" : out.path;
    script.replace(script.find("{data}"), 6, data);
    Output{out.plot_script, {}, {}}.write(script);
}

void emit_report(const Report& report, const Output& out, bd_format fallback) {
    bd_text* text = nullptr;
    check(bd_report_render(report.get(), out.resolve(fallback), &text));
    out.write(Text(text));
    write_plot_script(out, kLinePlot);
}

void emit_series(const Series& s, const Output& out) {
    bd_text* text = nullptr;
    check(bd_series_render(s.get(), out.resolve(BD_FORMAT_CSV), &text));
    out.write(Text(text));
    write_plot_script(out, kLinePlot);
}

// Option holders, one per subcommand.

struct SimulateSd {
    std::string surplus, production, consumption;
    double lambda = 1.0, alpha_d = 0.0, beta_d = 0.0, alpha_s = 0.0, beta_s = 0.0;
};

struct SimulateSpec {
    double k_sd = 0.0, k_sp = 0.0, k_c = 0.0, p0 = 0.0;
    std::optional<double> p1;
    int steps = 0;
    std::string start = "2000-01";
};

struct Phase {
    std::string k_sd = "0:5:200";
    std::string k_sp = "0:2:200";
};

struct FitSd {
    std::string price, consumption, surplus, production;
    std::size_t seed = 0;
};

struct FitEthanol {
    std::string ethanol, food;
    std::string from = "1999", to = "2010";
    std::string exclude = "2007:2008";
};

struct FitCombined {
    std::string food;
    std::vector<std::string> markets;
    std::string from = "2004-01", to = "2011-04";
    int switch_year = 2007;
    std::vector<std::string> switch_dates;
    std::vector<std::string> trend_excludes{"2007-01:2008-12", "2010-06:"};
    std::size_t seed = 0;
};

struct Pair {
    std::string x, y;
    std::string frequency = "monthly";
    std::string from, to;
};

struct LagScanOpts {
    Pair pair;
    int max_lag = 24;
    bool detrend_x = false;
};

void add_output(CLI::App* sub, Output& out) {
    sub->add_option("-o,--output", out.path, "Output file (stdout when omitted)");
    sub->add_option("--format", out.format, "Output format; inferred from the output extension when omitted")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--plot-script", out.plot_script, "Also write a matplotlib script that plots the output");
}

Series surplus_series(const std::string& surplus, const std::string& production, const Series* consumption) {
    if (!surplus.empty()) {
        return load(surplus, BD_ANNUAL);
    }
    if (production.empty() || consumption == nullptr) {
        usage("either --surplus or both --production and --consumption are required");
    }
    const Series prod = load(production, BD_ANNUAL);
    bd_series* out = nullptr;
    check(bd_derive_surplus(prod.get(), consumption->get(), &out));
    return Series(out);
}

void run_simulate_sd(const SimulateSd& o, const Output& out) {
    Series consumption;
    if (o.surplus.empty() && !o.consumption.empty()) {
        consumption = load(o.consumption, BD_ANNUAL);
    }
    const Series surplus = surplus_series(o.surplus, o.production, consumption ? &consumption : nullptr);
    const bd_sd_params params{o.lambda, o.alpha_d, o.beta_d, o.alpha_s, o.beta_s};
    bd_report* report = nullptr;
    check(bd_simulate_equilibrium_path(surplus.get(), &params, &report));
    emit_report(Report(report), out, BD_FORMAT_CSV);
}

void run_simulate_spec(const SimulateSpec& o, const Output& out) {
    const bd_speculator_params params{o.k_sd, o.k_sp, o.k_c};
    const bd_date start = parse_date(o.start, "--start");
    bd_series* s = nullptr;
    if (o.k_sp == 0.0 && !o.p1) {
        check(bd_simulate_first_order(&params, o.p0, o.steps, start, &s));
    } else {
        // Without an explicit P(1), take one Walrasian step from P(0).
        const double p1 = o.p1.value_or(o.k_c + (1.0 - o.k_sd) * o.p0);
        check(bd_simulate_second_order(&params, o.p0, p1, o.steps, start, &s));
    }
    emit_series(Series(s), out);
}

void run_phase(const Phase& o, const Output& out) {
    bd_grid* g = nullptr;
    check(bd_phase_grid(parse_range(o.k_sd, "--ksd"), parse_range(o.k_sp, "--ksp"), &g));
    const Grid grid(g);
    bd_text* text = nullptr;
    check(bd_grid_render(grid.get(), out.resolve(BD_FORMAT_CSV), &text));
    out.write(Text(text));
    write_plot_script(out, kPhasePlot);
}

void run_fit_sd(const FitSd& o, const Output& out) {
    const Series price = load(o.price, BD_ANNUAL);
    const Series consumption = load(o.consumption, BD_ANNUAL);
    const Series surplus = surplus_series(o.surplus, o.production, &consumption);
    bd_report* report = nullptr;
    check(bd_fit_supply_demand(price.get(), consumption.get(), surplus.get(), o.seed, &report));
    emit_report(Report(report), out, BD_FORMAT_JSON);
}

void run_fit_ethanol(const FitEthanol& o, const Output& out) {
    const bd_date first = parse_date(o.from, "--from");
    const bd_date last = parse_date(o.to, "--to");
    const Series ethanol = clip(load(o.ethanol, BD_ANNUAL), first, last);
    const Series food = clip(load(o.food, BD_ANNUAL), first, last);
    std::optional<bd_window> exclude;
    if (o.exclude != "none") {
        exclude = window_of(food.get(), parse_calendar_range(o.exclude, "--exclude"));
        if (!exclude) {
            usage("--exclude " + o.exclude + " lies outside the food series");
        }
    }
    bd_report* report = nullptr;
    check(bd_trend_comparison(ethanol.get(), food.get(), exclude ? &*exclude : nullptr, &report));
    emit_report(Report(report), out, BD_FORMAT_JSON);
}

void run_fit_combined(const FitCombined& o, const Output& out) {
    const Series food = clip(load(o.food, BD_MONTHLY), parse_date(o.from, "--from"), parse_date(o.to, "--to"));
    std::vector<Series> markets;
    std::vector<const bd_series*> handles;
    for (const auto& m : o.markets) {
        markets.push_back(load(m, BD_MONTHLY));
        handles.push_back(markets.back().get());
    }

    std::vector<int> candidates;
    if (!o.switch_dates.empty()) {
        for (const auto& text : o.switch_dates) {
            const auto w = window_of(food.get(), parse_calendar_range(text, "--switch"));
            if (!w) {
                usage("--switch " + text + " lies outside the food series");
            }
            for (std::size_t i = w->begin_index; i < w->end_index; ++i) {
                candidates.push_back(static_cast<int>(i));
            }
        }
    } else if (const auto w = window_of(food.get(), {{o.switch_year, 1}, bd_date{o.switch_year, 12}})) {
        for (std::size_t i = w->begin_index; i < w->end_index; ++i) {
            candidates.push_back(static_cast<int>(i));
        }
    }
    if (candidates.empty()) {
        usage("no switch candidates fall inside the food series");
    }

    std::vector<bd_window> excludes;
    for (const auto& text : o.trend_excludes) {
        if (text == "none") {
            continue;
        }
        if (const auto w = window_of(food.get(), parse_calendar_range(text, "--trend-exclude"))) {
            excludes.push_back(*w);
        }
    }

    const bd_combined_fit_options options{candidates.data(), candidates.size(), excludes.data(), excludes.size(),
                                          o.seed};
    bd_report* report = nullptr;
    check(bd_fit_combined(food.get(), handles.data(), handles.size(), &options, &report));
    emit_report(Report(report), out, BD_FORMAT_JSON);
}

std::pair<Series, Series> load_pair(const Pair& o) {
    const bd_frequency f = to_frequency(o.frequency);
    Series x = load(o.x, f);
    Series y = load(o.y, f);
    if (!o.from.empty() || !o.to.empty()) {
        const bd_date first = o.from.empty() ? bd_date{0, 1} : parse_date(o.from, "--from");
        const bd_date last = o.to.empty() ? bd_date{9999, 12} : parse_date(o.to, "--to");
        const auto within = [&](const Series& s) {
            const bd_date a = bd_series_start(s.get());
            const bd_date b = end_date(s.get());
            const auto key = [](bd_date d) { return d.year * 12 + d.month; };
            return clip(s, key(first) > key(a) ? first : a, key(last) < key(b) ? last : b);
        };
        x = within(x);
        y = within(y);
    }
    return {std::move(x), std::move(y)};
}

void run_correlate(const Pair& o, const Output& out) {
    const auto [x, y] = load_pair(o);
    double rho = 0.0;
    check(bd_pearson_common(x.get(), y.get(), &rho));
    if (out.resolve(BD_FORMAT_JSON) == BD_FORMAT_JSON) {
        out.write(json{{"rho", rho}}.dump(2) + "\n");
    } else {
        out.write("rho\n" + json(rho).dump() + "\n");
    }
}

Series detrended(const Series& s) {
    bd_quadratic q{};
    check(bd_quadratic_fit(s.get(), nullptr, &q));
    const std::size_t n = bd_series_length(s.get());
    std::vector<double> v(n);
    bd_series_copy_values(s.get(), v.data(), n);
    for (std::size_t t = 0; t < n; ++t) {
        const double td = static_cast<double>(t);
        v[t] -= q.a + q.b * td * td;
    }
    bd_series* out = nullptr;
    check(bd_series_create(bd_series_start(s.get()), bd_series_frequency(s.get()), v.data(), n, nullptr, &out));
    return Series(out);
}

void run_lagscan(const LagScanOpts& o, const Output& out) {
    auto [x, y] = load_pair(o.pair);
    if (o.detrend_x) {
        x = detrended(x);
    }
    bd_report* report = nullptr;
    check(bd_lagged_cross_correlation(x.get(), y.get(), o.max_lag, &report));
    emit_report(Report(report), out, BD_FORMAT_CSV);
}

void print_schema(const CLI::App& app) {
    json doc = json::object();
    for (const CLI::App* sub : app.get_subcommands([](const CLI::App* s) { return s->get_name() != "schema"; })) {
        json flags = json::array();
        for (const CLI::Option* opt : sub->get_options()) {
            flags.push_back(opt->get_name());
        }
        doc[sub->get_name()] = flags;
    }
    std::cout << doc.dump(2) << "\n";
}

void report_failure(const Failure& f) {
    const json doc{{"error", {{"status", bd_status_name(f.status)}, {"exit_code", exit_code(f.status)},
                              {"message", f.message}}}};
    std::cerr << doc.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Commodity price dynamics: simulation, phase diagrams and model fits", "bubbledyn"};
    app.require_subcommand(1);
    app.set_version_flag("--version", bd_version());

    Output out;

    SimulateSd sd;
    auto* sim_sd = app.add_subcommand("simulate-sd", "Equilibrium path of the shocked supply/demand model");
    sim_sd->add_option("--surplus", sd.surplus, "Annual surplus series");
    sim_sd->add_option("--production", sd.production, "Annual production (with --consumption, instead of --surplus)");
    sim_sd->add_option("--consumption", sd.consumption, "Annual consumption");
    sim_sd->add_option("--lambda", sd.lambda, "Box-Cox exponent")->required();
    sim_sd->add_option("--alpha-d", sd.alpha_d, "Initial demand intercept")->required();
    sim_sd->add_option("--beta-d", sd.beta_d, "Demand slope")->required();
    sim_sd->add_option("--alpha-s", sd.alpha_s, "Initial supply intercept")->required();
    sim_sd->add_option("--beta-s", sd.beta_s, "Supply slope")->required();
    add_output(sim_sd, out);

    SimulateSpec spec;
    auto* sim_spec = app.add_subcommand("simulate-spec", "Iterate the speculator price recurrence");
    sim_spec->add_option("--ksd", spec.k_sd, "Supply/demand response k_sd")->required();
    sim_spec->add_option("--ksp", spec.k_sp, "Trend-following strength k_sp")->capture_default_str();
    sim_spec->add_option("--kc", spec.k_c, "Constant term k_c")->required();
    sim_spec->add_option("--p0", spec.p0, "Initial price P(0)")->required();
    sim_spec->add_option("--p1", spec.p1, "Second price P(1); defaults to one Walrasian step from P(0)");
    sim_spec->add_option("--steps", spec.steps, "Number of steps")->required();
    sim_spec->add_option("--start", spec.start, "Calendar month of P(0)")->capture_default_str();
    add_output(sim_spec, out);

    Phase phase;
    auto* ph = app.add_subcommand("phase", "Regime classification over a (k_sd, k_sp) grid");
    ph->add_option("--ksd", phase.k_sd, "k_sd axis as lo:hi:n")->capture_default_str();
    ph->add_option("--ksp", phase.k_sp, "k_sp axis as lo:hi:n")->capture_default_str();
    add_output(ph, out);

    FitSd fsd;
    auto* fit_sd = app.add_subcommand("fit-sd", "Fit the supply/demand model to annual price and consumption");
    fit_sd->add_option("--price", fsd.price, "Annual price series")->required();
    fit_sd->add_option("--consumption", fsd.consumption, "Annual consumption series")->required();
    fit_sd->add_option("--surplus", fsd.surplus, "Annual surplus series");
    fit_sd->add_option("--production", fsd.production, "Annual production (surplus = production - consumption)");
    fit_sd->add_option("--seed", fsd.seed, "Offset into the deterministic start sequence")->capture_default_str();
    add_output(fit_sd, out);

    FitEthanol feth;
    auto* fit_eth = app.add_subcommand("fit-ethanol", "Compare quadratic trends of ethanol use and food prices");
    fit_eth->add_option("--ethanol", feth.ethanol, "Annual corn-to-ethanol series")->required();
    fit_eth->add_option("--food", feth.food, "Annual food price index")->required();
    fit_eth->add_option("--from", feth.from, "First year")->capture_default_str();
    fit_eth->add_option("--to", feth.to, "Last year")->capture_default_str();
    fit_eth->add_option("--exclude", feth.exclude, "Food years left out of the fit, FROM[:TO], or none")
        ->capture_default_str();
    add_output(fit_eth, out);

    FitCombined fc;
    auto* fit_comb = app.add_subcommand("fit-combined", "Fit the full speculator model to the monthly food index");
    fit_comb->add_option("--food", fc.food, "Monthly food price index")->required();
    fit_comb->add_option("--market", fc.markets, "Alternative market series (repeatable; suffix :inverse inverts)");
    fit_comb->add_option("--from", fc.from, "First month of the fit")->capture_default_str();
    fit_comb->add_option("--to", fc.to, "Last month of the fit")->capture_default_str();
    fit_comb->add_option("--switch-year", fc.switch_year, "Year whose months are tried as the switch date")
        ->capture_default_str();
    fit_comb->add_option("--switch", fc.switch_dates, "Explicit switch dates or FROM:TO ranges (repeatable)");
    fit_comb->add_option("--trend-exclude", fc.trend_excludes,
                         "Months left out of the trend refit, FROM:[TO] (repeatable), or none")
        ->capture_default_str();
    fit_comb->add_option("--seed", fc.seed, "Offset into the deterministic start sequence")->capture_default_str();
    add_output(fit_comb, out);

    Pair corr;
    auto* correlate = app.add_subcommand("correlate", "Pearson correlation over the common span");
    correlate->add_option("--x", corr.x, "First series")->required();
    correlate->add_option("--y", corr.y, "Second series")->required();
    correlate->add_option("--frequency", corr.frequency, "Frequency of both inputs")
        ->check(CLI::IsMember({"monthly", "annual"}))
        ->capture_default_str();
    correlate->add_option("--from", corr.from, "First date");
    correlate->add_option("--to", corr.to, "Last date");
    add_output(correlate, out);

    LagScanOpts lag;
    auto* lagscan = app.add_subcommand("lagscan", "Correlation of x(t) against y(t + lag)");
    lagscan->add_option("--x", lag.pair.x, "Leading series")->required();
    lagscan->add_option("--y", lag.pair.y, "Lagging series")->required();
    lagscan->add_option("--frequency", lag.pair.frequency, "Frequency of both inputs")
        ->check(CLI::IsMember({"monthly", "annual"}))
        ->capture_default_str();
    lagscan->add_option("--from", lag.pair.from, "First date");
    lagscan->add_option("--to", lag.pair.to, "Last date");
    lagscan->add_option("--max-lag", lag.max_lag, "Largest lag")->capture_default_str();
    lagscan->add_flag("--detrend-x", lag.detrend_x, "Subtract a quadratic trend from x first");
    add_output(lagscan, out);

    auto* schema = app.add_subcommand("schema", "Print every subcommand's flags as JSON");
    schema->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*schema) {
            print_schema(app);
        } else if (*sim_sd) {
            run_simulate_sd(sd, out);
        } else if (*sim_spec) {
            run_simulate_spec(spec, out);
        } else if (*ph) {
            run_phase(phase, out);
        } else if (*fit_sd) {
            run_fit_sd(fsd, out);
        } else if (*fit_eth) {
            run_fit_ethanol(feth, out);
        } else if (*fit_comb) {
            run_fit_combined(fc, out);
        } else if (*correlate) {
            run_correlate(corr, out);
        } else if (*lagscan) {
            run_lagscan(lag, out);
        }
    } catch (const Failure& f) {
        report_failure(f);
        return exit_code(f.status);
    } catch (const std::exception& e) {
        report_failure({BD_ERR_INTERNAL, e.what()});
        return kExitInternal;
    }
    return 0;
}
