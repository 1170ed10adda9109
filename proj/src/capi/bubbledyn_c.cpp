#include "bubbledyn/bubbledyn.h"

#include "bubbledyn/combined.hpp"
#include "bubbledyn/error.hpp"
#include "bubbledyn/ethanol.hpp"
#include "bubbledyn/fitting.hpp"
#include "bubbledyn/io.hpp"
#include "bubbledyn/speculator.hpp"
#include "bubbledyn/statistics.hpp"
#include "bubbledyn/supply_demand.hpp"

#include <algorithm>
#include <new>
#include <string>
#include <vector>

using namespace bubbledyn;

struct bd_series {
    TimeSeries series;
};

struct bd_grid {
    speculator::PhaseGrid grid;
};

struct bd_report {
    nlohmann::json doc;
    std::string csv;
    std::string scratch;
};

struct bd_text {
    std::string data;
};

namespace {

thread_local std::string g_last_error;

bd_status to_status(ErrorCode code) {
    switch (code) {
    case ErrorCode::invalid_argument: return BD_ERR_INVALID_ARGUMENT;
    case ErrorCode::domain: return BD_ERR_DOMAIN;
    case ErrorCode::degenerate: return BD_ERR_DEGENERATE;
    case ErrorCode::alignment: return BD_ERR_ALIGNMENT;
    case ErrorCode::io: return BD_ERR_IO;
    case ErrorCode::parse: return BD_ERR_PARSE;
    case ErrorCode::fit: return BD_ERR_FIT;
    }
    return BD_ERR_INTERNAL;
}

template <typename F>
bd_status guarded(F&& body) {
    try {
        body();
        g_last_error.clear();
        return BD_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return to_status(e.code());
    } catch (const nlohmann::json::exception& e) {
        g_last_error = e.what();
        return BD_ERR_INVALID_ARGUMENT;
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return BD_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return BD_ERR_INTERNAL;
    }
}

void require(const void* p, const char* what) {
    if (p == nullptr) {
        throw InvalidArgument(std::string(what) + " must not be NULL");
    }
}

Frequency to_frequency(bd_frequency f) {
    switch (f) {
    case BD_MONTHLY: return Frequency::monthly;
    case BD_ANNUAL: return Frequency::annual;
    }
    throw InvalidArgument("unknown frequency");
}

io::Format to_format(bd_format f) {
    switch (f) {
    case BD_FORMAT_CSV: return io::Format::csv;
    case BD_FORMAT_JSON: return io::Format::json;
    }
    throw InvalidArgument("unknown format");
}

YearMonth to_date(bd_date d) { return {d.year, d.month}; }

std::optional<Window> to_window(const bd_window* w) {
    if (w == nullptr) {
        return std::nullopt;
    }
    return Window{w->begin_index, w->end_index};
}

bd_series* wrap(TimeSeries s) { return new bd_series{std::move(s)}; }

bd_report* wrap(nlohmann::json doc, std::string csv) { return new bd_report{std::move(doc), std::move(csv), {}}; }

void fill(const speculator::RegimeClassification& c, bd_regime* out) {
    out->discriminant = c.discriminant;
    for (int i = 0; i < 2; ++i) {
        out->root_re[i] = c.roots[static_cast<std::size_t>(i)].real();
        out->root_im[i] = c.roots[static_cast<std::size_t>(i)].imag();
        out->root_abs[i] = std::abs(c.roots[static_cast<std::size_t>(i)]);
    }
    out->has_period = c.period.has_value() ? 1 : 0;
    out->theta = c.theta.value_or(0.0);
    out->period = c.period.value_or(0.0);
    out->label = static_cast<bd_regime_label>(c.label);
    out->convergent = speculator::is_convergent(c.label) ? 1 : 0;
}

speculator::SpeculatorParams to_params(const bd_speculator_params* p) {
    require(p, "params");
    return {p->k_sd, p->k_sp, p->k_c};
}

supply_demand::SupplyDemandParams to_params(const bd_sd_params* p) {
    require(p, "params");
    return {p->lambda, p->alpha_d, p->beta_d, p->alpha_s, p->beta_s};
}

std::vector<TimeSeries> collect(const bd_series* const* markets, std::size_t count) {
    if (count > 0) {
        require(markets, "markets");
    }
    std::vector<TimeSeries> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        require(markets[i], "market series");
        out.push_back(markets[i]->series);
    }
    return out;
}

TimeSeries series_from_json(const nlohmann::json& j) {
    const auto start = YearMonth::parse(j.at("start").get<std::string>());
    if (!start) {
        throw InvalidArgument("report series has an invalid start date");
    }
    const auto freq = j.at("frequency").get<std::string>() == "annual" ? Frequency::annual : Frequency::monthly;
    return TimeSeries(*start, freq, j.at("values").get<std::vector<double>>(), j.value("unit", std::string()));
}

const nlohmann::json& lookup(const bd_report* report, const char* pointer) {
    require(report, "report");
    require(pointer, "pointer");
    return report->doc.at(nlohmann::json::json_pointer(pointer));
}

}  // namespace

extern "C" {

const char* bd_last_error(void) { return g_last_error.c_str(); }

const char* bd_status_name(bd_status status) {
    switch (status) {
    case BD_OK: return "ok";
    case BD_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case BD_ERR_DOMAIN: return "domain";
    case BD_ERR_DEGENERATE: return "degenerate";
    case BD_ERR_ALIGNMENT: return "alignment";
    case BD_ERR_IO: return "io";
    case BD_ERR_PARSE: return "parse";
    case BD_ERR_FIT: return "fit";
    case BD_ERR_INTERNAL: return "internal";
    }
    return "unknown";
}

const char* bd_version(void) { return "0.1.0"; }

const char* bd_text_data(const bd_text* text) { return text != nullptr ? text->data.c_str() : ""; }

size_t bd_text_size(const bd_text* text) { return text != nullptr ? text->data.size() : 0; }

bd_status bd_text_save(const bd_text* text, const char* path) {
    return guarded([&] {
        require(text, "text");
        require(path, "path");
        io::emit(text->data, path);
    });
}

void bd_text_free(bd_text* text) { delete text; }

bd_status bd_series_create(bd_date start, bd_frequency frequency, const double* values, size_t count,
                           const char* unit, bd_series** out) {
    return guarded([&] {
        require(out, "out");
        if (count > 0) {
            require(values, "values");
        }
        *out = wrap(TimeSeries(to_date(start), to_frequency(frequency), std::vector<double>(values, values + count),
                               unit != nullptr ? unit : ""));
    });
}

bd_status bd_series_load(const bd_series_spec* spec, bd_series** out) {
    return guarded([&] {
        require(spec, "spec");
        require(spec->path, "spec->path");
        require(out, "out");
        io::SeriesSpec s;
        s.path = spec->path;
        if (spec->date_column != nullptr) {
            s.date_column = spec->date_column;
        }
        if (spec->value_column != nullptr) {
            s.value_column = spec->value_column;
        }
        s.frequency = to_frequency(spec->frequency);
        s.label = spec->label != nullptr ? spec->label : "";
        s.transform = spec->transform == BD_TRANSFORM_INVERSE ? io::Transform::inverse : io::Transform::none;
        *out = wrap(io::load_series(s));
    });
}

void bd_series_free(bd_series* series) { delete series; }

size_t bd_series_length(const bd_series* series) { return series != nullptr ? series->series.size() : 0; }

bd_date bd_series_start(const bd_series* series) {
    if (series == nullptr) {
        return {0, 0};
    }
    return {series->series.start().year, series->series.start().month};
}

bd_frequency bd_series_frequency(const bd_series* series) {
    return series != nullptr && series->series.frequency() == Frequency::annual ? BD_ANNUAL : BD_MONTHLY;
}

size_t bd_series_copy_values(const bd_series* series, double* out, size_t capacity) {
    if (series == nullptr || out == nullptr) {
        return 0;
    }
    const auto v = series->series.values();
    const std::size_t n = std::min(capacity, v.size());
    std::copy_n(v.begin(), n, out);
    return n;
}

bd_status bd_series_between(const bd_series* series, bd_date first, bd_date last, bd_series** out) {
    return guarded([&] {
        require(series, "series");
        require(out, "out");
        *out = wrap(series->series.between(to_date(first), to_date(last)));
    });
}

bd_status bd_series_window(const bd_series* series, bd_date first, bd_date last, bd_window* out) {
    return guarded([&] {
        require(series, "series");
        require(out, "out");
        const auto w = series->series.window_between(to_date(first), to_date(last));
        if (!w) {
            throw AlignmentError("calendar range " + to_date(first).iso() + ".." + to_date(last).iso() +
                                 " does not intersect the series");
        }
        *out = {w->begin_index, w->end_index};
    });
}

bd_status bd_series_render(const bd_series* series, bd_format format, bd_text** out) {
    return guarded([&] {
        require(series, "series");
        require(out, "out");
        *out = new bd_text{io::render(series->series, to_format(format))};
    });
}

bd_status bd_box_cox(double x, double lambda, double* out) {
    return guarded([&] {
        require(out, "out");
        *out = box_cox(x, lambda);
    });
}

bd_status bd_inverse_box_cox(double y, double lambda, double* out) {
    return guarded([&] {
        require(out, "out");
        *out = inverse_box_cox(y, lambda);
    });
}

bd_status bd_pearson(const bd_series* xs, const bd_series* ys, double* out) {
    return guarded([&] {
        require(xs, "xs");
        require(ys, "ys");
        require(out, "out");
        *out = pearson_correlation(xs->series, ys->series);
    });
}

bd_status bd_pearson_common(const bd_series* xs, const bd_series* ys, double* out) {
    return guarded([&] {
        require(xs, "xs");
        require(ys, "ys");
        require(out, "out");
        const auto aligned = align(xs->series, ys->series);
        *out = pearson_correlation(aligned.first, aligned.second);
    });
}

bd_status bd_normalize_unit_interval(const bd_series* series, const bd_window* exclude, bd_series** out) {
    return guarded([&] {
        require(series, "series");
        require(out, "out");
        *out = wrap(normalize_unit_interval(series->series, to_window(exclude)));
    });
}

bd_status bd_lagged_cross_correlation(const bd_series* xs, const bd_series* ys, int max_lag, bd_report** out) {
    return guarded([&] {
        require(xs, "xs");
        require(ys, "ys");
        require(out, "out");
        const LagScan scan = lagged_cross_correlation(xs->series, ys->series, max_lag);
        *out = wrap(io::to_json(scan), io::render(scan, io::Format::csv));
    });
}

bd_status bd_deflate(const bd_series* nominal, const bd_series* cpi, bd_series** out) {
    return guarded([&] {
        require(nominal, "nominal");
        require(cpi, "cpi");
        require(out, "out");
        *out = wrap(deflate(nominal->series, cpi->series));
    });
}

bd_status bd_derive_surplus(const bd_series* production, const bd_series* consumption, bd_series** out) {
    return guarded([&] {
        require(production, "production");
        require(consumption, "consumption");
        require(out, "out");
        *out = wrap(io::derive_surplus(production->series, consumption->series));
    });
}

bd_status bd_r_squared(const bd_series* observed, const bd_series* modeled, double* out) {
    return guarded([&] {
        require(observed, "observed");
        require(modeled, "modeled");
        require(out, "out");
        *out = fitting::r_squared(observed->series, modeled->series);
    });
}

bd_status bd_simulate_first_order(const bd_speculator_params* params, double p0, int steps, bd_date start,
                                  bd_series** out) {
    return guarded([&] {
        require(out, "out");
        *out = wrap(speculator::simulate_first_order(to_params(params), p0, steps, to_date(start)));
    });
}

bd_status bd_simulate_second_order(const bd_speculator_params* params, double p0, double p1, int steps,
                                   bd_date start, bd_series** out) {
    return guarded([&] {
        require(out, "out");
        *out = wrap(speculator::simulate_second_order(to_params(params), p0, p1, steps, to_date(start)));
    });
}

bd_status bd_closed_form_first_order(const bd_speculator_params* params, double p_init, int t, double* out) {
    return guarded([&] {
        require(out, "out");
        *out = speculator::closed_form_first_order(to_params(params), p_init, t);
    });
}

bd_status bd_closed_form_second_order(const bd_speculator_params* params, double p1_deviation, int t, double* out) {
    return guarded([&] {
        require(out, "out");
        *out = speculator::closed_form_second_order(to_params(params), p1_deviation, t);
    });
}

bd_status bd_classify(double k_sd, double k_sp, bd_regime* out) {
    return guarded([&] {
        require(out, "out");
        fill(speculator::classify(k_sd, k_sp), out);
    });
}

const char* bd_regime_label_name(bd_regime_label label) {
    return speculator::to_string(static_cast<speculator::Regime>(label)).data();
}

bd_status bd_phase_grid(bd_axis k_sd_axis, bd_axis k_sp_axis, bd_grid** out) {
    return guarded([&] {
        require(out, "out");
        *out = new bd_grid{speculator::phase_grid({k_sd_axis.lo, k_sd_axis.hi, k_sd_axis.n},
                                                  {k_sp_axis.lo, k_sp_axis.hi, k_sp_axis.n})};
    });
}

void bd_grid_free(bd_grid* grid) { delete grid; }

size_t bd_grid_size(const bd_grid* grid) { return grid != nullptr ? grid->grid.nodes.size() : 0; }

bd_status bd_grid_node(const bd_grid* grid, size_t index, double* k_sd, double* k_sp, bd_regime* regime) {
    return guarded([&] {
        require(grid, "grid");
        if (index >= grid->grid.nodes.size()) {
            throw InvalidArgument("grid node index out of range");
        }
        const auto& node = grid->grid.nodes[index];
        if (k_sd != nullptr) {
            *k_sd = node.k_sd;
        }
        if (k_sp != nullptr) {
            *k_sp = node.k_sp;
        }
        if (regime != nullptr) {
            fill(node, regime);
        }
    });
}

bd_status bd_grid_render(const bd_grid* grid, bd_format format, bd_text** out) {
    return guarded([&] {
        require(grid, "grid");
        require(out, "out");
        *out = new bd_text{io::render(grid->grid, to_format(format))};
    });
}

bd_status bd_sd_equilibrium(const bd_sd_params* params, double* price, double* quantity) {
    return guarded([&] {
        const auto eq = supply_demand::equilibrium(to_params(params));
        if (price != nullptr) {
            *price = eq.price;
        }
        if (quantity != nullptr) {
            *quantity = eq.quantity;
        }
    });
}

bd_status bd_simulate_equilibrium_path(const bd_series* surplus, const bd_sd_params* params, bd_report** out) {
    return guarded([&] {
        require(surplus, "surplus");
        require(out, "out");
        const auto path = supply_demand::simulate_equilibrium_path(surplus->series, to_params(params));
        *out = wrap(io::to_json(path), io::render(path, io::Format::csv));
    });
}

bd_status bd_fit_supply_demand(const bd_series* price, const bd_series* consumption, const bd_series* surplus,
                               size_t seed, bd_report** out) {
    return guarded([&] {
        require(price, "price");
        require(consumption, "consumption");
        require(surplus, "surplus");
        require(out, "out");
        supply_demand::FitOptions options;
        options.seed = seed;
        const auto fit = supply_demand::fit_supply_demand(price->series, consumption->series, surplus->series, options);
        const auto observed = align(price->series, fit.path.prices).first;
        const auto consumed = align(consumption->series, fit.path.quantities).first;
        const std::pair<std::string, const TimeSeries*> cols[] = {{"price", &observed},
                                                                  {"model_price", &fit.path.prices},
                                                                  {"consumption", &consumed},
                                                                  {"model_consumption", &fit.path.quantities}};
        *out = wrap(io::to_json(fit), io::render_table_csv(cols));
    });
}

bd_status bd_quadratic_fit(const bd_series* series, const bd_window* exclude, bd_quadratic* out) {
    return guarded([&] {
        require(series, "series");
        require(out, "out");
        const auto trend = ethanol::quadratic_fit(series->series, to_window(exclude));
        *out = {trend.a, trend.b, trend.r_squared};
    });
}

bd_status bd_implied_food_price(const bd_series* q_x, const bd_ethanol_link* link, bd_series** out) {
    return guarded([&] {
        require(q_x, "q_x");
        require(link, "link");
        require(out, "out");
        *out = wrap(ethanol::implied_food_price(q_x->series, {link->beta_sum, link->alpha_d, link->q_total}));
    });
}

bd_status bd_trend_comparison(const bd_series* a, const bd_series* b, const bd_window* exclude_b, bd_report** out) {
    return guarded([&] {
        require(a, "a");
        require(b, "b");
        require(out, "out");
        const auto cmp = ethanol::trend_comparison(a->series, b->series, to_window(exclude_b));
        std::vector<double> ta(cmp.normalized_a.size());
        std::vector<double> tb(cmp.normalized_b.size());
        for (std::size_t i = 0; i < ta.size(); ++i) {
            ta[i] = cmp.trend_a.at(static_cast<double>(i));
            tb[i] = cmp.trend_b.at(static_cast<double>(i));
        }
        const TimeSeries fit_a = cmp.normalized_a.with_values(std::move(ta));
        const TimeSeries fit_b = cmp.normalized_b.with_values(std::move(tb));
        const std::pair<std::string, const TimeSeries*> cols[] = {
            {"normalized_a", &cmp.normalized_a}, {"trend_a", &fit_a}, {"normalized_b", &cmp.normalized_b},
            {"trend_b", &fit_b}};
        *out = wrap(io::to_json(cmp), io::render_table_csv(cols));
    });
}

double bd_kc_of_t(double trend_a, double trend_b, double k_sd, int t) {
    return combined::kc_of_t(trend_a, trend_b, k_sd, t);
}

bd_status bd_simulate_combined(const bd_combined_params* params, const bd_series* const* markets,
                               size_t market_count, double p0, double p1, int steps, bd_series** out) {
    return guarded([&] {
        require(params, "params");
        require(out, "out");
        if (params->coupling_count > 0) {
            require(params->couplings, "params->couplings");
        }
        combined::CombinedParams p;
        p.k_sd = params->k_sd;
        p.k_sp = params->k_sp;
        p.couplings.assign(params->couplings, params->couplings + params->coupling_count);
        p.trend_a = params->trend_a;
        p.trend_b = params->trend_b;
        p.switch_index = params->switch_index;
        const auto series = collect(markets, market_count);
        const YearMonth start = series.empty() ? YearMonth{2000, 1} : series.front().start();
        *out = wrap(combined::simulate_combined(p, series, p0, p1, steps, start));
    });
}

bd_status bd_fit_combined(const bd_series* food, const bd_series* const* markets, size_t market_count,
                          const bd_combined_fit_options* options, bd_report** out) {
    return guarded([&] {
        require(food, "food");
        require(options, "options");
        require(out, "out");
        if (options->switch_candidate_count > 0) {
            require(options->switch_candidates, "options->switch_candidates");
        }
        if (options->trend_exclude_count > 0) {
            require(options->trend_excludes, "options->trend_excludes");
        }
        std::vector<Window> excludes;
        for (std::size_t i = 0; i < options->trend_exclude_count; ++i) {
            excludes.push_back({options->trend_excludes[i].begin_index, options->trend_excludes[i].end_index});
        }
        const auto trend = ethanol::quadratic_fit(food->series, excludes);
        const std::vector<int> candidates(options->switch_candidates,
                                          options->switch_candidates + options->switch_candidate_count);
        combined::CombinedFitOptions fit_options;
        fit_options.seed = options->seed;
        const auto series = collect(markets, market_count);
        const auto fit = combined::fit_combined(food->series, series, trend, candidates, fit_options);
        nlohmann::json doc = io::to_json(fit);
        doc["trend"] = io::to_json(trend);
        doc["observed"] = io::to_json(food->series);
        const std::pair<std::string, const TimeSeries*> cols[] = {{"observed", &food->series}, {"model", &fit.path}};
        *out = wrap(std::move(doc), io::render_table_csv(cols));
    });
}

bd_status bd_report_number(const bd_report* report, const char* pointer, double* out) {
    return guarded([&] {
        require(out, "out");
        const auto& v = lookup(report, pointer);
        if (!v.is_number()) {
            throw InvalidArgument(std::string("report entry ") + pointer + " is not a number");
        }
        *out = v.get<double>();
    });
}

bd_status bd_report_string(const bd_report* report, const char* pointer, const char** out) {
    return guarded([&] {
        require(out, "out");
        const auto& v = lookup(report, pointer);
        if (!v.is_string()) {
            throw InvalidArgument(std::string("report entry ") + pointer + " is not a string");
        }
        const_cast<bd_report*>(report)->scratch = v.get<std::string>();
        *out = report->scratch.c_str();
    });
}

bd_status bd_report_series(const bd_report* report, const char* pointer, bd_series** out) {
    return guarded([&] {
        require(out, "out");
        *out = wrap(series_from_json(lookup(report, pointer)));
    });
}

bd_status bd_report_render(const bd_report* report, bd_format format, bd_text** out) {
    return guarded([&] {
        require(report, "report");
        require(out, "out");
        *out = new bd_text{to_format(format) == io::Format::json ? io::render_json(report->doc) : report->csv};
    });
}

void bd_report_free(bd_report* report) { delete report; }

}  // extern "C"
