#include "bubbledyn/io.hpp"

#include "bubbledyn/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace bubbledyn::io {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '"' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t comma = line.find(',', pos);
        out.push_back(trim(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos)));
        if (comma == std::string_view::npos) {
            break;
        }
        pos = comma + 1;
    }
    return out;
}

std::string row_label(std::string_view source, std::size_t line) {
    return std::string(source) + ":" + std::to_string(line);
}

nlohmann::json optional_number(const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

std::optional<Format> format_from_string(std::string_view name) noexcept {
    if (name == "csv") {
        return Format::csv;
    }
    if (name == "json") {
        return Format::json;
    }
    return std::nullopt;
}

TimeSeries parse_series_csv(std::string_view text, const SeriesSpec& spec, std::string_view source) {
    std::vector<std::string_view> lines;
    for (std::size_t pos = 0; pos <= text.size();) {
        const std::size_t nl = text.find('\n', pos);
        lines.push_back(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
        if (nl == std::string_view::npos) {
            break;
        }
        pos = nl + 1;
    }

    std::size_t header_line = 0;
    while (header_line < lines.size() && trim(lines[header_line]).empty()) {
        ++header_line;
    }
    if (header_line == lines.size()) {
        throw ParseError(std::string(source) + ": empty file");
    }
    const auto header = split_fields(lines[header_line]);
    const auto find_column = [&](const std::string& name) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) {
            throw ParseError(std::string(source) + ": missing column '" + name + "'");
        }
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t date_col = find_column(spec.date_column);
    const std::size_t value_col = find_column(spec.value_column);

    std::optional<YearMonth> start;
    long previous = 0;
    std::vector<double> values;
    for (std::size_t i = header_line + 1; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) {
            continue;
        }
        const std::size_t line_no = i + 1;
        const auto fields = split_fields(lines[i]);
        if (fields.size() <= std::max(date_col, value_col)) {
            throw ParseError(row_label(source, line_no) + ": too few columns");
        }
        const auto date = YearMonth::parse(fields[date_col]);
        if (!date) {
            throw ParseError(row_label(source, line_no) + ": invalid date '" + std::string(fields[date_col]) + "'");
        }
        if (spec.frequency == Frequency::annual && date->month != 1) {
            throw ParseError(row_label(source, line_no) + ": annual date must use month 01, got " + date->iso());
        }
        const long ord = ordinal(*date, spec.frequency);
        if (start) {
            if (ord == previous) {
                throw ParseError(row_label(source, line_no) + ": duplicate date " + date->iso());
            }
            if (ord < previous) {
                throw ParseError(row_label(source, line_no) + ": date " + date->iso() + " is not increasing");
            }
            if (ord != previous + 1) {
                throw ParseError(row_label(source, line_no) + ": gap before " + date->iso());
            }
        } else {
            start = *date;
        }
        previous = ord;

        const std::string_view field = fields[value_col];
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
        if (field.empty() || ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(value)) {
            throw ParseError(row_label(source, line_no) + ": non-numeric value '" + std::string(field) + "'");
        }
        if (spec.transform == Transform::inverse) {
            if (!(value > 0.0)) {
                throw DomainError(row_label(source, line_no) + ": inverse transform needs a positive value, got " +
                                  std::string(field));
            }
            value = 1.0 / value;
        }
        values.push_back(value);
    }
    if (!start) {
        throw ParseError(std::string(source) + ": no data rows");
    }
    return TimeSeries(*start, spec.frequency, std::move(values), spec.label);
}

TimeSeries load_series(const SeriesSpec& spec) {
    std::ifstream in(spec.path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + spec.path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_series_csv(buffer.str(), spec, spec.path.string());
}

TimeSeries derive_surplus(const TimeSeries& production, const TimeSeries& consumption) {
    const auto [p, c] = align(production, consumption);
    std::vector<double> s(p.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        s[i] = p[i] - c[i];
    }
    return TimeSeries(p.start(), p.frequency(), std::move(s), p.unit());
}

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

nlohmann::json to_json(const TimeSeries& s) {
    return {{"start", s.start().iso()},
            {"frequency", to_string(s.frequency())},
            {"unit", s.unit()},
            {"values", std::vector<double>(s.values().begin(), s.values().end())}};
}

nlohmann::json to_json(const speculator::RegimeClassification& c) {
    nlohmann::json roots = nlohmann::json::array();
    for (const auto& r : c.roots) {
        roots.push_back({{"re", r.real()}, {"im", r.imag()}, {"abs", std::abs(r)}});
    }
    return {{"k_sd", c.k_sd},
            {"k_sp", c.k_sp},
            {"discriminant", c.discriminant},
            {"roots", roots},
            {"theta", optional_number(c.theta)},
            {"period", optional_number(c.period)},
            {"label", std::string(speculator::to_string(c.label))},
            {"convergent", speculator::is_convergent(c.label)}};
}

nlohmann::json to_json(const speculator::PhaseGrid& grid) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : grid.nodes) {
        nodes.push_back({{"k_sd", n.k_sd},
                         {"k_sp", n.k_sp},
                         {"delta", n.discriminant},
                         {"label", std::string(speculator::to_string(n.label))},
                         {"period", optional_number(n.period)}});
    }
    const auto axis = [](const speculator::GridAxis& a) { return nlohmann::json{{"lo", a.lo}, {"hi", a.hi}, {"n", a.n}}; };
    return {{"k_sd_axis", axis(grid.k_sd_axis)}, {"k_sp_axis", axis(grid.k_sp_axis)}, {"order", "row-major, k_sp rows"},
            {"nodes", nodes}};
}

nlohmann::json to_json(const supply_demand::EquilibriumPath& path) {
    nlohmann::json trace = nlohmann::json::array();
    for (const auto& i : path.intercept_trace) {
        trace.push_back({{"alpha_d", i.alpha_d}, {"alpha_s", i.alpha_s}});
    }
    return {{"prices", to_json(path.prices)}, {"quantities", to_json(path.quantities)}, {"intercept_trace", trace}};
}

nlohmann::json to_json(const supply_demand::SupplyDemandFit& fit) {
    const auto& p = fit.params;
    return {{"parameters", {{"lambda", p.lambda}, {"beta_d", p.beta_d}, {"alpha_s0", p.alpha_s}}},
            {"determined", {{"alpha_d0", p.alpha_d}, {"beta_s", p.beta_s}}},
            {"r_squared", {{"price", fit.r2_price}, {"consumption", fit.r2_consumption}}},
            {"residuals", {{"price", to_json(fit.price_residuals)}, {"consumption", to_json(fit.consumption_residuals)}}},
            {"path", to_json(fit.path)},
            {"objective", fit.optimizer.objective_value},
            {"evaluations", fit.optimizer.evaluations},
            {"converged", fit.optimizer.converged},
            {"restarts_used", fit.optimizer.restarts_used}};
}

nlohmann::json to_json(const ethanol::QuadraticTrend& trend) {
    return {{"a", trend.a}, {"b", trend.b}, {"r_squared", trend.r_squared}};
}

nlohmann::json to_json(const ethanol::TrendComparison& cmp) {
    nlohmann::json window = nullptr;
    if (cmp.exclude_b) {
        window = {{"begin_index", cmp.exclude_b->begin_index}, {"end_index", cmp.exclude_b->end_index}};
    }
    return {{"trend_a", to_json(cmp.trend_a)},
            {"trend_b", to_json(cmp.trend_b)},
            {"coefficient_difference", cmp.coefficient_difference},
            {"rho", cmp.rho},
            {"common_points", cmp.common_points},
            {"exclude_b", window},
            {"normalized_a", to_json(cmp.normalized_a)},
            {"normalized_b", to_json(cmp.normalized_b)}};
}

nlohmann::json to_json(const combined::CombinedParams& params) {
    return {{"k_sd", params.k_sd},           {"k_sp", params.k_sp},
            {"couplings", params.couplings}, {"trend_a", params.trend_a},
            {"trend_b", params.trend_b},     {"switch_index", params.switch_index}};
}

nlohmann::json to_json(const combined::CombinedFit& fit) {
    nlohmann::json candidates = nlohmann::json::array();
    for (const auto& c : fit.candidates) {
        candidates.push_back({{"switch_index", c.switch_index},
                              {"sse", c.usable ? nlohmann::json(c.sse) : nlohmann::json(nullptr)}});
    }
    return {{"parameters", to_json(fit.params)},
            {"switch_date", fit.switch_date.iso()},
            {"sse", fit.sse},
            {"r_squared", fit.r_squared},
            {"period", optional_number(fit.regime.period)},
            {"regime", std::string(speculator::to_string(fit.regime.label))},
            {"classification", to_json(fit.regime)},
            {"converged", fit.optimizer.converged},
            {"evaluations", fit.optimizer.evaluations},
            {"candidates", candidates},
            {"path", to_json(fit.path)}};
}

nlohmann::json to_json(const LagScan& scan) {
    nlohmann::json points = nlohmann::json::array();
    for (const auto& p : scan.points) {
        points.push_back({{"lag", p.lag}, {"rho", p.rho}, {"overlap", p.overlap}});
    }
    nlohmann::json peak = nullptr;
    if (const auto pk = scan.peak()) {
        peak = {{"lag", pk->lag}, {"rho", pk->rho}};
    }
    return {{"points", points}, {"omitted_lags", scan.omitted_lags}, {"warning", scan.warning()}, {"peak", peak}};
}

std::string render_table_csv(std::span<const std::pair<std::string, const TimeSeries*>> columns) {
    if (columns.empty()) {
        throw InvalidArgument("render_table_csv: no columns");
    }
    const TimeSeries& first = *columns.front().second;
    for (const auto& [name, s] : columns) {
        if (s->start() != first.start() || s->frequency() != first.frequency() || s->size() != first.size()) {
            throw AlignmentError("render_table_csv: column '" + name + "' is not on the shared calendar");
        }
    }
    std::string out = "date";
    for (const auto& [name, s] : columns) {
        out += "," + name;
    }
    out += "\n";
    for (std::size_t i = 0; i < first.size(); ++i) {
        out += first.date_at(i).iso();
        for (const auto& [name, s] : columns) {
            out += "," + format_double((*s)[i]);
        }
        out += "\n";
    }
    return out;
}

std::string render(const TimeSeries& s, Format format) {
    if (format == Format::json) {
        return render_json(to_json(s));
    }
    const std::pair<std::string, const TimeSeries*> col{"value", &s};
    return render_table_csv(std::span(&col, 1));
}

std::string render(const speculator::PhaseGrid& grid, Format format) {
    if (format == Format::json) {
        return render_json(to_json(grid));
    }
    std::string out = "k_sd,k_sp,delta,label,period\n";
    for (const auto& n : grid.nodes) {
        out += format_double(n.k_sd) + "," + format_double(n.k_sp) + "," + format_double(n.discriminant) + "," +
               std::string(speculator::to_string(n.label)) + "," + (n.period ? format_double(*n.period) : "") + "\n";
    }
    return out;
}

std::string render(const supply_demand::EquilibriumPath& path, Format format) {
    if (format == Format::json) {
        return render_json(to_json(path));
    }
    std::string out = "date,price,quantity,alpha_d,alpha_s\n";
    for (std::size_t i = 0; i < path.prices.size(); ++i) {
        out += path.prices.date_at(i).iso() + "," + format_double(path.prices[i]) + "," +
               format_double(path.quantities[i]) + "," + format_double(path.intercept_trace[i].alpha_d) + "," +
               format_double(path.intercept_trace[i].alpha_s) + "\n";
    }
    return out;
}

std::string render(const LagScan& scan, Format format) {
    if (format == Format::json) {
        return render_json(to_json(scan));
    }
    std::string out = "lag,rho,overlap\n";
    for (const auto& p : scan.points) {
        out += std::to_string(p.lag) + "," + format_double(p.rho) + "," + std::to_string(p.overlap) + "\n";
    }
    return out;
}

std::string render_json(const nlohmann::json& doc) {
    return doc.dump(2) + "\n";
}

void emit(std::string_view content, const std::filesystem::path& destination) {
    std::ofstream out(destination, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open " + destination.string() + " for writing");
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
        throw IoError("write failed for " + destination.string());
    }
}

}  // namespace bubbledyn::io
