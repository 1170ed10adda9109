#include "bubbledyn/error.hpp"
#include "bubbledyn/io.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace bubbledyn;
using namespace bubbledyn::io;
namespace fs = std::filesystem;

namespace {

SeriesSpec monthly_spec() { return SeriesSpec{}; }

SeriesSpec annual_spec() {
    SeriesSpec s;
    s.frequency = Frequency::annual;
    return s;
}

std::string error_of(const std::string& text, const SeriesSpec& spec) {
    try {
        (void)parse_series_csv(text, spec, "in.csv");
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

fs::path temp_path(const std::string& name) { return fs::temp_directory_path() / ("bubbledyn_test_" + name); }

std::size_t count_lines(const std::string& s) {
    std::size_t n = 0;
    for (char c : s) {
        n += c == '\n' ? 1 : 0;
    }
    return n;
}

}  // namespace

TEST_CASE("a well-formed monthly file", "[load]") {
    const auto s = parse_series_csv("date,value\n2004-01,1.5\n2004-02,2\n2004-03,-3e2\n", monthly_spec(), "in.csv");
    CHECK(s.size() == 3);
    CHECK(s.start() == YearMonth{2004, 1});
    CHECK(s[2] == -300.0);
}

TEST_CASE("named columns, CRLF and day-precision dates", "[load]") {
    SeriesSpec spec = monthly_spec();
    spec.date_column = "month";
    spec.value_column = "close";
    const auto s = parse_series_csv("month,open,close\r\n2007-05-01,1,2\r\n2007-06-01,3,4\r\n", spec, "in.csv");
    CHECK(s.size() == 2);
    CHECK(s[1] == 4.0);
    CHECK(s.start() == YearMonth{2007, 5});
}

TEST_CASE("ingestion errors name the offending row", "[load]") {
    const auto spec = monthly_spec();
    CHECK(error_of("date,value\n2004-01,1\n2004-03,2\n", spec).find("in.csv:3") != std::string::npos);
    CHECK(error_of("date,value\n2004-01,1\n2004-01,2\n", spec).find("duplicate") != std::string::npos);
    CHECK(error_of("date,value\n2004-02,1\n2004-01,2\n", spec).find("in.csv:3") != std::string::npos);
    CHECK(error_of("date,value\n2004-01,1\n2004-02,abc\n", spec).find("in.csv:3") != std::string::npos);
    CHECK(error_of("date,value\n2004-01,1\n2004-02,\n", spec).find("in.csv:3") != std::string::npos);
    CHECK(error_of("when,value\n2004-01,1\n", spec).find("missing column 'date'") != std::string::npos);
    CHECK(error_of("date,value\n2004,1\n2005-06,2\n", annual_spec()).find("in.csv:3") != std::string::npos);
    CHECK_THROWS_AS(parse_series_csv("date,value\n", spec, "in.csv"), ParseError);
    CHECK_THROWS_AS(parse_series_csv("date,value\nxx,1\n", spec, "in.csv"), ParseError);
}

TEST_CASE("inverse transform", "[load]") {
    SeriesSpec spec = monthly_spec();
    spec.transform = Transform::inverse;
    const auto s = parse_series_csv("date,value\n2004-01,5.0\n2004-02,4\n", spec, "y.csv");
    CHECK(s[0] == 0.2);
    CHECK(s[1] == 0.25);
    CHECK_THROWS_AS(parse_series_csv("date,value\n2004-01,5.0\n2004-02,0\n", spec, "y.csv"), DomainError);
    CHECK_THROWS_AS(parse_series_csv("date,value\n2004-01,-1\n", spec, "y.csv"), DomainError);
}

TEST_CASE("load_series reads from disk", "[load]") {
    const auto path = temp_path("load.csv");
    std::ofstream(path) << "date,value\n1999,1\n2000,2\n";
    SeriesSpec spec = annual_spec();
    spec.path = path;
    const auto s = load_series(spec);
    CHECK(s.size() == 2);
    CHECK(s.frequency() == Frequency::annual);
    fs::remove(path);
    CHECK_THROWS_AS(load_series(spec), IoError);
}

TEST_CASE("derive_surplus examples", "[surplus]") {
    const TimeSeries p({1990, 1}, Frequency::annual, {10, 12, 9});
    CHECK(derive_surplus(p, p) == p.with_values({0, 0, 0}));
    const TimeSeries one({1990, 1}, Frequency::annual, {10});
    const TimeSeries seven({1990, 1}, Frequency::annual, {7});
    CHECK(derive_surplus(one, seven)[0] == 3.0);
    const TimeSeries m({1990, 1}, Frequency::monthly, {1, 2});
    CHECK_THROWS_AS(derive_surplus(p, m), AlignmentError);
}

TEST_CASE("surplus plus consumption gives production", "[surplus][property]") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(100, 700);
    std::vector<double> prod(25), cons(25);
    for (std::size_t i = 0; i < prod.size(); ++i) {
        prod[i] = std::round(u(rng) * 8.0) / 8.0;
        cons[i] = std::round(u(rng) * 8.0) / 8.0;
    }
    const TimeSeries p({1985, 1}, Frequency::annual, prod);
    const TimeSeries c({1985, 1}, Frequency::annual, cons);
    const auto s = derive_surplus(p, c);
    for (std::size_t i = 0; i < prod.size(); ++i) {
        CHECK(s[i] + c[i] == p[i]);
    }
}

TEST_CASE("emit then load reproduces a series bit for bit", "[emit][property]") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> spread(-30.0, 30.0);
    std::uniform_real_distribution<double> g(-1.0, 1.0);
    for (const auto freq : {Frequency::monthly, Frequency::annual}) {
        std::vector<double> v(200);
        for (auto& x : v) {
            x = g(rng) * std::pow(10.0, spread(rng));
        }
        v[3] = 0.1;
        v[4] = 1.0 / 3.0;
        v[5] = -0.0;
        const TimeSeries s({1901, 1}, freq, v);
        const auto path = temp_path("roundtrip.csv");
        emit(s, Format::csv, path);
        SeriesSpec spec;
        spec.path = path;
        spec.frequency = freq;
        const auto back = load_series(spec);
        fs::remove(path);
        REQUIRE(back.size() == s.size());
        CHECK(back.start() == s.start());
        for (std::size_t i = 0; i < v.size(); ++i) {
            CHECK(back[i] == s[i]);
        }
    }
}

TEST_CASE("CSV uses ISO dates and annual month 01", "[emit]") {
    const TimeSeries a({1999, 1}, Frequency::annual, {1.5, 2.0});
    CHECK(render(a, Format::csv) == "date,value\n1999-01,1.5\n2000-01,2\n");
}

TEST_CASE("phase grid CSV has a header and one row per node", "[emit]") {
    const auto g = speculator::phase_grid({0.5, 3.0, 2}, {0.0, 0.7, 2});
    const auto csv = render(g, Format::csv);
    CHECK(count_lines(csv) == 5);
    CHECK(csv.rfind("k_sd,k_sp,delta,label,period\n", 0) == 0);
    const auto j = nlohmann::json::parse(render(g, Format::json));
    CHECK(j.at("nodes").size() == 4);
}

TEST_CASE("combined fit report carries every parameter by name", "[emit]") {
    const combined::CombinedParams p{0.098, 1.29, {-0.095, -67.9}, 150.0, 0.01, 40};
    const auto j = to_json(p);
    for (const char* key : {"k_sd", "k_sp", "couplings", "trend_a", "trend_b", "switch_index"}) {
        CHECK(j.contains(key));
    }
    CHECK(j.at("couplings").size() == 2);
}

TEST_CASE("format_double is the shortest round-trip form", "[emit]") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(100.0) == "100");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("emit reports the destination on failure", "[emit]") {
    try {
        emit("x", "/nonexistent-dir/sub/out.csv");
        FAIL("expected an I/O error");
    } catch (const IoError& e) {
        CHECK(std::string(e.what()).find("/nonexistent-dir/sub/out.csv") != std::string::npos);
    }
}

TEST_CASE("format names", "[emit]") {
    CHECK(format_from_string("csv") == Format::csv);
    CHECK(format_from_string("json") == Format::json);
    CHECK_FALSE(format_from_string("xml"));
}
