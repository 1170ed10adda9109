#include "bubbledyn/timeseries.hpp"

#include "bubbledyn/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace bubbledyn {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::domain: return "domain";
    case ErrorCode::degenerate: return "degenerate";
    case ErrorCode::alignment: return "alignment";
    case ErrorCode::io: return "io";
    case ErrorCode::parse: return "parse";
    case ErrorCode::fit: return "fit";
    }
    return "unknown";
}

const char* to_string(Frequency f) noexcept {
    return f == Frequency::monthly ? "monthly" : "annual";
}

namespace {

bool parse_int(std::string_view text, int& out) {
    if (text.empty()) {
        return false;
    }
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

}  // namespace

std::optional<YearMonth> YearMonth::parse(std::string_view text) {
    YearMonth ym;
    if (text.size() == 4) {
        if (!parse_int(text, ym.year)) {
            return std::nullopt;
        }
        ym.month = 1;
        return ym;
    }
    if (text.size() != 7 && text.size() != 10) {
        return std::nullopt;
    }
    if (text[4] != '-' || !parse_int(text.substr(0, 4), ym.year) || !parse_int(text.substr(5, 2), ym.month)) {
        return std::nullopt;
    }
    if (ym.month < 1 || ym.month > 12) {
        return std::nullopt;
    }
    if (text.size() == 10) {
        int day = 0;
        if (text[7] != '-' || !parse_int(text.substr(8, 2), day) || day < 1 || day > 31) {
            return std::nullopt;
        }
    }
    return ym;
}

std::string YearMonth::iso() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d", year, month);
    return buf;
}

long ordinal(YearMonth date, Frequency frequency) noexcept {
    if (frequency == Frequency::annual) {
        return date.year;
    }
    return static_cast<long>(date.year) * 12 + (date.month - 1);
}

YearMonth from_ordinal(long ord, Frequency frequency) noexcept {
    if (frequency == Frequency::annual) {
        return {static_cast<int>(ord), 1};
    }
    const long year = ord >= 0 ? ord / 12 : (ord - 11) / 12;
    return {static_cast<int>(year), static_cast<int>(ord - year * 12) + 1};
}

TimeSeries::TimeSeries(YearMonth start, Frequency frequency, std::vector<double> values, std::string unit)
    : start_(start), frequency_(frequency), values_(std::move(values)), unit_(std::move(unit)) {
    if (start_.month < 1 || start_.month > 12) {
        throw InvalidArgument("time series start month out of range: " + std::to_string(start_.month));
    }
    if (frequency_ == Frequency::annual && start_.month != 1) {
        throw InvalidArgument("annual series must start in month 01, got " + start_.iso());
    }
    if (values_.empty()) {
        throw InvalidArgument("time series must be non-empty");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw DomainError("non-finite value at index " + std::to_string(i));
        }
    }
}

YearMonth TimeSeries::date_at(std::size_t i) const {
    return from_ordinal(ordinal(start_, frequency_) + static_cast<long>(i), frequency_);
}

std::optional<std::size_t> TimeSeries::index_of(YearMonth date) const {
    if (frequency_ == Frequency::annual && date.month != 1) {
        return std::nullopt;
    }
    const long offset = ordinal(date, frequency_) - ordinal(start_, frequency_);
    if (offset < 0 || offset >= static_cast<long>(size())) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(offset);
}

TimeSeries TimeSeries::slice(std::size_t begin, std::size_t end) const {
    if (begin >= end || end > size()) {
        throw InvalidArgument("invalid slice [" + std::to_string(begin) + ", " + std::to_string(end) +
                              ") of series with " + std::to_string(size()) + " points");
    }
    return TimeSeries(date_at(begin), frequency_,
                      std::vector<double>(values_.begin() + static_cast<long>(begin),
                                          values_.begin() + static_cast<long>(end)),
                      unit_);
}

std::optional<Window> TimeSeries::window_between(YearMonth first, YearMonth last) const {
    const long base = ordinal(start_, frequency_);
    long lo = ordinal(first, frequency_) - base;
    long hi = ordinal(last, frequency_) - base + 1;
    lo = std::max(lo, 0L);
    hi = std::min(hi, static_cast<long>(size()));
    if (lo >= hi) {
        return std::nullopt;
    }
    return Window{static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
}

TimeSeries TimeSeries::between(YearMonth first, YearMonth last) const {
    const auto w = window_between(first, last);
    if (!w) {
        throw AlignmentError("series " + start_.iso() + ".." + end_date().iso() + " does not cover " + first.iso() +
                             ".." + last.iso());
    }
    return slice(w->begin_index, w->end_index);
}

TimeSeries TimeSeries::with_values(std::vector<double> values) const {
    return TimeSeries(start_, frequency_, std::move(values), unit_);
}

void validate_window(const Window& window, std::size_t size) {
    if (window.end_index <= window.begin_index || window.end_index > size) {
        throw InvalidArgument("window [" + std::to_string(window.begin_index) + ", " +
                              std::to_string(window.end_index) + ") invalid for series of " + std::to_string(size) +
                              " points");
    }
}

AlignedPair align(const TimeSeries& a, const TimeSeries& b) {
    if (a.frequency() != b.frequency()) {
        throw AlignmentError(std::string("frequency mismatch: ") + to_string(a.frequency()) + " vs " +
                             to_string(b.frequency()));
    }
    const Frequency f = a.frequency();
    const long lo = std::max(ordinal(a.start(), f), ordinal(b.start(), f));
    const long hi = std::min(ordinal(a.end_date(), f), ordinal(b.end_date(), f));
    if (lo > hi) {
        throw AlignmentError("series do not overlap: " + a.start().iso() + ".." + a.end_date().iso() + " and " +
                             b.start().iso() + ".." + b.end_date().iso());
    }
    const YearMonth first = from_ordinal(lo, f);
    const YearMonth last = from_ordinal(hi, f);
    return {a.between(first, last), b.between(first, last)};
}

}  // namespace bubbledyn
