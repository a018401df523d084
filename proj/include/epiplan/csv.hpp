#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "epiplan/fit.hpp"

namespace epiplan {

namespace detail {

// Days since 1970-01-01 for an ISO yyyy-mm-dd date (Howard Hinnant's civil-days).
inline long days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const long era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = static_cast<unsigned>((153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1);
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<long>(doe) - 719468;
}

inline bool parse_iso_date(const std::string& s, long& out) {
    int y = 0, m = 0, d = 0;
    if (std::sscanf(s.c_str(), "%d-%d-%d", &y, &m, &d) != 3) return false;
    if (m < 1 || m > 12 || d < 1 || d > 31) return false;
    out = days_from_civil(y, m, d);
    return true;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    std::stringstream ss(line);
    while (std::getline(ss, cur, ',')) out.push_back(cur);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline bool parse_double(const std::string& s, double& out) {
    const char* b = s.data();
    const char* e = b + s.size();
    while (b < e && (*b == ' ' || *b == '\t')) ++b;
    auto [p, ec] = std::from_chars(b, e, out);
    while (p < e && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
    return ec == std::errc() && p == e;
}

}  // namespace detail

struct ObservedReadResult {
    ObservedSeries series;
    std::vector<std::string> warnings;
};

/// Read a `date,cases,deaths` CSV of cumulative counts. Dates may be ISO
/// calendar dates or plain day numbers; either way they become day offsets
/// from the first row. Malformed rows abort with the line number; decreasing
/// cumulative columns only warn, listing the offending rows.
inline ObservedReadResult read_observed_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open observed-data file: " + path);

    ObservedReadResult out;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "date,cases,deaths")
        throw std::runtime_error(path + ":1: expected header 'date,cases,deaths'");

    long first_date = 0;
    bool have_first = false;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells = detail::split_csv_line(line);
        if (cells.size() != 3)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected 3 columns");
        long date;
        double day_number;
        if (detail::parse_iso_date(cells[0], date)) {
            // calendar date
        } else if (detail::parse_double(cells[0], day_number)) {
            date = static_cast<long>(day_number);
        } else {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad date '" + cells[0] + "'");
        }
        double c, d;
        if (!detail::parse_double(cells[1], c) || !detail::parse_double(cells[2], d))
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad numeric value");
        if (!have_first) {
            first_date = date;
            have_first = true;
        }
        int offset = static_cast<int>(date - first_date) + 1;  // first report = day 1
        if (!out.series.days.empty() && offset <= out.series.days.back())
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": dates must increase");
        if (!out.series.cases.empty() && c < out.series.cases.back())
            out.warnings.push_back("row " + std::to_string(lineno) + ": cases column decreases");
        if (!out.series.deaths.empty() && d < out.series.deaths.back())
            out.warnings.push_back("row " + std::to_string(lineno) + ": deaths column decreases");
        out.series.days.push_back(offset);
        out.series.cases.push_back(c);
        out.series.deaths.push_back(d);
    }
    if (out.series.days.empty()) throw std::runtime_error(path + ": no data rows");
    return out;
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);  // round-trips exactly
    return buf;
}

/// One column of day-indexed values with optional # comment header lines.
inline void write_series_csv(const std::string& path, const std::vector<std::string>& comments,
                             const std::string& value_name, int first_day,
                             const std::vector<double>& values) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (const auto& c : comments) out << "# " << c << "\n";
    out << "day," << value_name << "\n";
    for (size_t i = 0; i < values.size(); ++i)
        out << first_day + static_cast<int>(i) << "," << format_double(values[i]) << "\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace epiplan
