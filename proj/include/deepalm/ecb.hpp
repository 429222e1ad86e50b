#ifndef DEEPALM_ECB_HPP
#define DEEPALM_ECB_HPP

#include <algorithm>
#include <array>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "deepalm/io.hpp"
#include "deepalm/termstructure.hpp"

namespace deepalm {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : std::runtime_error(source + (line ? ":" + std::to_string(line) : std::string()) + ": " + what),
          line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

using Date = std::chrono::year_month_day;

inline bool parse_iso_date(std::string_view text, Date& out) {
    int y = 0;
    unsigned m = 0, d = 0;
    char tail = 0;
    const std::string s(text);
    if (std::sscanf(s.c_str(), "%4d-%2u-%2u%c", &y, &m, &d, &tail) != 3) return false;
    out = Date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    return out.ok();
}

inline std::string format_date(const Date& d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()), static_cast<unsigned>(d.month()),
                  static_cast<unsigned>(d.day()));
    return buf;
}

struct EcbParamRow {
    Date date{};
    SvenssonParams params;
};

enum class BetaUnits { auto_detect, percent, decimal };

inline BetaUnits parse_beta_units(std::string_view s) {
    if (s == "auto") return BetaUnits::auto_detect;
    if (s == "percent") return BetaUnits::percent;
    if (s == "decimal") return BetaUnits::decimal;
    throw std::invalid_argument("unknown beta unit '" + std::string(s) + "' (auto|percent|decimal)");
}

namespace detail {

inline std::string normalize_header(std::string s) {
    std::string out;
    for (char c : s) {
        if (std::isalnum(static_cast<unsigned char>(c))) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

inline std::vector<std::string> split(const std::string& line, char delim) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, delim)) cells.push_back(cell);
    if (!line.empty() && line.back() == delim) cells.emplace_back();
    return cells;
}

inline std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c) && c != '"'; };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

}  // namespace detail

// Delimited text with a header naming a date column and beta0..beta3,
// tau1, tau2. Betas in percent are converted to decimals: with auto
// detection the whole file counts as percent when any |beta0| > 0.5.
inline std::vector<EcbParamRow> parse_ecb_stream(std::istream& in, const std::string& source,
                                                 BetaUnits units = BetaUnits::auto_detect) {
    std::string line;
    std::size_t line_no = 0;
    std::string header;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (detail::trim(line).empty() || line.front() == '#') continue;
        header = line;
        break;
    }
    if (header.empty()) throw ParseError(source, 0, "empty input");
    const char delim = header.find(';') != std::string::npos && header.find(',') == std::string::npos ? ';' : ',';

    static const std::array<const char*, 7> wanted = {"date", "beta0", "beta1", "beta2", "beta3", "tau1", "tau2"};
    std::array<int, 7> column{};
    column.fill(-1);
    const auto names = detail::split(header, delim);
    for (std::size_t c = 0; c < names.size(); ++c) {
        std::string key = detail::normalize_header(names[c]);
        if (key == "timeperiod") key = "date";
        for (std::size_t w = 0; w < wanted.size(); ++w) {
            if (key == wanted[w]) column[w] = static_cast<int>(c);
        }
    }
    for (std::size_t w = 0; w < wanted.size(); ++w) {
        if (column[w] < 0) throw ParseError(source, line_no, std::string("missing column '") + wanted[w] + "'");
    }

    std::vector<EcbParamRow> rows;
    std::vector<std::size_t> lines;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (detail::trim(line).empty() || line.front() == '#') continue;
        const auto cells = detail::split(line, delim);
        auto cell = [&](std::size_t w) -> std::string {
            const auto c = static_cast<std::size_t>(column[w]);
            if (c >= cells.size()) throw ParseError(source, line_no, std::string("missing value for ") + wanted[w]);
            return detail::trim(cells[c]);
        };
        EcbParamRow row;
        if (!parse_iso_date(cell(0), row.date)) {
            throw ParseError(source, line_no, "unparseable date '" + cell(0) + "'");
        }
        std::array<double, 6> v{};
        for (std::size_t w = 1; w < wanted.size(); ++w) {
            const std::string text = cell(w);
            if (!parse_double(text, v[w - 1]) || !std::isfinite(v[w - 1])) {
                throw ParseError(source, line_no, std::string("unparseable ") + wanted[w] + " '" + text + "'");
            }
        }
        row.params = SvenssonParams{v[0], v[1], v[2], v[3], v[4], v[5]};
        if (!(row.params.tau1 > 0.0) || !(row.params.tau2 > 0.0)) {
            throw ParseError(source, line_no, "tau parameters must be positive");
        }
        rows.push_back(row);
        lines.push_back(line_no);
    }
    if (rows.empty()) throw ParseError(source, 0, "no data rows");

    std::vector<std::size_t> order(rows.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rows[a].date < rows[b].date; });
    std::vector<EcbParamRow> sorted;
    sorted.reserve(rows.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (i > 0 && rows[order[i]].date == rows[order[i - 1]].date) {
            throw ParseError(source, lines[order[i]], "duplicate date " + format_date(rows[order[i]].date));
        }
        sorted.push_back(rows[order[i]]);
    }

    bool percent = units == BetaUnits::percent;
    if (units == BetaUnits::auto_detect) {
        percent = std::any_of(sorted.begin(), sorted.end(), [](const EcbParamRow& r) { return std::fabs(r.params.beta0) > 0.5; });
    }
    if (percent) {
        for (auto& r : sorted) {
            r.params.beta0 /= 100.0;
            r.params.beta1 /= 100.0;
            r.params.beta2 /= 100.0;
            r.params.beta3 /= 100.0;
        }
    }
    return sorted;
}

inline std::vector<EcbParamRow> parse_ecb_csv(const std::filesystem::path& path, BetaUnits units = BetaUnits::auto_detect) {
    std::ifstream in(path);
    if (!in) throw ParseError(path.string(), 0, "cannot open file");
    return parse_ecb_stream(in, path.string(), units);
}

// Normalized parameter store: decimals, sorted, shortest round-trip text.
inline void write_param_store(const std::filesystem::path& path, const std::vector<EcbParamRow>& rows) {
    auto out = open_text(path);
    out << "date,beta0,beta1,beta2,beta3,tau1,tau2\n";
    for (const auto& r : rows) {
        const auto& p = r.params;
        out << format_date(r.date) << ',' << format_double(p.beta0) << ',' << format_double(p.beta1) << ','
            << format_double(p.beta2) << ',' << format_double(p.beta3) << ',' << format_double(p.tau1) << ','
            << format_double(p.tau2) << '\n';
    }
    close_text(out, path);
}

// Index of the last row dated on or before `date`.
inline std::size_t last_on_or_before(const std::vector<EcbParamRow>& rows, const Date& date) {
    const auto it = std::upper_bound(rows.begin(), rows.end(), date,
                                     [](const Date& d, const EcbParamRow& r) { return d < r.date; });
    if (it == rows.begin()) throw std::invalid_argument("no parameter row on or before " + format_date(date));
    return static_cast<std::size_t>(std::distance(rows.begin(), it) - 1);
}

// Daily curves dated in (anchor - years, anchor].
inline std::vector<YieldCurve> daily_curves(const std::vector<EcbParamRow>& rows, const Date& anchor, int years,
                                            std::size_t n) {
    const std::size_t last = last_on_or_before(rows, anchor);
    const Date start = anchor - std::chrono::years{years};
    std::vector<YieldCurve> out;
    for (std::size_t i = 0; i <= last; ++i) {
        if (rows[i].date > start) out.push_back(svensson_to_curve(rows[i].params, n));
    }
    return out;
}

// One curve per month for the `months` months ending at the anchor, oldest
// first: the last row on or before each month end (the anchor itself last).
inline std::vector<YieldCurve> monthly_curves(const std::vector<EcbParamRow>& rows, const Date& anchor, int months,
                                              std::size_t n) {
    std::vector<YieldCurve> out;
    const std::chrono::year_month anchor_month{anchor.year(), anchor.month()};
    for (int k = months - 1; k >= 0; --k) {
        Date cutoff = anchor;
        if (k > 0) {
            const std::chrono::year_month ym = anchor_month - std::chrono::months{k};
            cutoff = Date{ym.year() / ym.month() / std::chrono::last};
        }
        const std::size_t idx = last_on_or_before(rows, cutoff);
        if (k > 0 && std::chrono::year_month{rows[idx].date.year(), rows[idx].date.month()} !=
                         anchor_month - std::chrono::months{k}) {
            throw std::invalid_argument("no parameter row in month ending " + format_date(cutoff));
        }
        out.push_back(svensson_to_curve(rows[idx].params, n));
    }
    return out;
}

}  // namespace deepalm

#endif  // DEEPALM_ECB_HPP
