#include "dataio.hpp"

#include "errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>

namespace ordpat {

namespace {

std::vector<std::string> split_fields(const std::string& line, char delimiter) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == delimiter) {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

bool is_iso_date(const std::string& s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    const int month = (s[5] - '0') * 10 + (s[6] - '0');
    const int day = (s[8] - '0') * 10 + (s[9] - '0');
    return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

double parse_value(const std::string& field, std::size_t row, const std::string& column) {
    const char* begin = field.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0' || !std::isfinite(v))
        throw data_error("row " + std::to_string(row) + ", column '" + column +
                         "': cannot parse '" + field + "' as a finite number");
    return v;
}

void check_strictly_increasing(const std::vector<std::string>& dates, const std::string& what) {
    for (std::size_t i = 1; i < dates.size(); ++i) {
        if (dates[i] == dates[i - 1])
            throw data_error(what + ": duplicate date " + dates[i]);
        if (dates[i] < dates[i - 1])
            throw data_error(what + ": dates not increasing at " + dates[i]);
    }
}

} // namespace

csv_series load_csv(const std::string& path, const csv_options& opt) {
    if (opt.value_column.empty()) throw invalid_input("value column name must be given");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open CSV file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw data_error(path + ": empty file, header row required");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split_fields(line, opt.delimiter);

    auto column_index = [&](const std::string& name) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) {
            std::string have;
            for (const auto& col : header) have += (have.empty() ? "" : ", ") + col;
            throw data_error(path + ": no column '" + name + "' in header (" + have + ")");
        }
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t date_idx = column_index(opt.date_column);
    const std::size_t value_idx = column_index(opt.value_column);

    csv_series out;
    out.name = opt.value_column;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_fields(line, opt.delimiter);
        if (fields.size() <= std::max(date_idx, value_idx))
            throw data_error(path + ": row " + std::to_string(row) + " has " +
                             std::to_string(fields.size()) + " fields, header has " +
                             std::to_string(header.size()));
        const std::string& date = fields[date_idx];
        if (!is_iso_date(date))
            throw data_error(path + ": row " + std::to_string(row) + ": '" + date +
                             "' is not an ISO date (YYYY-MM-DD)");
        out.dates.push_back(date);
        out.values.push_back(parse_value(fields[value_idx], row, opt.value_column));
    }
    if (out.dates.empty()) throw data_error(path + ": no data rows");

    if (opt.sort_by_date) {
        std::vector<std::size_t> order(out.dates.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return out.dates[a] < out.dates[b]; });
        csv_series sorted;
        sorted.name = out.name;
        sorted.dates.reserve(order.size());
        sorted.values.reserve(order.size());
        for (std::size_t i : order) {
            sorted.dates.push_back(std::move(out.dates[i]));
            sorted.values.push_back(out.values[i]);
        }
        out = std::move(sorted);
    }
    check_strictly_increasing(out.dates, path);
    return out;
}

align_result align_inner(const csv_series& x, const csv_series& y) {
    if (x.dates.size() != x.values.size() || y.dates.size() != y.values.size())
        throw invalid_input("csv_series dates and values lengths differ");
    check_strictly_increasing(x.dates, "first series");
    check_strictly_increasing(y.dates, "second series");

    align_result out;
    std::vector<double> xs, ys;
    std::vector<std::string> dates;
    std::size_t i = 0, j = 0;
    while (i < x.dates.size() && j < y.dates.size()) {
        if (x.dates[i] == y.dates[j]) {
            dates.push_back(x.dates[i]);
            xs.push_back(x.values[i]);
            ys.push_back(y.values[j]);
            ++i;
            ++j;
        } else if (x.dates[i] < y.dates[j]) {
            ++i;
            ++out.dropped_x;
        } else {
            ++j;
            ++out.dropped_y;
        }
    }
    out.dropped_x += x.dates.size() - i;
    out.dropped_y += y.dates.size() - j;
    if (dates.empty()) throw data_error("series share no dates");
    out.pair = paired_series(std::move(xs), std::move(ys), std::move(dates));
    return out;
}

namespace {

void check_dated(const paired_series& p) {
    if (p.timestamps.empty()) throw invalid_input("pair carries no timestamps to slice by");
}

paired_series take(const paired_series& p, std::size_t begin, std::size_t count) {
    return paired_series(
        std::vector<double>(p.x.begin() + static_cast<std::ptrdiff_t>(begin),
                            p.x.begin() + static_cast<std::ptrdiff_t>(begin + count)),
        std::vector<double>(p.y.begin() + static_cast<std::ptrdiff_t>(begin),
                            p.y.begin() + static_cast<std::ptrdiff_t>(begin + count)),
        std::vector<std::string>(p.timestamps.begin() + static_cast<std::ptrdiff_t>(begin),
                                 p.timestamps.begin() + static_cast<std::ptrdiff_t>(begin + count)));
}

} // namespace

paired_series slice_dates(const paired_series& p, const std::string& start, const std::string& end) {
    check_dated(p);
    if (!start.empty() && !is_iso_date(start))
        throw invalid_input("'" + start + "' is not an ISO date");
    if (!end.empty() && !is_iso_date(end)) throw invalid_input("'" + end + "' is not an ISO date");
    const auto& ts = p.timestamps;
    std::size_t lo = 0, hi = ts.size();
    if (!start.empty())
        lo = static_cast<std::size_t>(std::lower_bound(ts.begin(), ts.end(), start) - ts.begin());
    if (!end.empty())
        hi = static_cast<std::size_t>(std::upper_bound(ts.begin(), ts.end(), end) - ts.begin());
    if (lo >= hi)
        throw data_error("no observations between " + (start.empty() ? "start" : start) + " and " +
                         (end.empty() ? "end" : end));
    return take(p, lo, hi - lo);
}

paired_series slice_count(const paired_series& p, const std::string& start, std::size_t count) {
    check_dated(p);
    if (count == 0) throw invalid_input("slice count must be positive");
    if (!start.empty() && !is_iso_date(start))
        throw invalid_input("'" + start + "' is not an ISO date");
    const auto& ts = p.timestamps;
    const std::size_t lo = start.empty()
                               ? 0
                               : static_cast<std::size_t>(
                                     std::lower_bound(ts.begin(), ts.end(), start) - ts.begin());
    if (lo + count > ts.size())
        throw data_error("need " + std::to_string(count) + " observations from " +
                         (start.empty() ? "the start" : start) + ", only " +
                         std::to_string(ts.size() - lo) + " available");
    return take(p, lo, count);
}

void write_pair_csv(const std::string& path, const paired_series& p, const std::string& x_name,
                    const std::string& y_name) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw data_error("cannot open for writing: " + path);
    const bool dated = !p.timestamps.empty();
    std::fprintf(f, "%s,%s,%s\n", dated ? "Date" : "Index", x_name.c_str(), y_name.c_str());
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (dated)
            std::fprintf(f, "%s,%.17g,%.17g\n", p.timestamps[i].c_str(), p.x[i], p.y[i]);
        else
            std::fprintf(f, "%zu,%.17g,%.17g\n", i + 1, p.x[i], p.y[i]);
    }
    if (std::fclose(f) != 0) throw data_error("error closing " + path);
}

} // namespace ordpat
