#pragma once

#include "estimators.hpp"

#include <string>
#include <vector>

namespace ordpat {

struct csv_series {
    std::string name;
    std::vector<std::string> dates; // ISO-8601, strictly increasing
    std::vector<double> values;
};

struct csv_options {
    char delimiter = ',';
    std::string date_column = "Date";
    std::string value_column; // required
    bool sort_by_date = true; // false: input order must already be strictly increasing
};

// Header row required. Dates must be ISO calendar dates; duplicates are an
// error naming the date. Unparseable numbers are errors naming row and
// column. The sort is by date; ISO dates order lexicographically.
csv_series load_csv(const std::string& path, const csv_options& opt);

struct align_result {
    paired_series pair; // carries the shared dates as timestamps
    std::size_t dropped_x = 0, dropped_y = 0;
};

// Inner join on dates. An empty intersection is a data error.
align_result align_inner(const csv_series& x, const csv_series& y);

// Inclusive date-range slice; an empty bound leaves that side open. The
// pair must carry timestamps. An empty result is a data error.
paired_series slice_dates(const paired_series& p, const std::string& start, const std::string& end);

// Exactly count observations starting at the first date >= start; fewer
// available is a data error.
paired_series slice_count(const paired_series& p, const std::string& start, std::size_t count);

// Full round-trip precision (17 significant digits). Pairs without
// timestamps get a 1-based index column instead of dates.
void write_pair_csv(const std::string& path, const paired_series& p, const std::string& x_name,
                    const std::string& y_name);

} // namespace ordpat
