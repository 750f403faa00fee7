#pragma once

#include <stdexcept>
#include <string>

namespace ordpat {

// Caller misuse: bad parameter values, violated preconditions.
class invalid_input : public std::invalid_argument {
public:
    explicit invalid_input(const std::string& what) : std::invalid_argument(what) {}
};

// Problems with supplied data: unreadable files, parse failures, alignment
// with empty intersection, malformed JSON documents.
class data_error : public std::runtime_error {
public:
    explicit data_error(const std::string& what) : std::runtime_error(what) {}
};

// A statistic exists arithmetically but is meaningless: constant indicator
// series, zero long-run variance. Never silently mapped to zero.
class degenerate_error : public std::runtime_error {
public:
    explicit degenerate_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace ordpat
