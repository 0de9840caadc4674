#pragma once

#include <stdexcept>
#include <string>

namespace qrrt {

struct NotInvertibleError : std::runtime_error {
    explicit NotInvertibleError(const std::string& what) : std::runtime_error(what) {}
};

struct NonTruncatingError : std::runtime_error {
    explicit NonTruncatingError(const std::string& what) : std::runtime_error(what) {}
};

struct NegativeAPowerError : std::runtime_error {
    explicit NegativeAPowerError(const std::string& what) : std::runtime_error(what) {}
};

struct NonIntegerExponentError : std::runtime_error {
    explicit NonIntegerExponentError(const std::string& what) : std::runtime_error(what) {}
};

struct UnsupportedParamsError : std::runtime_error {
    explicit UnsupportedParamsError(const std::string& what) : std::runtime_error(what) {}
};

struct ParseError : std::runtime_error {
    ParseError(const std::string& what, int line, int column)
        : std::runtime_error(what + " (line " + std::to_string(line) + ", column " +
                             std::to_string(column) + ")"),
          line(line),
          column(column) {}
    int line;
    int column;
};

struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

struct NonTerminatingSumError : std::runtime_error {
    explicit NonTerminatingSumError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qrrt
