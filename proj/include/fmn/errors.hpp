#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fmn {

// Malformed input text (traces, configs).  Positions are 1-based.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, std::size_t line, std::size_t column)
        : std::runtime_error(msg + " (line " + std::to_string(line) + ", column " +
                             std::to_string(column) + ")"),
          line(line),
          column(column) {}

    std::size_t line;
    std::size_t column;
};

// Structurally valid input that violates a documented constraint.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// A link cost or attribute was requested for a link that does not exist.
class MissingLinkError : public std::runtime_error {
public:
    MissingLinkError(int tail, int head)
        : std::runtime_error("no usable link " + std::to_string(tail) + " -> " +
                             std::to_string(head)),
          tail(tail),
          head(head) {}

    int tail;
    int head;
};

}  // namespace fmn
