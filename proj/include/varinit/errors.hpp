#pragma once

#include <stdexcept>
#include <string>

namespace varinit {

// Non-finite value produced inside a numeric kernel. `where` names the
// offending quantity (gate, state, loss, ...) so callers can report it.
class numeric_overflow : public std::runtime_error {
public:
    numeric_overflow(std::string where, const std::string& what)
        : std::runtime_error(what), where_(std::move(where)) {}
    const std::string& where() const noexcept { return where_; }

private:
    std::string where_;
};

// Closed-form condition cannot be evaluated or has no admissible solution
// (e.g. a quadratic whose required root would be non-positive).
class condition_violation : public std::runtime_error {
public:
    explicit condition_violation(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input file. `line` is 1-based; 0 means "not line-addressable".
class parse_error : public std::runtime_error {
public:
    parse_error(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace varinit
