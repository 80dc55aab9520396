#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "ldbj/term.hpp"

namespace ldbj {

class SyntaxError : public std::runtime_error {
public:
    SyntaxError(int line, int column, const std::string& what)
        : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
          line_(line), column_(column) {}

    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

// Reads clauses and ':- Goal.' directives. Variables are renamed apart per
// clause; ids are unique across the whole program and start at first_var_id.
Program parse_program(std::string_view text, std::int64_t first_var_id = 1);

// Reads one term, optionally terminated by '.'. Variable hints keep the
// source names; '_' is always a fresh variable.
Term parse_term(std::string_view text, std::int64_t first_var_id = 1);

}  // namespace ldbj
