#pragma once

#include "borel/normalize.hpp"
#include "borel/problem.hpp"

#include <iosfwd>
#include <string>

namespace borel {

/// Problem-file error with a 1-based line and column.
class ParseError : public InvalidProblem {
public:
    ParseError(const std::string& source, int line, int column, const std::string& message);
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_, column_;
};

struct ParsedProblem {
    PDEProblem problem;
    bool from_raw = false;
    std::optional<RawEquation> raw;
};

/// Reads the sectioned text format described in docs/problem_format.md.
/// `source` only labels error messages.
ParsedProblem parse_problem_text(const std::string& text, const std::string& source = "<text>");
ParsedProblem parse_problem(const std::string& path);

/// Writes a problem in the same format (normalized form, no [raw] section).
void write_problem(std::ostream& out, const PDEProblem& problem);

}  // namespace borel
