#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "netinfer/datalog/ast.hpp"

namespace netinfer::dl {

/// Raised for malformed source. Line and column are 1-based.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& message);

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }
    const std::string& detail() const { return detail_; }

private:
    std::size_t line_;
    std::size_t column_;
    std::string detail_;
};

/// Parses rules and facts in any interleaving. Grammar:
///
///   program  := clause*
///   clause   := literal ( ":-" body )? "."
///   body     := body_lit ( "," body_lit )*
///   body_lit := "not" literal | literal
///   literal  := pred ( "(" term ( "," term )* ")" )?
///   term     := "?" name | "\"" chars "\"" | ["-"] digits
///
/// '%' starts a comment that runs to the end of the line. Structurally equal
/// rules are kept once.
Program parse_program(std::string_view source);

/// Parses a file that may only contain ground facts.
std::vector<Literal> parse_fact_file(std::string_view source);

/// Parses one literal, e.g. a query pattern `msg_flow(?s, "HXP_106")`.
/// A trailing '.' is optional.
Literal parse_literal(std::string_view source);

}  // namespace netinfer::dl
