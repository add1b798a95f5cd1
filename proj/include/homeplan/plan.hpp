#pragma once

// Plan language: AST, parser, canonical printer.
//
// Grammar (whitespace between tokens is ignored, except that a newline
// outside a call acts as a step separator):
//
//   plan := (step sep)* step?
//   step := NAME '(' (STRING (',' STRING)*)? ')'
//   sep  := ',' | newline
//
// STRING is single-quoted with the escapes \' and \\. A literal that holds
// only whitespace is read as the empty string.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace homeplan {

struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  bool operator==(const Span&) const = default;
};

struct ActionCall {
  std::string name;
  std::vector<std::string> args;
  Span span;

  // Structural equality: spans are ignored.
  bool operator==(const ActionCall& other) const {
    return name == other.name && args == other.args;
  }
};

struct Plan {
  std::vector<ActionCall> steps;

  bool operator==(const Plan&) const = default;
  bool empty() const { return steps.empty(); }
  std::size_t size() const { return steps.size(); }
};

enum class ParseErrorKind { UnexpectedToken, UnterminatedString, MissingParen, TrailingGarbage };

std::string_view to_string(ParseErrorKind kind);

struct ParseError {
  std::string message;
  Span span;
  ParseErrorKind kind = ParseErrorKind::UnexpectedToken;
};

struct ParseResult {
  Plan plan;
  std::vector<ParseError> errors;

  bool ok() const { return errors.empty(); }
};

/// Parses plan text. Never throws on malformed input: every diagnosable
/// error is collected, and the parser resynchronizes at the next line.
ParseResult parse_plan(std::string_view text);

/// One step per line, canonical action casing from the schema registry,
/// arguments single-quoted and escaped. Unknown names print verbatim.
std::string print_canonical(const Plan& plan);
std::string print_canonical(const ActionCall& call);

bool is_identifier(std::string_view s);

struct LineCol {
  std::size_t line = 1;
  std::size_t column = 1;
};

/// 1-based line/column (columns count bytes) of a byte offset.
LineCol line_col(std::string_view text, std::size_t offset);

}  // namespace homeplan
