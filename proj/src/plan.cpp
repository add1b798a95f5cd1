#include "homeplan/plan.hpp"

#include <algorithm>
#include <optional>

#include "homeplan/schema.hpp"

namespace homeplan {

std::string_view to_string(ParseErrorKind kind) {
  switch (kind) {
    case ParseErrorKind::UnexpectedToken: return "UnexpectedToken";
    case ParseErrorKind::UnterminatedString: return "UnterminatedString";
    case ParseErrorKind::MissingParen: return "MissingParen";
    case ParseErrorKind::TrailingGarbage: return "TrailingGarbage";
  }
  return "?";
}

namespace {

bool is_ident_start(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
}
bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }
bool is_inline_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v'; }
bool is_space(char c) { return is_inline_space(c) || c == '\n'; }

bool whitespace_only(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return is_space(c); });
}

struct StepFailure {
  ParseError error;
  std::size_t resume;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  ParseResult run() {
    ParseResult result;
    while (true) {
      skip_while(is_space);
      if (eof()) break;

      auto step = parse_step();
      if (!step) {
        result.errors.push_back(failure_->error);
        pos_ = std::max(failure_->resume, pos_);
        failure_.reset();
        continue;
      }
      result.plan.steps.push_back(std::move(*step));

      skip_while(is_inline_space);
      if (eof()) break;
      if (peek() == '\n') continue;
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      std::size_t begin = pos_;
      std::size_t eol = line_end(pos_);
      result.errors.push_back({"unexpected text after step", {begin, eol}, ParseErrorKind::TrailingGarbage});
      pos_ = eol;
    }
    if (!result.errors.empty()) result.plan.steps.clear();
    return result;
  }

 private:
  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  template <typename Pred>
  void skip_while(Pred pred) {
    while (!eof() && pred(peek())) ++pos_;
  }

  std::size_t line_end(std::size_t from) const {
    auto nl = text_.find('\n', from);
    return nl == std::string_view::npos ? text_.size() : nl;
  }

  // Byte length of the character starting at `at`, clamped to the input.
  std::size_t char_len(std::size_t at) const {
    auto lead = static_cast<unsigned char>(text_[at]);
    std::size_t n = lead < 0x80 ? 1 : lead >= 0xF0 ? 4 : lead >= 0xE0 ? 3 : lead >= 0xC0 ? 2 : 1;
    return std::min(n, text_.size() - at);
  }

  Span token_span(std::size_t at) const {
    if (at >= text_.size()) return {text_.size(), text_.size()};
    if (is_ident_start(text_[at])) {
      std::size_t end = at;
      while (end < text_.size() && is_ident_char(text_[end])) ++end;
      return {at, end};
    }
    return {at, at + char_len(at)};
  }

  std::optional<ActionCall> fail(ParseErrorKind kind, std::string message, Span span,
                                 std::optional<std::size_t> resume = std::nullopt) {
    std::size_t r = resume ? *resume : line_end(span.begin);
    failure_ = StepFailure{{std::move(message), span, kind}, r};
    return std::nullopt;
  }

  std::string describe(std::size_t at) const {
    if (at >= text_.size()) return "end of input";
    if (text_[at] == '\n') return "end of line";
    auto s = token_span(at);
    return "'" + std::string(text_.substr(s.begin, s.end - s.begin)) + "'";
  }

  std::optional<ActionCall> parse_step() {
    const std::size_t start = pos_;
    if (!is_ident_start(peek())) {
      return fail(ParseErrorKind::UnexpectedToken, "expected action name, found " + describe(pos_),
                  token_span(pos_));
    }
    ActionCall call;
    while (!eof() && is_ident_char(peek())) ++pos_;
    call.name = std::string(text_.substr(start, pos_ - start));

    skip_while(is_inline_space);
    if (eof() || peek() == '\n' || peek() == ',') {
      return fail(ParseErrorKind::MissingParen, "expected '(' after " + call.name, token_span(pos_),
                  pos_);
    }
    if (peek() != '(') {
      return fail(ParseErrorKind::UnexpectedToken,
                  "expected '(' after " + call.name + ", found " + describe(pos_), token_span(pos_));
    }
    const std::size_t open = pos_++;

    skip_while(is_space);
    if (!eof() && peek() == ')') {
      ++pos_;
      call.span = {start, pos_};
      return call;
    }

    while (true) {
      skip_while(is_space);
      if (eof()) return missing_close(open);
      const char c = peek();
      if (c == '\'') {
        auto arg = parse_string();
        if (!arg) return std::nullopt;
        call.args.push_back(std::move(*arg));
      } else if (c == '"') {
        return fail(ParseErrorKind::UnexpectedToken, "double-quoted strings are not allowed; use single quotes",
                    token_span(pos_));
      } else if (is_ident_start(c) && call.args.empty()) {
        return missing_close(open);
      } else {
        return fail(ParseErrorKind::UnexpectedToken, "expected string argument, found " + describe(pos_),
                    token_span(pos_));
      }

      skip_while(is_space);
      if (eof() || is_ident_start(peek())) return missing_close(open);
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      if (peek() == ')') {
        ++pos_;
        call.span = {start, pos_};
        return call;
      }
      return fail(ParseErrorKind::UnexpectedToken, "expected ',' or ')', found " + describe(pos_),
                  token_span(pos_));
    }
  }

  // Reports a call left open at `open`. When the unclosed call runs into the
  // next line, parsing resumes there so the following step is still checked.
  std::optional<ActionCall> missing_close(std::size_t open) {
    const std::size_t here = pos_;
    const bool crossed_line = text_.substr(open, here - open).find('\n') != std::string_view::npos;
    std::optional<std::size_t> resume;
    if (crossed_line || eof()) resume = here;
    Span span = eof() ? Span{text_.size(), text_.size()} : token_span(here);
    return fail(ParseErrorKind::MissingParen, "expected ')' to close call opened at offset " + std::to_string(open),
                span, resume);
  }

  std::optional<std::string> parse_string() {
    const std::size_t quote = pos_++;
    std::string value;
    while (true) {
      if (eof()) {
        fail(ParseErrorKind::UnterminatedString, "unterminated string literal", {quote, text_.size()},
             text_.size());
        return std::nullopt;
      }
      const char c = peek();
      if (c == '\n') {
        fail(ParseErrorKind::UnterminatedString, "unterminated string literal", {quote, pos_}, pos_ + 1);
        return std::nullopt;
      }
      if (c == '\'') {
        ++pos_;
        break;
      }
      if (c == '\\') {
        if (pos_ + 1 < text_.size() && (text_[pos_ + 1] == '\'' || text_[pos_ + 1] == '\\')) {
          value.push_back(text_[pos_ + 1]);
          pos_ += 2;
          continue;
        }
        std::size_t end = pos_ + 1 < text_.size() ? pos_ + 1 + char_len(pos_ + 1) : text_.size();
        fail(ParseErrorKind::UnexpectedToken, "unknown escape sequence", {pos_, end});
        return std::nullopt;
      }
      value.push_back(c);
      ++pos_;
    }
    if (whitespace_only(value)) value.clear();
    return value;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::optional<StepFailure> failure_;
};

void append_quoted(std::string& out, std::string_view arg) {
  out.push_back('\'');
  for (char c : arg) {
    if (c == '\'' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('\'');
}

}  // namespace

ParseResult parse_plan(std::string_view text) { return Parser(text).run(); }

bool is_identifier(std::string_view s) {
  return !s.empty() && is_ident_start(s.front()) && std::all_of(s.begin(), s.end(), is_ident_char);
}

std::string print_canonical(const ActionCall& call) {
  std::string out;
  const ActionSchema* schema = schema_registry().find(call.name);
  out += schema ? schema->canonical_name : call.name;
  out.push_back('(');
  for (std::size_t i = 0; i < call.args.size(); ++i) {
    if (i) out += ", ";
    append_quoted(out, call.args[i]);
  }
  out.push_back(')');
  return out;
}

std::string print_canonical(const Plan& plan) {
  std::string out;
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    if (i) out.push_back('\n');
    out += print_canonical(plan.steps[i]);
  }
  return out;
}

LineCol line_col(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  LineCol lc;
  for (std::size_t i = 0; i < offset; ++i) {
    if (text[i] == '\n') {
      ++lc.line;
      lc.column = 1;
    } else {
      ++lc.column;
    }
  }
  return lc;
}

}  // namespace homeplan
