#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "hyloc/common.hpp"

namespace hyloc {

enum class TokenKind {
    identifier,
    keyword,
    number_literal,
    string_literal,
    char_literal,
    op,
    punctuation,
};

std::string_view to_string(TokenKind kind);
TokenKind parse_token_kind(std::string_view text);

struct Token {
    std::string text;
    TokenKind kind = TokenKind::identifier;

    bool operator==(const Token&) const = default;
};

enum class LineType {
    method_signature,
    control_flow,
    return_stmt,
    declaration_assignment,
    call_stmt,
    brace_or_empty,
    import_or_include,
    other,
};

inline constexpr int kLineTypeCount = 8;

std::string_view to_string(LineType type);
LineType parse_line_type(std::string_view text);

struct LineRecord {
    std::string file;
    int line_no = 1;
    std::vector<Token> tokens;
    LineType line_type = LineType::brace_or_empty;

    LineKey key() const { return {file, line_no}; }
};

// A lexical problem the tokenizer recovered from.
struct Diagnostic {
    std::string file;
    int line_no = 0;
    std::string message;
};

class TokenizeError : public DataError {
public:
    TokenizeError(std::string file, int line_no, const std::string& message);
    const std::string& file() const noexcept { return file_; }
    int line_no() const noexcept { return line_no_; }

private:
    std::string file_;
    int line_no_;
};

// Splits source text into one LineRecord per physical line. Comments and
// whitespace are dropped; string and char literals are single tokens.
//
// An unterminated string, char literal or block comment is recoverable: when
// `diagnostics` is non-null the problem is appended there and lexing
// continues (the literal is closed at end of line, the comment at end of
// file). When it is null a TokenizeError naming the file and line is thrown.
std::vector<LineRecord> tokenize(std::string_view source, Language lang, std::string_view file = {},
                                 std::vector<Diagnostic>* diagnostics = nullptr);

// Pure token-pattern classifier. Rules are tried in precedence order
// method_signature > control_flow > return_stmt > import_or_include >
// call_stmt > declaration_assignment > brace_or_empty > other.
LineType classify_line_type(const std::vector<Token>& tokens);
inline LineType classify_line_type(const LineRecord& line) { return classify_line_type(line.tokens); }

bool is_keyword(std::string_view word, Language lang);

// One JSON object per line: {file, line_no, line_type, tokens: [{text, kind}]}.
std::string to_jsonl(const std::vector<LineRecord>& lines);
std::vector<LineRecord> from_jsonl(std::string_view text);

}  // namespace hyloc
