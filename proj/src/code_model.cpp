#include "hyloc/code_model.hpp"

#include <algorithm>
#include <array>
#include <unordered_set>

#include "json.hpp"

namespace hyloc {

namespace {

constexpr std::array<std::string_view, 7> kTokenKindNames = {
    "identifier", "keyword", "number_literal", "string_literal", "char_literal", "operator", "punctuation",
};

constexpr std::array<std::string_view, kLineTypeCount> kLineTypeNames = {
    "method_signature", "control_flow",   "return_stmt",       "declaration_assignment",
    "call_stmt",        "brace_or_empty", "import_or_include", "other",
};

const std::unordered_set<std::string_view>& java_keywords() {
    static const std::unordered_set<std::string_view> words = {
        "abstract", "assert",     "boolean",   "break",      "byte",      "case",     "catch",
        "char",     "class",      "const",     "continue",   "default",   "do",       "double",
        "else",     "enum",       "extends",   "final",      "finally",   "float",    "for",
        "goto",     "if",         "implements", "import",    "instanceof", "int",     "interface",
        "long",     "native",     "new",       "package",    "private",   "protected", "public",
        "return",   "short",      "static",    "strictfp",   "super",     "switch",   "synchronized",
        "this",     "throw",      "throws",    "transient",  "try",       "void",     "volatile",
        "while",    "true",       "false",     "null",
    };
    return words;
}

const std::unordered_set<std::string_view>& c_keywords() {
    static const std::unordered_set<std::string_view> words = {
        // C11
        "auto", "break", "case", "char", "const", "continue", "default", "do", "double", "else", "enum",
        "extern", "float", "for", "goto", "if", "inline", "int", "long", "register", "restrict", "return",
        "short", "signed", "sizeof", "static", "struct", "switch", "typedef", "union", "unsigned", "void",
        "volatile", "while", "_Bool", "_Complex", "_Imaginary", "_Alignas", "_Alignof", "_Atomic",
        "_Static_assert", "_Noreturn", "_Thread_local",
        // common C++ additions
        "bool", "true", "false", "nullptr", "class", "namespace", "template", "typename", "public",
        "private", "protected", "virtual", "new", "delete", "this", "throw", "try", "catch", "using",
        "operator", "friend", "const_cast", "static_cast", "dynamic_cast", "reinterpret_cast", "explicit",
        "mutable", "constexpr", "noexcept",
    };
    return words;
}

// Longest operators first so greedy matching works.
constexpr std::array<std::string_view, 27> kMultiCharOps = {
    ">>>=", "->*", "<<=", ">>=", ">>>", "...", "->", "::", "++", "--", "&&", "||", "==", "!=", "<=",
    ">=",   "+=",  "-=",  "*=",  "/=",  "%=", "&=", "|=", "^=", "<<", ">>", "##",
};

constexpr std::string_view kPunctuation = "(){}[];,.@#";

bool is_ident_start(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == '$' || c >= 0x80;
}

bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }

bool is_ident_char(unsigned char c) { return is_ident_start(c) || is_digit(c); }

class Lexer {
public:
    Lexer(std::string_view src, Language lang, std::string_view file, std::vector<Diagnostic>* diags)
        : src_(src), lang_(lang), file_(file), diags_(diags) {}

    std::vector<LineRecord> run() {
        open_line();
        while (pos_ < src_.size()) {
            const unsigned char c = static_cast<unsigned char>(src_[pos_]);
            if (c == '\n') {
                ++pos_;
                if (pos_ < src_.size()) open_line();
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') {
                ++pos_;
            } else if (starts_with("//")) {
                skip_line_comment();
            } else if (starts_with("/*")) {
                skip_block_comment();
            } else if (lang_ == Language::java_like && starts_with("\"\"\"")) {
                lex_text_block();
            } else if (c == '"') {
                lex_quoted('"', TokenKind::string_literal);
            } else if (c == '\'') {
                lex_quoted('\'', TokenKind::char_literal);
            } else if (is_digit(c) || (c == '.' && pos_ + 1 < src_.size() && is_digit(src_[pos_ + 1]))) {
                lex_number();
            } else if (is_ident_start(c)) {
                lex_word();
            } else {
                lex_symbol();
            }
        }
        for (auto& line : lines_) line.line_type = classify_line_type(line.tokens);
        return std::move(lines_);
    }

private:
    bool starts_with(std::string_view s) const { return src_.substr(pos_, s.size()) == s; }

    void open_line() {
        LineRecord rec;
        rec.file = std::string(file_);
        rec.line_no = static_cast<int>(lines_.size()) + 1;
        lines_.push_back(std::move(rec));
    }

    int current_line() const { return static_cast<int>(lines_.size()); }

    void emit(std::size_t begin, std::size_t end, TokenKind kind) {
        lines_.back().tokens.push_back({std::string(src_.substr(begin, end - begin)), kind});
    }

    void report(int line, const std::string& message) {
        if (!diags_) throw TokenizeError(std::string(file_), line, message);
        diags_->push_back({std::string(file_), line, message});
    }

    void skip_line_comment() {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
    }

    void skip_block_comment() {
        const int start_line = current_line();
        pos_ += 2;
        while (pos_ < src_.size()) {
            if (starts_with("*/")) {
                pos_ += 2;
                return;
            }
            if (src_[pos_] == '\n' && pos_ + 1 < src_.size()) open_line();
            ++pos_;
        }
        report(start_line, "unterminated block comment");
    }

    // Single-line literal; a newline before the closing quote is an error
    // and the literal is closed at end of line.
    void lex_quoted(char quote, TokenKind kind) {
        const std::size_t begin = pos_++;
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (c == '\\' && pos_ + 1 < src_.size() && src_[pos_ + 1] != '\n') {
                pos_ += 2;
                continue;
            }
            if (c == '\n') break;
            ++pos_;
            if (c == quote) {
                emit(begin, pos_, kind);
                return;
            }
        }
        std::size_t end = pos_;
        while (end > begin + 1 && (src_[end - 1] == '\r')) --end;
        emit(begin, end, kind);
        report(current_line(), kind == TokenKind::string_literal ? "unterminated string literal"
                                                                 : "unterminated char literal");
    }

    void lex_text_block() {
        const std::size_t begin = pos_;
        const int start_line = current_line();
        pos_ += 3;
        int newlines = 0;
        while (pos_ < src_.size()) {
            if (src_[pos_] == '\\' && pos_ + 1 < src_.size()) {
                if (src_[pos_ + 1] == '\n') ++newlines;
                pos_ += 2;
                continue;
            }
            if (starts_with("\"\"\"")) {
                pos_ += 3;
                lines_[static_cast<std::size_t>(start_line - 1)].tokens.push_back(
                    {std::string(src_.substr(begin, pos_ - begin)), TokenKind::string_literal});
                for (int i = 0; i < newlines; ++i) open_line();
                return;
            }
            if (src_[pos_] == '\n') ++newlines;
            ++pos_;
        }
        lines_[static_cast<std::size_t>(start_line - 1)].tokens.push_back(
            {std::string(src_.substr(begin, pos_ - begin)), TokenKind::string_literal});
        // a trailing newline does not start a new physical line
        if (!src_.empty() && src_.back() == '\n' && newlines > 0) --newlines;
        for (int i = 0; i < newlines; ++i) open_line();
        report(start_line, "unterminated text block");
    }

    void lex_number() {
        const std::size_t begin = pos_;
        const bool hex = starts_with("0x") || starts_with("0X");
        while (pos_ < src_.size()) {
            const unsigned char c = static_cast<unsigned char>(src_[pos_]);
            if (is_ident_char(c) && c != '$' && c < 0x80) {
                ++pos_;
            } else if (c == '.') {
                ++pos_;
            } else if ((c == '+' || c == '-') && pos_ > begin) {
                const char prev = src_[pos_ - 1];
                const bool exponent = hex ? (prev == 'p' || prev == 'P') : (prev == 'e' || prev == 'E');
                if (!exponent) break;
                ++pos_;
            } else {
                break;
            }
        }
        emit(begin, pos_, TokenKind::number_literal);
    }

    void lex_word() {
        const std::size_t begin = pos_;
        while (pos_ < src_.size() && is_ident_char(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        const std::string_view word = src_.substr(begin, pos_ - begin);
        emit(begin, pos_, is_keyword(word, lang_) ? TokenKind::keyword : TokenKind::identifier);
    }

    void lex_symbol() {
        const std::size_t begin = pos_;
        for (std::string_view op : kMultiCharOps) {
            if (starts_with(op)) {
                pos_ += op.size();
                emit(begin, pos_, op == "..." ? TokenKind::punctuation : TokenKind::op);
                return;
            }
        }
        const char c = src_[pos_++];
        // keep a UTF-8 sequence together
        if (static_cast<unsigned char>(c) >= 0x80) {
            while (pos_ < src_.size() && (static_cast<unsigned char>(src_[pos_]) & 0xC0) == 0x80) ++pos_;
        }
        emit(begin, pos_, kPunctuation.find(c) != std::string_view::npos ? TokenKind::punctuation : TokenKind::op);
    }

    std::string_view src_;
    Language lang_;
    std::string_view file_;
    std::vector<Diagnostic>* diags_;
    std::size_t pos_ = 0;
    std::vector<LineRecord> lines_;
};

// ---- line classification ----

bool in(std::string_view s, std::initializer_list<std::string_view> set) {
    return std::find(set.begin(), set.end(), s) != set.end();
}

bool is_control_keyword(std::string_view s) {
    return in(s, {"if", "else", "for", "while", "do", "switch", "case", "default", "break", "continue", "try",
                  "catch", "finally", "throw", "goto"});
}

bool is_type_or_modifier_keyword(std::string_view s) {
    return in(s, {"void",     "int",       "long",      "short",    "byte",    "char",     "boolean",  "float",
                  "double",   "bool",      "unsigned",  "signed",   "const",   "static",   "public",   "private",
                  "protected", "final",    "abstract",  "synchronized", "native", "inline", "extern", "virtual",
                  "struct",   "enum",      "union",     "strictfp", "transient", "volatile", "constexpr",
                  "explicit", "auto",      "register"});
}

bool is_assignment_op(std::string_view s) {
    return in(s, {"=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>=", ">>>="});
}

// Tokens that may appear inside a return type or parameterized type.
bool is_type_syntax(const Token& t) {
    return in(t.text, {"<", ">", ">>", ">>>", "*", "&", "&&", "::", "~", "?", "[", "]", ",", ".", "@"});
}

bool looks_like_method_signature(const std::vector<Token>& tokens) {
    const auto paren = std::find_if(tokens.begin(), tokens.end(), [](const Token& t) { return t.text == "("; });
    if (paren == tokens.end()) return false;
    const auto p = static_cast<std::size_t>(paren - tokens.begin());
    if (p < 2) return false;
    const Token& first = tokens.front();
    if (is_control_keyword(first.text) || in(first.text, {"return", "new", "#", "import", "package", "assert"}))
        return false;
    const Token& name = tokens[p - 1];
    const Token& before = tokens[p - 2];
    if (name.kind != TokenKind::identifier) return false;
    const bool type_like = before.kind == TokenKind::identifier ||
                           (before.kind == TokenKind::keyword && is_type_or_modifier_keyword(before.text)) ||
                           in(before.text, {">", ">>", ">>>", "]", "*", "&", "&&", "::", "~"});
    if (!type_like) return false;
    for (std::size_t i = 0; i < p; ++i) {
        const Token& t = tokens[i];
        if (t.kind == TokenKind::keyword && !is_type_or_modifier_keyword(t.text)) return false;
        if ((t.kind == TokenKind::op || t.kind == TokenKind::punctuation) && !is_type_syntax(t)) return false;
    }
    const std::string_view last = tokens.back().text;
    if (last == "{" || last == ")") return true;
    if (std::any_of(paren, tokens.end(), [](const Token& t) { return t.text == "throws"; })) return true;
    // prototype / abstract declaration: "void f(int x);"
    return last == ";" && tokens[p - 2].text != "." &&
           (tokens.front().kind == TokenKind::keyword || before.kind == TokenKind::keyword || p >= 3);
}

bool starts_with_control(const std::vector<Token>& tokens) {
    for (const Token& t : tokens) {
        if (t.text == "}") continue;
        return is_control_keyword(t.text);
    }
    return false;
}

bool looks_like_declaration(const std::vector<Token>& tokens) {
    if (std::any_of(tokens.begin(), tokens.end(), [](const Token& t) {
            return t.kind == TokenKind::op && is_assignment_op(t.text);
        }))
        return true;
    if (tokens.size() < 3 || tokens.back().text != ";") return false;
    bool saw_type_then_name = false;
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
        const Token& t = tokens[i];
        if (t.kind == TokenKind::keyword && !is_type_or_modifier_keyword(t.text)) return false;
        if ((t.kind == TokenKind::op || t.kind == TokenKind::punctuation) && !is_type_syntax(t)) return false;
        if (t.kind == TokenKind::string_literal || t.kind == TokenKind::number_literal ||
            t.kind == TokenKind::char_literal)
            return false;
        const Token& next = tokens[i + 1];
        const bool type_like = t.kind == TokenKind::identifier || t.kind == TokenKind::keyword ||
                               in(t.text, {">", ">>", ">>>", "]", "*"});
        if (type_like && next.kind == TokenKind::identifier) saw_type_then_name = true;
    }
    return saw_type_then_name;
}

}  // namespace

std::string_view to_string(TokenKind kind) { return kTokenKindNames[static_cast<std::size_t>(kind)]; }

TokenKind parse_token_kind(std::string_view text) {
    for (std::size_t i = 0; i < kTokenKindNames.size(); ++i)
        if (kTokenKindNames[i] == text) return static_cast<TokenKind>(i);
    throw DataError("unknown token kind '" + std::string(text) + "'");
}

std::string_view to_string(LineType type) { return kLineTypeNames[static_cast<std::size_t>(type)]; }

LineType parse_line_type(std::string_view text) {
    for (std::size_t i = 0; i < kLineTypeNames.size(); ++i)
        if (kLineTypeNames[i] == text) return static_cast<LineType>(i);
    throw DataError("unknown line type '" + std::string(text) + "'");
}

TokenizeError::TokenizeError(std::string file, int line_no, const std::string& message)
    : DataError((file.empty() ? std::string("<input>") : file) + ":" + std::to_string(line_no) + ": " + message),
      file_(std::move(file)),
      line_no_(line_no) {}

bool is_keyword(std::string_view word, Language lang) {
    return lang == Language::java_like ? java_keywords().contains(word) : c_keywords().contains(word);
}

std::vector<LineRecord> tokenize(std::string_view source, Language lang, std::string_view file,
                                 std::vector<Diagnostic>* diagnostics) {
    if (source.empty()) return {};
    return Lexer(source, lang, file, diagnostics).run();
}

LineType classify_line_type(const std::vector<Token>& tokens) {
    if (tokens.empty()) return LineType::brace_or_empty;
    if (looks_like_method_signature(tokens)) return LineType::method_signature;
    if (starts_with_control(tokens)) return LineType::control_flow;
    if (tokens.front().text == "return") return LineType::return_stmt;
    if (in(tokens.front().text, {"#", "import", "package"})) return LineType::import_or_include;
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
        const Token& t = tokens[i];
        const bool callee = t.kind == TokenKind::identifier || t.text == "this" || t.text == "super";
        if (callee && tokens[i + 1].text == "(") return LineType::call_stmt;
    }
    if (looks_like_declaration(tokens)) return LineType::declaration_assignment;
    if (std::all_of(tokens.begin(), tokens.end(),
                    [](const Token& t) { return in(t.text, {"{", "}", ";", "(", ")"}); }))
        return LineType::brace_or_empty;
    return LineType::other;
}

std::string to_jsonl(const std::vector<LineRecord>& lines) {
    std::string out;
    for (const auto& line : lines) {
        nlohmann::json tokens = nlohmann::json::array();
        for (const auto& t : line.tokens) tokens.push_back({{"text", t.text}, {"kind", to_string(t.kind)}});
        nlohmann::json obj = {{"file", line.file},
                              {"line_no", line.line_no},
                              {"line_type", to_string(line.line_type)},
                              {"tokens", std::move(tokens)}};
        out += obj.dump();
        out += '\n';
    }
    return out;
}

std::vector<LineRecord> from_jsonl(std::string_view text) {
    std::vector<LineRecord> lines;
    std::size_t pos = 0;
    int row = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        const std::string_view row_text = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++row;
        if (row_text.find_first_not_of(" \t\r") == std::string_view::npos) continue;
        try {
            const auto obj = nlohmann::json::parse(row_text);
            LineRecord rec;
            rec.file = obj.at("file").get<std::string>();
            rec.line_no = obj.at("line_no").get<int>();
            for (const auto& t : obj.at("tokens"))
                rec.tokens.push_back({t.at("text").get<std::string>(), parse_token_kind(t.at("kind").get<std::string>())});
            rec.line_type = obj.contains("line_type") ? parse_line_type(obj.at("line_type").get<std::string>())
                                                      : classify_line_type(rec.tokens);
            lines.push_back(std::move(rec));
        } catch (const nlohmann::json::exception& e) {
            throw DataError("token dump row " + std::to_string(row) + ": " + e.what());
        }
    }
    return lines;
}

}  // namespace hyloc
