#include "ldbj/reader.hpp"

#include <cctype>
#include <charconv>
#include <map>
#include <optional>
#include <vector>

#include "ldbj/builtins.hpp"
#include "ldbj/operators.hpp"

namespace ldbj {

namespace {

enum class Tok { Name, QuotedName, Var, Int, Punct, End, Eof };

struct Token {
    Tok kind = Tok::Eof;
    std::string text;
    std::int64_t value = 0;
    int line = 1;
    int column = 1;
    bool layout_before = false;
};

constexpr std::string_view kSymbolChars = "+-*/\\^<>=~:.?@#&$";

bool is_symbol_char(char c) { return kSymbolChars.find(c) != std::string_view::npos; }
bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::string describe(const Token& t) {
    switch (t.kind) {
    case Tok::Eof: return "end of input";
    case Tok::End: return "'.'";
    case Tok::Int: return "integer " + std::to_string(t.value);
    case Tok::Var: return "variable " + t.text;
    default: return "'" + t.text + "'";
    }
}

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        Token t;
        t.layout_before = skip_layout();
        t.line = line_;
        t.column = col_;
        if (pos_ >= src_.size()) return t;
        char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
            t.kind = Tok::Int;
            t.text = std::string(src_.substr(start, pos_ - start));
            auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.value);
            if (ec != std::errc()) fail(t, "integer out of range");
            return t;
        }
        if (std::isupper(static_cast<unsigned char>(c)) || c == '_') {
            t.kind = Tok::Var;
            t.text = take_while(is_alnum);
            return t;
        }
        if (std::islower(static_cast<unsigned char>(c))) {
            t.kind = Tok::Name;
            t.text = take_while(is_alnum);
            return t;
        }
        if (c == '\'') {
            t.kind = Tok::QuotedName;
            t.text = quoted(t);
            return t;
        }
        if (c == '.' && end_follows(pos_ + 1)) {
            advance();
            t.kind = Tok::End;
            t.text = ".";
            return t;
        }
        if (c == '(' || c == ')' || c == '[' || c == ']' || c == '|' || c == ',') {
            advance();
            t.kind = Tok::Punct;
            t.text = std::string(1, c);
            return t;
        }
        if (c == ';' || c == '!') {
            advance();
            t.kind = Tok::Name;
            t.text = std::string(1, c);
            return t;
        }
        if (is_symbol_char(c)) {
            t.kind = Tok::Name;
            t.text = take_while(is_symbol_char);
            return t;
        }
        fail(t, std::string("unexpected character '") + c + "'");
    }

    [[noreturn]] void fail(const Token& at, const std::string& msg) const {
        throw SyntaxError(at.line, at.column, msg);
    }

private:
    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    template <class Pred>
    std::string take_while(Pred p) {
        std::size_t start = pos_;
        while (pos_ < src_.size() && p(src_[pos_])) advance();
        return std::string(src_.substr(start, pos_ - start));
    }

    bool end_follows(std::size_t at) const {
        return at >= src_.size() || std::isspace(static_cast<unsigned char>(src_[at])) || src_[at] == '%';
    }

    bool skip_layout() {
        bool skipped = false;
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '%') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '*') {
                Token at{Tok::Eof, {}, 0, line_, col_, false};
                advance();
                advance();
                while (pos_ + 1 < src_.size() && !(src_[pos_] == '*' && src_[pos_ + 1] == '/')) advance();
                if (pos_ + 1 >= src_.size()) fail(at, "unterminated block comment");
                advance();
                advance();
            } else {
                break;
            }
            skipped = true;
        }
        return skipped;
    }

    std::string quoted(const Token& at) {
        advance();
        std::string out;
        while (true) {
            if (pos_ >= src_.size()) fail(at, "unterminated quoted atom");
            char c = src_[pos_];
            if (c == '\'') {
                if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '\'') {
                    out += '\'';
                    advance();
                    advance();
                    continue;
                }
                advance();
                return out;
            }
            if (c == '\\') {
                advance();
                if (pos_ >= src_.size()) fail(at, "unterminated quoted atom");
                char e = src_[pos_];
                switch (e) {
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                case '\\': out += '\\'; break;
                case '\'': out += '\''; break;
                default: fail(at, std::string("unknown escape \\") + e);
                }
                advance();
                continue;
            }
            out += c;
            advance();
        }
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

class Parser {
public:
    Parser(std::string_view src, std::int64_t first_var_id) : lex_(src), next_id_(first_var_id) {
        tok_ = lex_.next();
        peek_ = lex_.next();
    }

    bool at_eof() const { return tok_.kind == Tok::Eof; }

    void begin_clause() { names_.clear(); }

    // Returns the term read up to its terminating '.'.
    Term read_clause_term(bool& directive) {
        directive = false;
        if (tok_.kind == Tok::Name && tok_.text == ":-" && !(peek_.kind == Tok::Punct && peek_.text == "(" && !peek_.layout_before)) {
            directive = true;
            shift();
            Term goal = parse(1199).term;
            expect_end();
            return goal;
        }
        Term t = parse(1200).term;
        expect_end();
        return t;
    }

    Term read_single_term() {
        Term t = parse(1200).term;
        if (tok_.kind == Tok::End) shift();
        if (tok_.kind != Tok::Eof) lex_.fail(tok_, "expected end of input, got " + describe(tok_));
        return t;
    }

    [[noreturn]] void fail_here(const std::string& msg) const { lex_.fail(tok_, msg); }
    const Token& current() const { return tok_; }

private:
    struct Parsed {
        Term term;
        int priority;
    };

    void shift() {
        tok_ = std::move(peek_);
        peek_ = lex_.next();
    }

    void expect_end() {
        if (tok_.kind != Tok::End) lex_.fail(tok_, "expected operator or '.', got " + describe(tok_));
        shift();
    }

    void expect_punct(std::string_view p) {
        if (tok_.kind != Tok::Punct || tok_.text != p)
            lex_.fail(tok_, "expected '" + std::string(p) + "', got " + describe(tok_));
        shift();
    }

    bool at_punct(std::string_view p) const { return tok_.kind == Tok::Punct && tok_.text == p; }

    Term variable(const std::string& name) {
        if (name == "_") return Term::var(next_id_++, "_");
        auto [it, fresh] = names_.try_emplace(name, Term());
        if (fresh) it->second = Term::var(next_id_++, name);
        return it->second;
    }

    std::vector<Term> arglist() {
        std::vector<Term> args;
        args.push_back(parse(999).term);
        while (at_punct(",")) {
            shift();
            args.push_back(parse(999).term);
        }
        expect_punct(")");
        return args;
    }

    Parsed primary(int max_priority) {
        Token t = tok_;
        switch (t.kind) {
        case Tok::Int:
            shift();
            return {Term::integer(t.value), 0};
        case Tok::Var:
            shift();
            return {variable(t.text), 0};
        case Tok::Punct:
            if (t.text == "(") {
                shift();
                Term inner = parse(1200).term;
                expect_punct(")");
                return {inner, 0};
            }
            if (t.text == "[") {
                shift();
                if (at_punct("]")) {
                    shift();
                    return {Term::atom("[]"), 0};
                }
                std::vector<Term> items{parse(999).term};
                while (at_punct(",")) {
                    shift();
                    items.push_back(parse(999).term);
                }
                Term tail = Term::atom("[]");
                if (at_punct("|")) {
                    shift();
                    tail = parse(999).term;
                }
                expect_punct("]");
                return {make_list(items, tail), 0};
            }
            break;
        case Tok::Name:
        case Tok::QuotedName: {
            shift();
            if (at_punct("(") && !tok_.layout_before) {
                shift();
                return {Term::compound(t.text, arglist()), 0};
            }
            if (t.kind == Tok::Name && t.text == "-" && tok_.kind == Tok::Int && !tok_.layout_before) {
                std::int64_t v = -tok_.value;
                shift();
                return {Term::integer(v), 0};
            }
            int prio = 0;
            if (t.kind == Tok::Name && infix_operator(t.text)) prio = std::min(infix_operator(t.text)->priority, max_priority);
            return {Term::atom(t.text), prio};
        }
        default:
            break;
        }
        lex_.fail(t, "expected a term, got " + describe(t));
    }

    std::optional<OperatorDef> infix_here() const {
        if (tok_.kind == Tok::Name) return infix_operator(tok_.text);
        if (tok_.kind == Tok::Punct && tok_.text == ",") return infix_operator(",");
        return std::nullopt;
    }

    Parsed parse(int max_priority) {
        Parsed left = primary(max_priority);
        while (true) {
            auto op = infix_here();
            if (!op || op->priority > max_priority) break;
            int left_max = op->type == OpType::YFX ? op->priority : op->priority - 1;
            int right_max = op->type == OpType::XFY ? op->priority : op->priority - 1;
            if (left.priority > left_max) break;
            std::string name = tok_.text;
            shift();
            Parsed right = parse(right_max);
            left = {Term::compound(name, {left.term, right.term}), op->priority};
        }
        return left;
    }

    Lexer lex_;
    Token tok_;
    Token peek_;
    std::int64_t next_id_;
    std::map<std::string, Term> names_;
};

void check_goal(const Term& g, Parser& p, int line, int col) {
    if (g.is_var()) return;
    if (!g.is_callable()) throw SyntaxError(line, col, "body goal is not callable");
    if (g.is_compound(",", 2) || g.is_compound(";", 2) || g.is_compound("->", 2)) {
        check_goal(g.arg(0), p, line, col);
        check_goal(g.arg(1), p, line, col);
    }
}

}  // namespace

Program parse_program(std::string_view text, std::int64_t first_var_id) {
    Parser p(text, first_var_id);
    Program prog;
    while (!p.at_eof()) {
        p.begin_clause();
        int line = p.current().line;
        int col = p.current().column;
        bool directive = false;
        Term t = p.read_clause_term(directive);
        if (directive) {
            prog.add_directive(t);
            continue;
        }
        Clause c{t, Term::atom("true")};
        if (t.is_compound(":-", 2)) c = {t.arg(0), t.arg(1)};
        if (!c.head.is_callable()) throw SyntaxError(line, col, "clause head is not callable");
        if (is_builtin(c.key())) throw SyntaxError(line, col, "cannot redefine built-in " + c.key().str());
        check_goal(c.body, p, line, col);
        prog.add_clause(std::move(c));
    }
    return prog;
}

Term parse_term(std::string_view text, std::int64_t first_var_id) {
    Parser p(text, first_var_id);
    return p.read_single_term();
}

}  // namespace ldbj
