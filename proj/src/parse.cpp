#include "disco/parse.hpp"

#include <cctype>
#include <set>

namespace disco::dsl {

namespace {

const std::set<std::string> kindwords = {"taskstructure", "data", "taskflow", "state", "collab"};
const std::set<std::string> nodekws = {"task", "goal", "actor", "object", "assocclass", "state"};
const std::set<std::string> relkws = {"gen", "real", "agg", "comp", "parti", "trans"};

enum class Tok { Ident, Int, LBrace, RBrace, Semi, Comma, Eq, End, Bad };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    long value = 0;
    Span span;
};

class Lexer {
public:
    Lexer(std::string_view text, std::string filename)
        : text_(text), file_(std::move(filename)) {}

    Token next() {
        skip_trivia();
        std::size_t start = pos_;
        Token t;
        t.span = here();
        if (pos_ >= text_.size()) {
            t.kind = Tok::End;
            return finish(t);
        }
        char c = text_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c))) {
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                advance();
            t.kind = Tok::Ident;
            t.text = std::string(text_.substr(start, pos_ - start));
            return finish(t);
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            long v = 0;
            bool overflow = false;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                if (v > 100000000) overflow = true;
                else v = v * 10 + (text_[pos_] - '0');
                advance();
            }
            t.kind = overflow ? Tok::Bad : Tok::Int;
            t.value = v;
            t.text = std::string(text_.substr(start, pos_ - start));
            return finish(t);
        }
        advance();
        switch (c) {
            case '{': t.kind = Tok::LBrace; break;
            case '}': t.kind = Tok::RBrace; break;
            case ';': t.kind = Tok::Semi; break;
            case ',': t.kind = Tok::Comma; break;
            case '=': t.kind = Tok::Eq; break;
            default:
                t.kind = Tok::Bad;
                t.text = std::string(1, c);
                break;
        }
        return finish(t);
    }

private:
    void skip_trivia() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    Span here() const { return Span{file_, line_, col_, line_, col_}; }

    Token finish(Token t) {
        t.span.end_line = line_;
        t.span.end_col = col_;
        return t;
    }

    std::string_view text_;
    std::string file_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

class Parser {
public:
    Parser(std::string_view text, std::string filename)
        : lex_(text, filename), file_(std::move(filename)) {
        bump();
    }

    ParseResult run() {
        ParseResult result;
        result.doc.filename = file_;
        while (cur_.kind != Tok::End) {
            if (is_word("diagram")) parse_diagram(result);
            else if (is_word("model")) parse_model(result);
            else if (is_word("system")) parse_system(result);
            else {
                error("syntax-error", "expected 'diagram', 'model' or 'system'");
                recover_top();
            }
        }
        check_top_level_names(result);
        result.errors = std::move(errors_);
        return result;
    }

private:
    void bump() { cur_ = lex_.next(); }

    bool is_word(std::string_view w) const { return cur_.kind == Tok::Ident && cur_.text == w; }

    void error(std::string code, std::string msg) {
        errors_.push_back({std::move(code), std::move(msg), cur_.span});
    }
    void error_at(std::string code, std::string msg, Span span) {
        errors_.push_back({std::move(code), std::move(msg), std::move(span)});
    }

    bool expect(Tok kind, const char* what) {
        if (cur_.kind == kind) {
            bump();
            return true;
        }
        error("syntax-error", std::string("expected ") + what);
        return false;
    }

    bool take_ident(NameRef& out, const char* what) {
        if (cur_.kind == Tok::Ident) {
            out = {cur_.text, cur_.span};
            bump();
            return true;
        }
        error("syntax-error", std::string("expected ") + what);
        return false;
    }

    // comma-separated identifier list, at least one name
    bool take_identlist(std::vector<NameRef>& out, const char* what) {
        NameRef first;
        if (!take_ident(first, what)) return false;
        out.push_back(std::move(first));
        while (cur_.kind == Tok::Comma) {
            bump();
            NameRef next;
            if (!take_ident(next, what)) return false;
            out.push_back(std::move(next));
        }
        return true;
    }

    // skip to the next ';' (consumed) or stop before '}' / top level
    void recover_entry() {
        int depth = 0;
        while (cur_.kind != Tok::End) {
            if (cur_.kind == Tok::Semi && depth == 0) {
                bump();
                return;
            }
            if (cur_.kind == Tok::LBrace) ++depth;
            if (cur_.kind == Tok::RBrace) {
                if (depth == 0) return;
                --depth;
            }
            bump();
        }
    }

    void recover_block() {
        int depth = 1;
        while (cur_.kind != Tok::End) {
            if (cur_.kind == Tok::LBrace) ++depth;
            if (cur_.kind == Tok::RBrace && --depth == 0) {
                bump();
                return;
            }
            bump();
        }
    }

    void recover_top() {
        while (cur_.kind != Tok::End &&
               !(is_word("diagram") || is_word("model") || is_word("system")))
            bump();
    }

    void parse_diagram(ParseResult& result) {
        DiagramDecl d;
        d.span = cur_.span;
        bump();  // diagram
        if (cur_.kind == Tok::Ident && kindwords.count(cur_.text)) {
            d.kindword = cur_.text;
            bump();
        } else {
            error("syntax-error", "expected a diagram kind (taskstructure, data, taskflow, state, collab)");
            recover_top();
            return;
        }
        if (!take_ident(d.name, "a diagram name")) {
            recover_top();
            return;
        }
        if (!expect(Tok::LBrace, "'{'")) {
            recover_top();
            return;
        }
        std::set<std::pair<std::string, std::string>> node_names, rel_names;
        while (cur_.kind != Tok::RBrace && cur_.kind != Tok::End) {
            if (cur_.kind == Tok::Ident && nodekws.count(cur_.text)) {
                parse_node_entry(d, node_names);
            } else if (cur_.kind == Tok::Ident && relkws.count(cur_.text)) {
                parse_rel_entry(d, rel_names);
            } else {
                error("syntax-error", "expected an element or relationship keyword");
                recover_entry();
            }
        }
        expect(Tok::RBrace, "'}'");
        result.doc.diagrams.push_back(std::move(d));
    }

    void parse_node_entry(DiagramDecl& d, std::set<std::pair<std::string, std::string>>& seen) {
        NodeEntry e;
        e.keyword = cur_.text;
        e.span = cur_.span;
        bump();
        if (!take_identlist(e.names, "an element name")) {
            recover_entry();
            return;
        }
        if (!expect(Tok::Semi, "';'")) {
            recover_entry();
            return;
        }
        for (const auto& n : e.names)
            if (!seen.insert({e.keyword, n.name}).second)
                error_at("duplicate-element-name",
                         "duplicate " + e.keyword + " element '" + n.name + "' in diagram " +
                             d.name.name,
                         n.span);
        d.nodes.push_back(std::move(e));
    }

    void parse_rel_entry(DiagramDecl& d, std::set<std::pair<std::string, std::string>>& seen) {
        RelEntry e;
        e.keyword = cur_.text;
        e.span = cur_.span;
        bump();
        if (!take_ident(e.name, "a relationship name")) {
            recover_entry();
            return;
        }
        if (!seen.insert({e.keyword, e.name.name}).second)
            error_at("duplicate-relationship-name",
                     "duplicate " + e.keyword + " relationship '" + e.name.name + "' in diagram " +
                         d.name.name,
                     e.name.span);
        if (!expect(Tok::LBrace, "'{'")) {
            recover_entry();
            return;
        }
        std::set<std::string> fields_seen;
        while (cur_.kind != Tok::RBrace && cur_.kind != Tok::End) {
            if (cur_.kind != Tok::Ident) {
                error("syntax-error", "expected a relationship field");
                recover_block();
                d.rels.push_back(std::move(e));
                return;
            }
            parse_rel_field(e, fields_seen);
        }
        expect(Tok::RBrace, "'}'");
        d.rels.push_back(std::move(e));
    }

    void parse_rel_field(RelEntry& e, std::set<std::string>& seen) {
        FieldAssign f;
        f.field = cur_.text;
        f.span = cur_.span;
        static const std::set<std::string> single = {"head", "tact", "user", "source", "target"};
        if (single.count(f.field)) {
            bump();
            NameRef v;
            if (!take_ident(v, "an element name") || !expect(Tok::Semi, "';'")) {
                recover_entry();
                return;
            }
            f.values.push_back(std::move(v));
        } else if (f.field == "tail") {
            bump();
            if (!take_identlist(f.values, "an element name") || !expect(Tok::Semi, "';'")) {
                recover_entry();
                return;
            }
        } else if (f.field == "expect") {
            bump();
            if (!is_word("tail")) {
                error("syntax-error", "expected 'tail' after 'expect'");
                recover_entry();
                return;
            }
            bump();
            if (!expect(Tok::Eq, "'='")) {
                recover_entry();
                return;
            }
            if (cur_.kind != Tok::Int) {
                error("syntax-error", "expected a non-negative integer");
                recover_entry();
                return;
            }
            f.number = cur_.value;
            bump();
            if (!expect(Tok::Semi, "';'")) {
                recover_entry();
                return;
            }
        } else {
            error("syntax-error", "unknown relationship field '" + f.field + "'");
            recover_entry();
            return;
        }
        if (!seen.insert(f.field).second)
            error_at("duplicate-field", "duplicate field '" + f.field + "' in relationship " +
                                            e.name.name,
                     f.span);
        e.fields.push_back(std::move(f));
    }

    void parse_model(ParseResult& result) {
        ModelDecl m;
        m.span = cur_.span;
        bump();  // model
        if (cur_.kind == Tok::Ident && kindwords.count(cur_.text)) {
            m.kindword = cur_.text;
            bump();
        } else {
            error("syntax-error", "expected a model kind (taskstructure, data, taskflow, state, collab)");
            recover_top();
            return;
        }
        if (!take_ident(m.name, "a model name") || !expect(Tok::LBrace, "'{'")) {
            recover_top();
            return;
        }
        if (!is_word("diagrams")) {
            error("syntax-error", "expected 'diagrams'");
            recover_block();
            return;
        }
        bump();
        if (!take_identlist(m.diagrams, "a diagram name") || !expect(Tok::Semi, "';'")) {
            recover_block();
            return;
        }
        while (is_word("shared")) {
            SharedDecl s;
            s.span = cur_.span;
            bump();
            if (cur_.kind == Tok::Ident && nodekws.count(cur_.text)) {
                s.keyword = cur_.text;
                bump();
            } else {
                error("syntax-error", "expected an element keyword after 'shared'");
                recover_entry();
                continue;
            }
            if (!take_identlist(s.names, "an element name") || !expect(Tok::Semi, "';'")) {
                recover_entry();
                continue;
            }
            m.shared.push_back(std::move(s));
        }
        expect(Tok::RBrace, "'}'");
        result.doc.models.push_back(std::move(m));
    }

    void parse_system(ParseResult& result) {
        SystemDecl s;
        s.span = cur_.span;
        bump();  // system
        if (!take_ident(s.name, "a system name") || !expect(Tok::LBrace, "'{'")) {
            recover_top();
            return;
        }
        if (!is_word("models")) {
            error("syntax-error", "expected 'models'");
            recover_block();
            return;
        }
        bump();
        if (!take_identlist(s.models, "a model name") || !expect(Tok::Semi, "';'")) {
            recover_block();
            return;
        }
        expect(Tok::RBrace, "'}'");
        result.doc.systems.push_back(std::move(s));
    }

    void check_top_level_names(ParseResult& result) {
        std::set<std::string> seen;
        auto check = [&](const NameRef& n) {
            if (!seen.insert(n.name).second)
                error_at("duplicate-name", "duplicate top-level name '" + n.name + "'", n.span);
        };
        for (const auto& d : result.doc.diagrams) check(d.name);
        for (const auto& m : result.doc.models) check(m.name);
        for (const auto& s : result.doc.systems) check(s.name);
    }

    Lexer lex_;
    std::string file_;
    Token cur_;
    std::vector<Diagnostic> errors_;
};

} // namespace

ParseResult parse_source(std::string_view text, std::string filename) {
    Parser p(text, std::move(filename));
    return p.run();
}

} // namespace disco::dsl
