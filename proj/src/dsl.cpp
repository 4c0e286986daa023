#include <cctype>
#include <charconv>
#include <optional>

#include "mbt/model_io.hpp"

namespace mbt {

namespace {

enum class T { End, Ident, Int, DString, SString, Punct };

struct Tok {
    T kind = T::End;
    std::string text;
    std::int64_t ival = 0;
    std::size_t line = 1;
    std::size_t col = 1;
};

class DslLexer {
public:
    explicit DslLexer(std::string_view src) : src_(src) {}

    Tok next() {
        skip();
        Tok t;
        t.line = line_;
        t.col = col_;
        if (pos_ >= src_.size()) return t;
        char c = src_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t b = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_' || src_[pos_] == '.'))
                bump();
            t.kind = T::Ident;
            t.text = std::string(src_.substr(b, pos_ - b));
            return t;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t b = pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) bump();
            t.kind = T::Int;
            t.text = std::string(src_.substr(b, pos_ - b));
            auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.ival);
            if (ec != std::errc{}) throw DslSyntaxError(t.line, t.col, "integer out of range");
            return t;
        }
        if (c == '"' || c == '\'') {
            bump();
            std::string out;
            while (true) {
                if (pos_ >= src_.size()) throw DslSyntaxError(t.line, t.col, "unterminated string");
                char d = src_[pos_];
                if (d == c) break;
                if (d == '\\' && pos_ + 1 < src_.size()) {
                    // Keep escapes verbatim inside double-quoted strings: the
                    // expression parser handles its own quoting.
                    if (c == '"' && src_[pos_ + 1] != '"') out += d;
                    bump();
                    d = src_[pos_];
                }
                out += d;
                bump();
            }
            bump();
            t.kind = c == '"' ? T::DString : T::SString;
            t.text = std::move(out);
            return t;
        }
        if (src_.substr(pos_, 2) == "->") {
            bump();
            bump();
            t.kind = T::Punct;
            t.text = "->";
            return t;
        }
        if (std::string_view("{};:,=[]-").find(c) != std::string_view::npos) {
            bump();
            t.kind = T::Punct;
            t.text = std::string(1, c);
            return t;
        }
        throw DslSyntaxError(line_, col_, std::string("unexpected character '") + c + "'");
    }

private:
    void bump() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                bump();
            } else if (c == '#' || src_.substr(pos_, 2) == "//") {
                while (pos_ < src_.size() && src_[pos_] != '\n') bump();
            } else {
                break;
            }
        }
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
};

class DslParser {
public:
    explicit DslParser(std::string_view src) : lex_(src) { advance(); }

    ModelBundle bundle() {
        ModelBundle b;
        std::string first;
        while (cur_.kind != T::End) {
            Tok at = cur_;
            EfsmModel m = model();
            if (first.empty()) first = m.name();
            if (!b.models.emplace(m.name(), std::move(m)).second)
                fail(at, "duplicate model name");
        }
        if (b.models.empty()) fail(cur_, "expected 'model'");
        try {
            b.mainModel = find_root_model(b.models);
        } catch (const ModelError&) {
            b.mainModel = first;
        }
        return b;
    }

    VarDecls var_block() {
        VarDecls out;
        while (cur_.kind != T::End) {
            keyword("var");
            out.push_back(var_decl());
        }
        return out;
    }

private:
    [[noreturn]] void fail(const Tok& at, const std::string& msg) const {
        throw DslSyntaxError(at.line, at.col, msg);
    }

    void advance() { cur_ = lex_.next(); }

    bool at_word(std::string_view w) const { return cur_.kind == T::Ident && cur_.text == w; }
    bool at_punct(std::string_view p) const { return cur_.kind == T::Punct && cur_.text == p; }

    void keyword(std::string_view w) {
        if (!at_word(w)) fail(cur_, "expected '" + std::string(w) + "'");
        advance();
    }

    void punct(std::string_view p) {
        if (!at_punct(p)) fail(cur_, "expected '" + std::string(p) + "'");
        advance();
    }

    std::string ident(const char* what) {
        if (cur_.kind != T::Ident) fail(cur_, std::string("expected ") + what);
        std::string s = cur_.text;
        advance();
        return s;
    }

    EfsmModel model() {
        keyword("model");
        std::string name = ident("model name");
        punct("{");
        VarDecls vars;
        std::vector<State> states;
        std::vector<Transition> trans;
        while (!at_punct("}")) {
            if (cur_.kind == T::End) fail(cur_, "unterminated model block");
            if (at_word("var")) {
                advance();
                vars.push_back(var_decl());
            } else if (at_word("state")) {
                advance();
                states.push_back(state_decl());
            } else if (at_word("trans")) {
                advance();
                trans.push_back(trans_decl());
            } else {
                fail(cur_, "expected 'var', 'state', 'trans' or '}'");
            }
        }
        Tok close = cur_;
        advance();
        try {
            return EfsmModel(name, std::move(states), std::move(trans), std::move(vars));
        } catch (const ModelError& e) {
            fail(close, e.what());
        }
    }

    VarDecl var_decl() {
        VarDecl d;
        d.name = ident("variable name");
        punct(":");
        Tok tt = cur_;
        std::string type = ident("type");
        if (type == "bool") d.type = Type::Bool;
        else if (type == "int") d.type = Type::Int;
        else if (type == "string") d.type = Type::String;
        else if (type == "list") d.type = Type::List;
        else fail(tt, "unknown type '" + type + "'");
        switch (d.type) {
            case Type::Bool: d.initial = false; break;
            case Type::Int: d.initial = std::int64_t{0}; break;
            case Type::String: d.initial = std::string{}; break;
            default: d.initial = StringList{}; break;
        }
        if (at_punct("=")) {
            advance();
            Tok vt = cur_;
            d.initial = literal();
            if (type_of(d.initial) != d.type) fail(vt, "initial value does not match type " + type);
        }
        punct(";");
        return d;
    }

    Value literal() {
        if (at_punct("-")) {
            advance();
            if (cur_.kind != T::Int) fail(cur_, "expected integer");
            std::int64_t v = -cur_.ival;
            advance();
            return v;
        }
        if (cur_.kind == T::Int) {
            std::int64_t v = cur_.ival;
            advance();
            return v;
        }
        if (at_word("true") || at_word("false")) {
            bool v = cur_.text == "true";
            advance();
            return v;
        }
        if (cur_.kind == T::SString) {
            std::string v = cur_.text;
            advance();
            return v;
        }
        if (at_punct("[")) {
            advance();
            StringList l;
            while (!at_punct("]")) {
                if (cur_.kind != T::SString) fail(cur_, "expected string in list literal");
                l.push_back(cur_.text);
                advance();
                if (!at_punct("]")) punct(",");
            }
            advance();
            return l;
        }
        fail(cur_, "expected literal");
    }

    State state_decl() {
        State s;
        s.label = ident("state label");
        s.assertion = s.label;
        while (!at_punct(";")) {
            if (at_word("start")) {
                s.isStart = true;
                advance();
            } else if (at_word("exit")) {
                s.isExit = true;
                advance();
            } else if (at_word("submodel")) {
                advance();
                s.submodel = ident("submodel name");
            } else {
                fail(cur_, "expected 'start', 'exit', 'submodel' or ';'");
            }
        }
        advance();
        return s;
    }

    Transition trans_decl() {
        Transition t;
        t.label = ident("transition label");
        punct(":");
        t.source = ident("source state");
        punct("->");
        t.target = ident("target state");
        while (!at_punct(";")) {
            if (at_word("guard")) {
                advance();
                Tok g = cur_;
                if (g.kind != T::DString) fail(g, "expected quoted guard");
                advance();
                try {
                    t.guard = parse_expr(g.text);
                } catch (const SyntaxError& e) {
                    fail(g, std::string("in guard: ") + e.what());
                }
            } else if (at_word("do")) {
                advance();
                Tok a = cur_;
                if (a.kind != T::DString) fail(a, "expected quoted actions");
                advance();
                try {
                    t.actions = parse_actions(a.text);
                } catch (const SyntaxError& e) {
                    fail(a, std::string("in actions: ") + e.what());
                }
            } else {
                fail(cur_, "expected 'guard', 'do' or ';'");
            }
        }
        advance();
        return t;
    }

    DslLexer lex_;
    Tok cur_;
};

}  // namespace

ModelBundle parse_dsl(std::string_view text) {
    return DslParser(text).bundle();
}

VarDecls parse_var_decls(std::string_view text) {
    return DslParser(text).var_block();
}

}  // namespace mbt
