#include <cctype>
#include <charconv>
#include <optional>

#include "mbt/expr.hpp"

namespace mbt {

std::string_view to_string(BinaryOp op) {
    switch (op) {
        case BinaryOp::Or: return "||";
        case BinaryOp::And: return "&&";
        case BinaryOp::Eq: return "==";
        case BinaryOp::Ne: return "!=";
        case BinaryOp::Lt: return "<";
        case BinaryOp::Le: return "<=";
        case BinaryOp::Gt: return ">";
        case BinaryOp::Ge: return ">=";
        case BinaryOp::Add: return "+";
        case BinaryOp::Sub: return "-";
    }
    return "?";
}

bool same_tree(const ExprPtr& a, const ExprPtr& b) {
    if (!a || !b) return !a && !b;
    return *a == *b;
}

bool operator==(const Expr& a, const Expr& b) {
    if (a.node.index() != b.node.index()) return false;
    return std::visit(
        [&](const auto& lhs) -> bool {
            using T = std::decay_t<decltype(lhs)>;
            const auto& rhs = std::get<T>(b.node);
            if constexpr (std::is_same_v<T, Literal>) {
                return lhs.value == rhs.value;
            } else if constexpr (std::is_same_v<T, VarRef>) {
                return lhs.name == rhs.name;
            } else if constexpr (std::is_same_v<T, Unary>) {
                return lhs.op == rhs.op && same_tree(lhs.operand, rhs.operand);
            } else if constexpr (std::is_same_v<T, Binary>) {
                return lhs.op == rhs.op && same_tree(lhs.lhs, rhs.lhs) && same_tree(lhs.rhs, rhs.rhs);
            } else {
                if (lhs.name != rhs.name || lhs.args.size() != rhs.args.size()) return false;
                for (std::size_t i = 0; i < lhs.args.size(); ++i)
                    if (!same_tree(lhs.args[i], rhs.args[i])) return false;
                return true;
            }
        },
        a.node);
}

bool operator==(const ActionStmt& a, const ActionStmt& b) {
    if (a.stmt.index() != b.stmt.index()) return false;
    if (const auto* x = std::get_if<Assign>(&a.stmt)) {
        const auto& y = std::get<Assign>(b.stmt);
        return x->target == y.target && same_tree(x->value, y.value);
    }
    return same_tree(std::get<CallStmt>(a.stmt).call, std::get<CallStmt>(b.stmt).call);
}

namespace {

ExprPtr make(decltype(Expr::node) node, std::size_t offset) {
    return std::make_shared<const Expr>(Expr{std::move(node), offset});
}

}  // namespace

ExprPtr make_literal(Value v) { return make(Literal{std::move(v)}, 0); }
ExprPtr make_var(std::string name) { return make(VarRef{std::move(name)}, 0); }
ExprPtr make_unary(UnaryOp op, ExprPtr operand) { return make(Unary{op, std::move(operand)}, 0); }
ExprPtr make_binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs) {
    return make(Binary{op, std::move(lhs), std::move(rhs)}, 0);
}
ExprPtr make_call(std::string name, std::vector<ExprPtr> args) {
    return make(Call{std::move(name), std::move(args)}, 0);
}

namespace {

enum class Tok { End, Int, Ident, String, True, False, Punct };

struct Token {
    Tok kind = Tok::End;
    std::string text;  // punct spelling, identifier, or decoded string
    std::int64_t ival = 0;
    std::size_t offset = 0;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        skip_ws();
        Token t;
        t.offset = pos_;
        if (pos_ >= src_.size()) return t;
        const char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t end = pos_;
            while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) ++end;
            t.kind = Tok::Int;
            t.text = std::string(src_.substr(pos_, end - pos_));
            auto [p, ec] = std::from_chars(src_.data() + pos_, src_.data() + end, t.ival);
            if (ec != std::errc{}) throw SyntaxError(pos_, {"int"}, "integer literal out of range at offset " + std::to_string(pos_));
            pos_ = end;
            return t;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t end = pos_;
            while (end < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[end])) || src_[end] == '_'))
                ++end;
            t.text = std::string(src_.substr(pos_, end - pos_));
            t.kind = t.text == "true" ? Tok::True : t.text == "false" ? Tok::False : Tok::Ident;
            pos_ = end;
            return t;
        }
        if (c == '\'') {
            std::size_t i = pos_ + 1;
            std::string out;
            while (true) {
                if (i >= src_.size())
                    throw SyntaxError(src_.size(), {"'"}, "unterminated string literal starting at offset " + std::to_string(pos_));
                char d = src_[i];
                if (d == '\'') break;
                if (d == '\\') {
                    if (i + 1 >= src_.size())
                        throw SyntaxError(src_.size(), {"'"}, "unterminated string literal");
                    out += src_[i + 1];
                    i += 2;
                    continue;
                }
                out += d;
                ++i;
            }
            t.kind = Tok::String;
            t.text = std::move(out);
            pos_ = i + 1;
            return t;
        }
        static constexpr std::string_view two[] = {"&&", "||", "==", "!=", "<=", ">="};
        for (auto op : two) {
            if (src_.substr(pos_, 2) == op) {
                t.kind = Tok::Punct;
                t.text = std::string(op);
                pos_ += 2;
                return t;
            }
        }
        static constexpr std::string_view one = "<>+-!(),=;";
        if (one.find(c) != std::string_view::npos) {
            t.kind = Tok::Punct;
            t.text = std::string(1, c);
            ++pos_;
            return t;
        }
        throw SyntaxError(pos_, {}, std::string("unexpected character '") + c + "' at offset " + std::to_string(pos_));
    }

private:
    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

class Parser {
public:
    explicit Parser(std::string_view src) : lex_(src) { advance(); }

    ExprPtr expression() { return parse_or(); }

    Actions actions() {
        Actions out;
        while (cur_.kind != Tok::End) {
            out.push_back(statement());
            if (cur_.kind == Tok::End) break;
            expect_punct(";");
        }
        return out;
    }

    void expect_end() {
        if (cur_.kind != Tok::End) fail({"end of input"});
    }

private:
    void advance() { cur_ = lex_.next(); }

    bool at_punct(std::string_view p) const { return cur_.kind == Tok::Punct && cur_.text == p; }

    [[noreturn]] void fail(std::vector<std::string> expected) const {
        std::string msg = "syntax error at offset " + std::to_string(cur_.offset) + ": expected ";
        for (std::size_t i = 0; i < expected.size(); ++i) {
            if (i) msg += ", ";
            msg += expected[i];
        }
        msg += cur_.kind == Tok::End ? " but input ended" : " but found '" + spelling() + "'";
        throw SyntaxError(cur_.offset, std::move(expected), msg);
    }

    std::string spelling() const {
        return cur_.kind == Tok::String ? "'" + cur_.text + "'" : cur_.text;
    }

    void expect_punct(std::string_view p) {
        if (!at_punct(p)) fail({std::string(p)});
        advance();
    }

    ActionStmt statement() {
        if (cur_.kind != Tok::Ident) fail({"identifier"});
        Token name = cur_;
        advance();
        if (at_punct("=")) {
            advance();
            return ActionStmt{Assign{name.text, expression()}};
        }
        if (at_punct("(")) return ActionStmt{CallStmt{call_rest(name)}};
        fail({"=", "("});
    }

    ExprPtr parse_or() {
        ExprPtr lhs = parse_and();
        while (at_punct("||")) {
            std::size_t off = cur_.offset;
            advance();
            lhs = make(Binary{BinaryOp::Or, lhs, parse_and()}, off);
        }
        return lhs;
    }

    ExprPtr parse_and() {
        ExprPtr lhs = parse_cmp();
        while (at_punct("&&")) {
            std::size_t off = cur_.offset;
            advance();
            lhs = make(Binary{BinaryOp::And, lhs, parse_cmp()}, off);
        }
        return lhs;
    }

    std::optional<BinaryOp> cmp_op() const {
        if (cur_.kind != Tok::Punct) return std::nullopt;
        if (cur_.text == "==") return BinaryOp::Eq;
        if (cur_.text == "!=") return BinaryOp::Ne;
        if (cur_.text == "<") return BinaryOp::Lt;
        if (cur_.text == "<=") return BinaryOp::Le;
        if (cur_.text == ">") return BinaryOp::Gt;
        if (cur_.text == ">=") return BinaryOp::Ge;
        return std::nullopt;
    }

    ExprPtr parse_cmp() {
        ExprPtr lhs = parse_add();
        if (auto op = cmp_op()) {
            std::size_t off = cur_.offset;
            advance();
            lhs = make(Binary{*op, lhs, parse_add()}, off);
        }
        return lhs;
    }

    ExprPtr parse_add() {
        ExprPtr lhs = parse_unary();
        while (at_punct("+") || at_punct("-")) {
            BinaryOp op = cur_.text == "+" ? BinaryOp::Add : BinaryOp::Sub;
            std::size_t off = cur_.offset;
            advance();
            lhs = make(Binary{op, lhs, parse_unary()}, off);
        }
        return lhs;
    }

    ExprPtr parse_unary() {
        if (at_punct("!") || at_punct("-")) {
            UnaryOp op = cur_.text == "!" ? UnaryOp::Not : UnaryOp::Neg;
            std::size_t off = cur_.offset;
            advance();
            return make(Unary{op, parse_unary()}, off);
        }
        return parse_atom();
    }

    ExprPtr parse_atom() {
        Token t = cur_;
        switch (t.kind) {
            case Tok::Int: advance(); return make(Literal{t.ival}, t.offset);
            case Tok::True: advance(); return make(Literal{true}, t.offset);
            case Tok::False: advance(); return make(Literal{false}, t.offset);
            case Tok::String: advance(); return make(Literal{t.text}, t.offset);
            case Tok::Ident:
                advance();
                if (at_punct("(")) return call_rest(t);
                return make(VarRef{t.text}, t.offset);
            case Tok::Punct:
                if (t.text == "(") {
                    advance();
                    ExprPtr inner = expression();
                    expect_punct(")");
                    return inner;
                }
                break;
            case Tok::End: break;
        }
        fail({"int", "true", "false", "string", "identifier", "("});
    }

    // Current token is "(" following the callee name.
    ExprPtr call_rest(const Token& name) {
        advance();
        std::vector<ExprPtr> args;
        if (!at_punct(")")) {
            args.push_back(expression());
            while (at_punct(",")) {
                advance();
                args.push_back(expression());
            }
        }
        if (!at_punct(")")) fail({",", ")"});
        advance();
        return make(Call{name.text, std::move(args)}, name.offset);
    }

    Lexer lex_;
    Token cur_;
};

bool blank(std::string_view s) {
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) return false;
    return true;
}

}  // namespace

ExprPtr parse_expr(std::string_view src) {
    if (blank(src)) throw SyntaxError(0, {"expression"}, "empty expression");
    Parser p(src);
    ExprPtr e = p.expression();
    p.expect_end();
    return e;
}

Actions parse_actions(std::string_view src) {
    if (blank(src)) return {};
    Parser p(src);
    return p.actions();
}

namespace {

std::string quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'' || c == '\\') out += '\\';
        out += c;
    }
    out += '\'';
    return out;
}

}  // namespace

std::string pretty_print(const Expr& e) {
    return std::visit(
        [](const auto& n) -> std::string {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Literal>) {
                if (const auto* s = std::get_if<std::string>(&n.value)) return quote(*s);
                if (const auto* l = std::get_if<StringList>(&n.value)) {
                    std::string out = "[";
                    for (std::size_t i = 0; i < l->size(); ++i) {
                        if (i) out += ", ";
                        out += quote((*l)[i]);
                    }
                    return out + "]";
                }
                return render(n.value);
            } else if constexpr (std::is_same_v<T, VarRef>) {
                return n.name;
            } else if constexpr (std::is_same_v<T, Unary>) {
                return std::string(n.op == UnaryOp::Not ? "!" : "-") + pretty_print(*n.operand);
            } else if constexpr (std::is_same_v<T, Binary>) {
                return "(" + pretty_print(*n.lhs) + " " + std::string(to_string(n.op)) + " " +
                       pretty_print(*n.rhs) + ")";
            } else {
                std::string out = n.name + "(";
                for (std::size_t i = 0; i < n.args.size(); ++i) {
                    if (i) out += ", ";
                    out += pretty_print(*n.args[i]);
                }
                return out + ")";
            }
        },
        e.node);
}

std::string pretty_print(const ActionStmt& s) {
    if (const auto* a = std::get_if<Assign>(&s.stmt)) return a->target + " = " + pretty_print(*a->value) + ";";
    return pretty_print(*std::get<CallStmt>(s.stmt).call) + ";";
}

std::string pretty_print(std::span<const ActionStmt> stmts) {
    std::string out;
    for (std::size_t i = 0; i < stmts.size(); ++i) {
        if (i) out += ' ';
        out += pretty_print(stmts[i]);
    }
    return out;
}

}  // namespace mbt
