#include <cctype>
#include <sstream>

#include "hopu/syntax.hpp"

namespace hopu {

ExprP Expr::constant(std::string n, Loc l) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Const;
    e->name = std::move(n);
    e->loc = l;
    return e;
}

ExprP Expr::var(std::string n, Loc l) {
    auto e = constant(std::move(n), l);
    e->kind = Kind::Var;
    return e;
}

ExprP Expr::bound(std::string n, Loc l) {
    auto e = constant(std::move(n), l);
    e->kind = Kind::Bound;
    return e;
}

ExprP Expr::app(ExprP h, std::vector<ExprP> a, Loc l) {
    if (a.empty()) return h;
    if (h->kind == Kind::App) {
        std::vector<ExprP> all = h->args;
        all.insert(all.end(), a.begin(), a.end());
        return app(h->head, std::move(all), l);
    }
    auto e = std::make_shared<Expr>();
    e->kind = Kind::App;
    e->loc = l;
    e->head = std::move(h);
    e->args = std::move(a);
    return e;
}

ExprP Expr::lam(std::string n, ExprP b, Loc l) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Lam;
    e->name = std::move(n);
    e->body = std::move(b);
    e->loc = l;
    return e;
}

ExprP Expr::literal(Kind k, std::string text, Loc l) {
    auto e = constant(std::move(text), l);
    e->kind = k;
    return e;
}

namespace {

enum class Tok { Ident, Var, Int, Str, Punct, End };

struct Token {
    Tok kind;
    std::string text;
    Loc loc;
};

std::string quote(const std::string& raw) {
    std::string s = "\"";
    for (char c : raw) {
        if (c == '"' || c == '\\') s += '\\';
        if (c == '\n') {
            s += "\\n";
            continue;
        }
        s += c;
    }
    return s + "\"";
}

class Lexer {
    const std::string& src_;
    size_t pos_ = 0;
    Loc loc_;

    char peek(size_t k = 0) const { return pos_ + k < src_.size() ? src_[pos_ + k] : '\0'; }
    void advance() {
        if (src_[pos_] == '\n') {
            ++loc_.line;
            loc_.col = 1;
        } else {
            ++loc_.col;
        }
        ++pos_;
    }
    static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }

public:
    explicit Lexer(const std::string& s) : src_(s) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            while (pos_ < src_.size()) {
                char c = peek();
                if (std::isspace(static_cast<unsigned char>(c))) {
                    advance();
                } else if (c == '%') {
                    while (pos_ < src_.size() && peek() != '\n') advance();
                } else if (c == '/' && peek(1) == '*') {
                    Loc start = loc_;
                    advance();
                    advance();
                    while (pos_ < src_.size() && !(peek() == '*' && peek(1) == '/')) advance();
                    if (pos_ >= src_.size()) throw SyntaxError(start, "unterminated comment");
                    advance();
                    advance();
                } else {
                    break;
                }
            }
            Loc at = loc_;
            if (pos_ >= src_.size()) {
                out.push_back({Tok::End, "", at});
                return out;
            }
            char c = peek();
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::string s;
                while (pos_ < src_.size() && ident_char(peek())) {
                    s += peek();
                    advance();
                }
                bool upper = std::isupper(static_cast<unsigned char>(s[0])) || s[0] == '_';
                if (s == "Pi" || s == "Sigma") upper = false;
                out.push_back({upper ? Tok::Var : Tok::Ident, s, at});
                continue;
            }
            if (std::isdigit(static_cast<unsigned char>(c))) {
                std::string s;
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(peek()))) {
                    s += peek();
                    advance();
                }
                out.push_back({Tok::Int, s, at});
                continue;
            }
            if (c == '"') {
                advance();
                std::string raw;
                for (;;) {
                    if (pos_ >= src_.size() || peek() == '\n') throw SyntaxError(at, "unterminated string literal");
                    char d = peek();
                    advance();
                    if (d == '"') break;
                    if (d == '\\') {
                        if (pos_ >= src_.size()) throw SyntaxError(at, "unterminated string literal");
                        char e = peek();
                        advance();
                        raw += e == 'n' ? '\n' : e == 't' ? '\t' : e;
                    } else {
                        raw += d;
                    }
                }
                out.push_back({Tok::Str, quote(raw), at});
                continue;
            }
            static const char* multi[] = {":-", "=>", "->", "::", "?-"};
            bool matched = false;
            for (const char* m : multi) {
                if (peek() == m[0] && peek(1) == m[1]) {
                    advance();
                    advance();
                    out.push_back({Tok::Punct, m, at});
                    matched = true;
                    break;
                }
            }
            if (matched) continue;
            if (std::string(",;&\\.()[]|").find(c) != std::string::npos) {
                advance();
                out.push_back({Tok::Punct, std::string(1, c), at});
                continue;
            }
            throw SyntaxError(at, std::string("unexpected character '") + c + "'");
        }
    }
};

bool is_infix(const std::string& s) { return s == ":-" || s == "=>" || s == ";" || s == "," || s == "&" || s == "::"; }

class Parser {
    std::vector<Token> toks_;
    size_t i_ = 0;
    std::vector<std::string> scope_;
    int anon_ = 0;

public:
    explicit Parser(const std::string& text) : toks_(Lexer(text).run()) {}

    const Token& cur() const { return toks_[i_]; }
    const Token& next() const { return toks_[std::min(i_ + 1, toks_.size() - 1)]; }
    bool at_punct(const char* p) const { return cur().kind == Tok::Punct && cur().text == p; }
    bool at_end() const { return cur().kind == Tok::End; }

    [[noreturn]] void fail(const std::string& what) const {
        std::string found = at_end() ? "end of input" : "'" + cur().text + "'";
        throw SyntaxError(cur().loc, "expected " + what + ", found " + found);
    }

    void expect(const char* p) {
        if (!at_punct(p)) fail(std::string("'") + p + "'");
        ++i_;
    }

    std::vector<std::string> name_list() {
        std::vector<std::string> names;
        for (;;) {
            if (cur().kind != Tok::Ident) fail("a name");
            names.push_back(cur().text);
            ++i_;
            if (!at_punct(",")) return names;
            ++i_;
        }
    }

    Item kind_decl() {
        Item it{Item::Kind::KindDecl, {}, {}, {}};
        Loc loc = cur().loc;
        ++i_;
        auto names = name_list();
        size_t arity = 0;
        for (;;) {
            if (cur().kind != Tok::Ident || cur().text != "type") fail("'type'");
            ++i_;
            if (!at_punct("->")) break;
            ++i_;
            ++arity;
        }
        expect(".");
        // a list of names becomes consecutive declarations
        for (size_t k = 1; k < names.size(); ++k) {
            Item extra = it;
            extra.kdecl = {names[k], arity, loc};
            pending_.push_back(extra);
        }
        it.kdecl = {names[0], arity, loc};
        return it;
    }

    Item type_decl() {
        Item it{Item::Kind::TypeDecl, {}, {}, {}};
        it.tdecl.loc = cur().loc;
        ++i_;
        it.tdecl.names = name_list();
        it.tdecl.type = type_expr();
        expect(".");
        return it;
    }

    TypeExpr type_expr() {
        TypeExpr left = type_app();
        if (!at_punct("->")) return left;
        Loc loc = cur().loc;
        ++i_;
        TypeExpr t{"->", false, {left, type_expr()}, loc};
        return t;
    }

    TypeExpr type_app() {
        TypeExpr h = type_atom();
        if (h.is_var || !h.args.empty() || h.name == "->") return h;
        while (cur().kind == Tok::Ident || cur().kind == Tok::Var || at_punct("(")) h.args.push_back(type_atom());
        return h;
    }

    TypeExpr type_atom() {
        if (at_punct("(")) {
            ++i_;
            TypeExpr t = type_expr();
            expect(")");
            return t;
        }
        if (cur().kind == Tok::Ident || cur().kind == Tok::Var) {
            TypeExpr t{cur().text, cur().kind == Tok::Var, {}, cur().loc};
            ++i_;
            return t;
        }
        fail("a type");
    }

    // :- < => < ; < , & < :: < application
    ExprP expr0() {
        ExprP l = expr1();
        if (at_punct(":-")) {
            Loc loc = cur().loc;
            ++i_;
            ExprP r = expr1();
            return Expr::app(Expr::constant(":-", loc), {l, r}, loc);
        }
        return l;
    }

    ExprP binary(ExprP (Parser::*sub)(), ExprP (Parser::*self)(), std::initializer_list<const char*> ops) {
        ExprP l = (this->*sub)();
        for (const char* op : ops) {
            if (at_punct(op)) {
                Loc loc = cur().loc;
                ++i_;
                ExprP r = (this->*self)();
                return Expr::app(Expr::constant(op, loc), {l, r}, loc);
            }
        }
        return l;
    }

    ExprP expr1() { return binary(&Parser::expr2, &Parser::expr1, {"=>"}); }
    ExprP expr2() { return binary(&Parser::expr3, &Parser::expr2, {";"}); }
    ExprP expr3() { return binary(&Parser::expr4, &Parser::expr3, {",", "&"}); }
    ExprP expr4() { return binary(&Parser::application, &Parser::expr4, {"::"}); }

    bool at_binder() const {
        return (cur().kind == Tok::Ident || cur().kind == Tok::Var) && next().kind == Tok::Punct && next().text == "\\";
    }

    bool at_primary() const {
        switch (cur().kind) {
        case Tok::Ident:
        case Tok::Var:
        case Tok::Int:
        case Tok::Str:
            return true;
        case Tok::Punct:
            return cur().text == "(" || cur().text == "[";
        case Tok::End:
            return false;
        }
        return false;
    }

    ExprP lambda() {
        Loc loc = cur().loc;
        std::string name = cur().text;
        i_ += 2;
        scope_.push_back(name);
        ExprP body = expr1();
        scope_.pop_back();
        return Expr::lam(name, body, loc);
    }

    ExprP application() {
        if (at_binder()) return lambda();
        Loc loc = cur().loc;
        ExprP h = primary();
        std::vector<ExprP> args;
        while (at_primary()) {
            if (at_binder()) {
                args.push_back(lambda());
                break;
            }
            args.push_back(primary());
        }
        return Expr::app(h, std::move(args), loc);
    }

    ExprP primary() {
        const Token t = cur();
        switch (t.kind) {
        case Tok::Int:
            ++i_;
            return Expr::literal(Expr::Kind::Int, t.text, t.loc);
        case Tok::Str:
            ++i_;
            return Expr::literal(Expr::Kind::Str, t.text, t.loc);
        case Tok::Ident:
        case Tok::Var: {
            ++i_;
            for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
                if (*it == t.text) return Expr::bound(t.text, t.loc);
            if (t.text == "Pi") return Expr::constant("pi", t.loc);
            if (t.text == "Sigma") return Expr::constant("sigma", t.loc);
            if (t.kind == Tok::Ident) return Expr::constant(t.text, t.loc);
            if (t.text == "_") return Expr::var("_#" + std::to_string(++anon_), t.loc);
            return Expr::var(t.text, t.loc);
        }
        case Tok::Punct:
            if (t.text == "(") {
                ++i_;
                if (cur().kind == Tok::Punct && is_infix(cur().text) && next().kind == Tok::Punct &&
                    next().text == ")") {
                    ExprP op = Expr::constant(cur().text, cur().loc);
                    i_ += 2;
                    return op;
                }
                ExprP e = expr0();
                expect(")");
                return e;
            }
            if (t.text == "[") return list();
            break;
        case Tok::End:
            break;
        }
        fail("a term");
    }

    ExprP list() {
        Loc loc = cur().loc;
        ++i_;
        if (at_punct("]")) {
            ++i_;
            return Expr::constant("nil", loc);
        }
        std::vector<ExprP> elems;
        elems.push_back(expr4());
        while (at_punct(",")) {
            ++i_;
            elems.push_back(expr4());
        }
        ExprP tail = Expr::constant("nil", loc);
        if (at_punct("|")) {
            ++i_;
            tail = expr4();
        }
        expect("]");
        for (auto it = elems.rbegin(); it != elems.rend(); ++it)
            tail = Expr::app(Expr::constant("::", loc), {*it, tail}, loc);
        return tail;
    }

    ExprP goal() {
        if (at_punct("?-")) ++i_;
        ExprP g = expr1();
        if (at_punct(".")) ++i_;
        if (!at_end()) fail("end of query");
        return g;
    }

    ExprP single_term() {
        ExprP t = expr0();
        if (!at_end()) fail("end of term");
        return t;
    }

    std::vector<Item> pending_;
};

}  // namespace

std::vector<Item> parse_program(const std::string& text) {
    Parser p(text);
    std::vector<Item> items;
    while (!p.at_end()) {
        std::vector<Item> one;
        if (p.cur().kind == Tok::Ident && p.cur().text == "kind") {
            one.push_back(p.kind_decl());
        } else if (p.cur().kind == Tok::Ident && p.cur().text == "type" && p.next().kind == Tok::Ident) {
            one.push_back(p.type_decl());
        } else {
            Item it{Item::Kind::Clause, {}, {}, {}};
            it.clause.loc = p.cur().loc;
            it.clause.expr = p.expr0();
            p.expect(".");
            one.push_back(std::move(it));
        }
        items.insert(items.end(), one.begin(), one.end());
        items.insert(items.end(), p.pending_.begin(), p.pending_.end());
        p.pending_.clear();
    }
    return items;
}

ExprP parse_query(const std::string& text) { return Parser(text).goal(); }

ExprP parse_term(const std::string& text) { return Parser(text).single_term(); }

// ---- printing ----

namespace {

int op_level(const std::string& op) {
    if (op == ":-") return 0;
    if (op == "=>") return 1;
    if (op == ";") return 2;
    if (op == "," || op == "&") return 3;
    if (op == "::") return 4;
    return -1;
}

bool is_binop(const Expr& e) {
    return e.kind == Expr::Kind::App && e.head->kind == Expr::Kind::Const && e.args.size() == 2 &&
           op_level(e.head->name) >= 0;
}

std::string var_name(const std::string& n) { return n.rfind("_#", 0) == 0 ? "_" : n; }

// rightmost: nothing follows this term before the enclosing bracket, so a lambda needs no parens
void print(std::ostringstream& os, const Expr& e, int level, bool rightmost) {
    switch (e.kind) {
    case Expr::Kind::Const:
        if (op_level(e.name) >= 0)
            os << "(" << e.name << ")";
        else
            os << e.name;
        return;
    case Expr::Kind::Var:
        os << var_name(e.name);
        return;
    case Expr::Kind::Bound:
    case Expr::Kind::Int:
    case Expr::Kind::Str:
        os << e.name;
        return;
    case Expr::Kind::Lam: {
        bool paren = !rightmost || level > 1;
        if (paren) os << "(";
        os << e.name << "\\ ";
        print(os, *e.body, 1, true);
        if (paren) os << ")";
        return;
    }
    case Expr::Kind::App:
        break;
    }
    if (is_binop(e)) {
        int l = op_level(e.head->name);
        bool paren = l < level;
        if (paren) {
            os << "(";
            rightmost = true;
        }
        // xfy: the right operand may sit at the same level, :- is non-associative
        print(os, *e.args[0], l + 1, false);
        os << (e.head->name == "," ? ", " : " " + e.head->name + " ");
        print(os, *e.args[1], l == 0 ? 1 : l, rightmost);
        if (paren) os << ")";
        return;
    }
    bool paren = level > 5;
    if (paren) {
        os << "(";
        rightmost = true;
    }
    print(os, *e.head, 6, false);
    for (size_t i = 0; i < e.args.size(); ++i) {
        os << " ";
        bool last = i + 1 == e.args.size();
        if (last && e.args[i]->kind == Expr::Kind::Lam && rightmost)
            print(os, *e.args[i], 1, true);
        else
            print(os, *e.args[i], 6, false);
    }
    if (paren) os << ")";
}

}  // namespace

std::string print_expr(const ExprP& e) {
    std::ostringstream os;
    print(os, *e, 0, true);
    return os.str();
}

std::string print_type(const TypeExpr& t) {
    if (t.name == "->" && !t.is_var) {
        const TypeExpr& l = t.args[0];
        std::string ls = print_type(l);
        if (l.name == "->" && !l.is_var) ls = "(" + ls + ")";
        return ls + " -> " + print_type(t.args[1]);
    }
    std::string s = t.name;
    for (const auto& a : t.args) {
        std::string as = print_type(a);
        if (!a.args.empty()) as = "(" + as + ")";
        s += " " + as;
    }
    return s;
}

std::string print_program(const std::vector<Item>& items) {
    std::ostringstream os;
    for (const auto& it : items) {
        switch (it.kind) {
        case Item::Kind::KindDecl:
            os << "kind " << it.kdecl.name << " type";
            for (size_t i = 0; i < it.kdecl.arity; ++i) os << " -> type";
            os << ".\n";
            break;
        case Item::Kind::TypeDecl: {
            os << "type ";
            for (size_t i = 0; i < it.tdecl.names.size(); ++i) os << (i ? ", " : "") << it.tdecl.names[i];
            os << " " << print_type(it.tdecl.type) << ".\n";
            break;
        }
        case Item::Kind::Clause:
            os << print_expr(it.clause.expr) << ".\n";
            break;
        }
    }
    return os.str();
}

}  // namespace hopu
