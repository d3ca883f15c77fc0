#pragma once

#include <memory>
#include <string>
#include <vector>

#include "hopu/term.hpp"

namespace hopu {

struct Loc {
    int line = 1;
    int col = 1;
};

struct SyntaxError : Error {
    Loc loc;
    SyntaxError(Loc l, const std::string& msg)
        : Error(std::to_string(l.line) + ":" + std::to_string(l.col) + ": " + msg), loc(l) {}
};

struct Expr;
using ExprP = std::shared_ptr<Expr>;

// Named source term. Types are filled in by the checker.
struct Expr {
    enum class Kind { Const, Var, Bound, App, Lam, Int, Str };
    Kind kind;
    std::string name;  // constant, variable or binder name; literal text
    Loc loc;
    ExprP head;                 // App
    std::vector<ExprP> args;    // App
    ExprP body;                 // Lam
    TypeTerm* type = nullptr;   // every node after checking
    std::vector<TypeTerm*> inst;  // Const: instantiation of the declared type's params

    static ExprP constant(std::string n, Loc l = {});
    static ExprP var(std::string n, Loc l = {});
    static ExprP bound(std::string n, Loc l = {});
    static ExprP app(ExprP h, std::vector<ExprP> a, Loc l = {});
    static ExprP lam(std::string n, ExprP b, Loc l = {});
    static ExprP literal(Kind k, std::string text, Loc l = {});

    bool is_const(const std::string& n) const { return kind == Kind::Const && name == n; }
};

// Type expressions keep their source form until the signature is built.
struct TypeExpr {
    std::string name;  // constructor or variable
    bool is_var = false;
    std::vector<TypeExpr> args;  // "->" has two
    Loc loc;
};

struct KindDecl {
    std::string name;
    size_t arity;
    Loc loc;
};

struct TypeDecl {
    std::vector<std::string> names;
    TypeExpr type;
    Loc loc;
};

struct ClauseAst {
    ExprP expr;  // the whole clause, possibly with :- at the top
    Loc loc;
};

struct Item {
    enum class Kind { KindDecl, TypeDecl, Clause };
    Kind kind;
    KindDecl kdecl;
    TypeDecl tdecl;
    ClauseAst clause;
};

std::vector<Item> parse_program(const std::string& text);
// a goal, with or without the leading "?-" and the final "."
ExprP parse_query(const std::string& text);
// a single term, used by tests and the REPL
ExprP parse_term(const std::string& text);

std::string print_expr(const ExprP& e);
std::string print_type(const TypeExpr& t);
std::string print_program(const std::vector<Item>& items);

}  // namespace hopu
