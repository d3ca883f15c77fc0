#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "hopu/frontend.hpp"
#include "hopu/normalize.hpp"
#include "oracles.hpp"

using namespace hopu;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// declarations and elaborated clauses of a program, stopping before encoding
struct Front {
    Store st;
    Symbols syms;
    Signature sig{st, syms};
    std::vector<ElabClause> clauses;
    int disjunctions = 0;

    explicit Front(const std::string& text, bool eliminate = true) {
        auto items = parse_program(text);
        for (auto& it : items)
            if (it.kind == Item::Kind::KindDecl) sig.add_kind(it.kdecl);
        for (auto& it : items)
            if (it.kind == Item::Kind::TypeDecl) sig.add_type(it.tdecl);
        for (auto& it : items) {
            if (it.kind != Item::Kind::Clause) continue;
            typecheck(sig, it.clause.expr);
            auto cs = elab(it.clause.expr, it.clause.loc);
            clauses.insert(clauses.end(), cs.begin(), cs.end());
        }
        if (eliminate) eliminate_disjunctions(sig, clauses, disjunctions);
    }

    std::string encode(const std::string& term) {
        ExprP e = parse_term(term);
        typecheck(sig, e, nullptr, false);
        Encoder enc(sig, TypeOpt::Full, nullptr);
        std::map<std::string, Term*> vars;
        return oracle::canon(enc.query(e, vars), syms);
    }
};

std::string show(const ElabClause& c) {
    return print_expr(c.head) + (c.body ? " :- " + print_expr(c.body) : "");
}

const char* kCopy = R"(
kind tm type.
type a tm.
type app tm -> tm -> tm.
type abs (tm -> tm) -> tm.
type copy tm -> tm -> o.
copy a a.
copy (app T1 T2) (app T3 T4) :- copy T1 T3, copy T2 T4.
copy (abs T1) (abs T2) :- Pi c\ (copy c c => copy (T1 c) (T2 c)).
)";

}  // namespace

TEST_CASE("parsing the copy program") {
    auto items = parse_program(kCopy);
    std::vector<ExprP> clauses;
    for (auto& it : items)
        if (it.kind == Item::Kind::Clause) clauses.push_back(it.clause.expr);
    REQUIRE(clauses.size() == 3);
    const ExprP& third = clauses[2];
    REQUIRE(third->kind == Expr::Kind::App);
    CHECK(third->head->is_const(":-"));
    const ExprP& body = third->args[1];
    REQUIRE(body->kind == Expr::Kind::App);
    CHECK(body->head->is_const("pi"));
    REQUIRE(body->args[0]->kind == Expr::Kind::Lam);
    CHECK(body->args[0]->name == "c");
    const ExprP& imp = body->args[0]->body;
    CHECK(imp->head->is_const("=>"));
    CHECK(print_expr(imp) == "copy c c => copy (T1 c) (T2 c)");
}

TEST_CASE("kind declarations") {
    auto items = parse_program("kind pair type -> type -> type.\nkind i, j type.");
    REQUIRE(items.size() == 3);
    CHECK(items[0].kind == Item::Kind::KindDecl);
    CHECK(items[0].kdecl.name == "pair");
    CHECK(items[0].kdecl.arity == 2);
    CHECK(items[1].kdecl.name == "i");
    CHECK(items[2].kdecl.arity == 0);
}

TEST_CASE("syntax errors") {
    CHECK_THROWS_AS(parse_program("foo X :- ."), SyntaxError);
    CHECK_THROWS_AS(parse_program("foo X"), SyntaxError);
    CHECK_THROWS_AS(parse_program("foo (X ."), SyntaxError);
    CHECK_THROWS_AS(parse_program("type f."), SyntaxError);
    CHECK_THROWS_AS(parse_query("?- p X. q"), SyntaxError);
    try {
        parse_program("p a.\nfoo X :- .");
        FAIL("expected a syntax error");
    } catch (const SyntaxError& e) {
        CHECK(e.loc.line == 2);
    }
}

TEST_CASE("operator precedence and sugar") {
    CHECK(print_expr(parse_term("a :: b :: nil")) == "a :: b :: nil");
    CHECK(print_expr(parse_term("(a :: b) :: nil")) == "(a :: b) :: nil");
    CHECK(print_expr(parse_term("[a, b | T]")) == "a :: b :: T");
    CHECK(print_expr(parse_term("[]")) == "nil");
    CHECK(print_expr(parse_term("p, q ; r")) == "p, q ; r");
    CHECK(print_expr(parse_term("(p ; q), r")) == "(p ; q), r");
    CHECK(print_expr(parse_term("p => q, r")) == "p => q, r");
    CHECK(print_expr(parse_term("(p => q), r")) == "(p => q), r");
    CHECK(print_expr(parse_term("f x\\ g x")) == "f x\\ g x");
    CHECK(print_expr(parse_term("f (x\\ g x) a")) == "f (x\\ g x) a");
    CHECK(print_expr(parse_term("Sigma y\\ p y")) == "sigma y\\ p y");
    CHECK(print_expr(parse_term("p /* inline */ a % trailing")) == "p a");
}

TEST_CASE("elaboration of clauses") {
    SUBCASE("universal over a conjunction") {
        auto cs = elab(parse_term("pi x\\ (p x, q x)"));
        REQUIRE(cs.size() == 2);
        CHECK(cs[0].head->head->is_const("p"));
        CHECK(cs[1].head->head->is_const("q"));
        CHECK(cs[0].head->args[0]->kind == Expr::Kind::Var);
        CHECK(cs[1].head->args[0]->kind == Expr::Kind::Var);
    }
    SUBCASE("atomic") {
        auto cs = elab(parse_term("p a"));
        REQUIRE(cs.size() == 1);
        CHECK(show(cs[0]) == "p a");
    }
    SUBCASE("conjunction with an implication") {
        auto cs = elab(parse_term("p a, (q a => r a)"));
        REQUIRE(cs.size() == 2);
        CHECK(show(cs[0]) == "p a");
        CHECK(show(cs[1]) == "r a :- q a");
    }
    SUBCASE("nested guards are conjoined") {
        auto cs = elab(parse_term("q a => (r a :- s a)"));
        REQUIRE(cs.size() == 1);
        CHECK(cs[0].head->head->is_const("r"));
        REQUIRE(cs[0].body);
        CHECK(cs[0].body->head->is_const(","));
    }
    SUBCASE("non-atomic heads are rejected") {
        CHECK_THROWS(elab(parse_term("X a :- p")));
        CHECK_THROWS(elab(parse_term("(p ; q) :- r")));
    }
}

namespace {

const char* kDisjSig = R"(
kind i type.
type f i -> i.
type foo i -> o.
type bar1, bar2, bar3 i -> i -> o.
type bar, baz, qux i -> o.
)";

}  // namespace

TEST_CASE("disjunction elimination") {
    SUBCASE("the introducing example") {
        Front f(std::string(kDisjSig) + "foo X :- bar1 U V, (bar2 (f X) U ; bar3 (f X) V).");
        REQUIRE(f.clauses.size() == 3);
        CHECK(f.disjunctions == 1);
        CHECK(show(f.clauses[0]) == "foo X :- bar1 U V, $disj_1 X U V");
        CHECK(show(f.clauses[1]) == "$disj_1 X U V :- bar2 (f X) U");
        CHECK(show(f.clauses[2]) == "$disj_1 X U V :- bar3 (f X) V");
    }
    SUBCASE("no disjunctions") {
        Front f(std::string(kDisjSig) + "foo X :- bar X, baz X.\nbar X.");
        Front g(std::string(kDisjSig) + "foo X :- bar X, baz X.\nbar X.", false);
        REQUIRE(f.clauses.size() == g.clauses.size());
        for (size_t i = 0; i < f.clauses.size(); ++i) CHECK(show(f.clauses[i]) == show(g.clauses[i]));
        CHECK(f.disjunctions == 0);
    }
    SUBCASE("nested disjunctions") {
        Front f(std::string(kDisjSig) + "foo X :- (bar X ; (baz X ; qux X)).");
        CHECK(f.clauses.size() == 1 + 2 + 2);
        CHECK(f.disjunctions == 2);
    }
    SUBCASE("bound variables become arguments") {
        Front f(std::string(kDisjSig) + "foo X :- pi y\\ (bar y ; baz X).");
        REQUIRE(f.clauses.size() == 3);
        CHECK(show(f.clauses[0]) == "foo X :- pi y\\ $disj_1 y X");
    }
    SUBCASE("disjunctions inside terms stay") {
        Front f(std::string(kDisjSig) + "type t (i -> o) -> o.\nfoo X :- t (y\\ bar y ; baz y).");
        CHECK(f.clauses.size() == 1);
    }
}

TEST_CASE("encoding with de Bruijn indices") {
    Front f(kCopy);
    CHECK(f.encode("x\\ y\\ (x y)") == "\\2.(#2 #1)");
    CHECK(f.encode("x\\ x") == f.encode("y\\ y"));
    CHECK(f.encode("x\\ x") == "\\1.#1");
    CHECK(f.encode("abs (x\\ app a x)") == "(abs \\1.(app a #1))");
    CHECK(f.encode("abs x\\ abs y\\ app x y") == "(abs \\1.(abs \\1.(app #2 #1)))");
}

TEST_CASE("type checking") {
    Front f("");
    auto type_of = [&](const std::string& t) {
        ExprP e = parse_term(t);
        typecheck(f.sig, e, nullptr, false);
        return type_to_string(e->type, f.syms);
    };
    CHECK(type_of("1 :: nil") == "list int");
    CHECK(type_of("\"a\" :: nil") == "list string");
    CHECK_THROWS_AS(type_of("1 :: \"a\" :: nil"), TypeError);
    CHECK_THROWS_AS(type_of("undeclared_thing"), TypeError);
    CHECK_THROWS_AS(type_of("true true"), TypeError);

    Front g(R"(
type append (list A) -> (list A) -> (list A) -> o.
)");
    ExprP e = parse_term("append (1 :: nil) (2 :: nil) L");
    typecheck(g.sig, e);
    REQUIRE(e->head->inst.size() == 1);
    CHECK(type_to_string(e->head->inst[0], g.syms) == "int");
}

TEST_CASE("declaration errors") {
    CHECK_THROWS_AS(Front("type p foo -> o."), TypeError);
    CHECK_THROWS_AS(Front("kind k type. type p k k -> o."), TypeError);
    CHECK_THROWS_AS(Front("type p int -> o.\ntype p string -> o."), TypeError);
    CHECK_NOTHROW(Front("type p int -> o.\ntype p int -> o."));
    CHECK_THROWS_AS(Front("type p int -> o.\np \"a\"."), TypeError);
}

TEST_CASE("printing is idempotent on the corpus") {
    int files = 0;
    for (const auto& entry : std::filesystem::directory_iterator(HOPU_CORPUS)) {
        if (entry.path().extension() != ".lp") continue;
        ++files;
        CAPTURE(entry.path().string());
        auto items = parse_program(slurp(entry.path()));
        std::string once = print_program(items);
        auto again = parse_program(once);
        CHECK(again.size() == items.size());
        CHECK(print_program(again) == once);
    }
    CHECK(files >= 5);
}

TEST_CASE("readback names binders from the outside in") {
    Front f(kCopy);
    ExprP e = parse_term("abs u\\ abs v\\ app v u");
    typecheck(f.sig, e, nullptr, false);
    Encoder enc(f.sig, TypeOpt::Full, nullptr);
    std::map<std::string, Term*> vars;
    Term* t = enc.query(e, vars);
    std::map<Term*, std::string> fresh;
    CHECK(print_expr(readback(full_normalize(f.st, t), f.syms, {}, fresh)) == "abs x1\\ abs x2\\ app x2 x1");
}
