#include <algorithm>
#include <functional>
#include <random>

#include "doctest.h"
#include "hopu/engine.hpp"
#include "hopu/types.hpp"

using namespace hopu;

namespace {

// Plain tree types for the reference unifier. var >= 0 marks a variable.
struct OT {
    std::string ctor;
    int var = -1;
    std::vector<OT> args;
};

OT ov(int v) { return OT{"", v, {}}; }
OT oc(const std::string& c, std::vector<OT> args = {}) { return OT{c, -1, std::move(args)}; }

using OSubst = std::map<int, OT>;

OT osubst(const OT& t, const OSubst& s) {
    if (t.var >= 0) {
        auto it = s.find(t.var);
        return it == s.end() ? t : osubst(it->second, s);
    }
    OT r = t;
    for (auto& a : r.args) a = osubst(a, s);
    return r;
}

bool occurs(int v, const OT& t) {
    if (t.var >= 0) return t.var == v;
    return std::any_of(t.args.begin(), t.args.end(), [&](const OT& a) { return occurs(v, a); });
}

// Robinson unification over explicit substitutions
bool ounify(OT a, OT b, OSubst& s) {
    a = osubst(a, s);
    b = osubst(b, s);
    if (a.var >= 0 && b.var >= 0 && a.var == b.var) return true;
    if (a.var >= 0) {
        if (occurs(a.var, b)) return false;
        s[a.var] = b;
        return true;
    }
    if (b.var >= 0) return ounify(b, a, s);
    if (a.ctor != b.ctor || a.args.size() != b.args.size()) return false;
    for (size_t i = 0; i < a.args.size(); ++i)
        if (!ounify(a.args[i], b.args[i], s)) return false;
    return true;
}

std::string render(const OT& t, std::map<int, int>& names) {
    if (t.var >= 0) {
        auto it = names.emplace(t.var, static_cast<int>(names.size())).first;
        return "V" + std::to_string(it->second);
    }
    std::string s = t.ctor;
    if (!t.args.empty()) {
        s += "(";
        for (size_t i = 0; i < t.args.size(); ++i) s += (i ? "," : "") + render(t.args[i], names);
        s += ")";
    }
    return s;
}

bool match(const OT& pat, const OT& t, std::map<int, OT>& m) {
    if (pat.var >= 0) {
        auto it = m.find(pat.var);
        if (it == m.end()) {
            m[pat.var] = t;
            return true;
        }
        std::map<int, int> n1, n2;
        return render(it->second, n1) == render(t, n2);
    }
    if (t.var >= 0 || pat.ctor != t.ctor || pat.args.size() != t.args.size()) return false;
    for (size_t i = 0; i < pat.args.size(); ++i)
        if (!match(pat.args[i], t.args[i], m)) return false;
    return true;
}

OT random_type(std::mt19937& rng, int depth, int nvars) {
    int k = std::uniform_int_distribution<int>(0, depth > 0 ? 5 : 2)(rng);
    switch (k) {
    case 0:
        return oc("int");
    case 1:
    case 2:
        return ov(std::uniform_int_distribution<int>(0, nvars - 1)(rng));
    case 3:
        return oc("list", {random_type(rng, depth - 1, nvars)});
    default:
        return oc("->", {random_type(rng, depth - 1, nvars), random_type(rng, depth - 1, nvars)});
    }
}

struct Kernel {
    Store st;
    Symbols syms;
    std::vector<TypeTerm*> vars;

    TypeTerm* build(const OT& t) {
        if (t.var >= 0) {
            while (vars.size() <= static_cast<size_t>(t.var)) vars.push_back(st.heap.tvar());
            return vars[t.var];
        }
        if (t.ctor == "int") return st.heap.tsort(sym::Int);
        if (t.ctor == "o") return st.heap.tsort(sym::O);
        if (t.ctor == "list") return st.heap.tapp(sym::List, {build(t.args[0])});
        return st.heap.tapp(sym::Arrow, {build(t.args[0]), build(t.args[1])});
    }

    OT back(TypeTerm* t, std::map<TypeTerm*, int>& ids) {
        t = deref(t);
        switch (t->kind) {
        case TypeTerm::Kind::Var: {
            auto it = ids.emplace(t, 100 + static_cast<int>(ids.size())).first;
            return ov(it->second);
        }
        case TypeTerm::Kind::Sort:
            return oc(t->id == sym::Int ? "int" : "o");
        case TypeTerm::Kind::App: {
            OT r = oc(t->id == sym::List ? "list" : "->");
            for (auto* a : t->args) r.args.push_back(back(a, ids));
            return r;
        }
        default:
            FAIL("unexpected param");
            return OT{};
        }
    }
};

}  // namespace

TEST_CASE("type unification agrees with a reference unifier and is most general") {
    std::mt19937 rng(7);
    const int nvars = 3;
    const std::vector<OT> grounds = {oc("int"), oc("o"), oc("list", {oc("int")})};
    int unified = 0;
    for (int iter = 0; iter < 400; ++iter) {
        OT a = random_type(rng, 3, nvars), b = random_type(rng, 3, nvars);
        OSubst os;
        bool expect = ounify(a, b, os);

        Kernel k;
        for (int v = 0; v < nvars; ++v) k.build(ov(v));
        TypeTerm* ka = k.build(a);
        TypeTerm* kb = k.build(b);
        auto mark = k.st.trail.mark();
        bool got = type_unify(k.st.trail, ka, kb);
        REQUIRE(got == expect);

        // ground instances over a small universe: each must factor through the computed unifier
        std::vector<OT> sigma;
        if (got) {
            ++unified;
            std::map<TypeTerm*, int> ids;
            for (int v = 0; v < nvars; ++v) sigma.push_back(k.back(k.vars[v], ids));
            std::map<int, int> n1, n2;
            std::string mine, ref;
            for (int v = 0; v < nvars; ++v) {
                mine += render(sigma[v], n1) + ";";
                ref += render(osubst(ov(v), os), n2) + ";";
            }
            CHECK(mine == ref);
        }
        for (int g = 0; g < 27; ++g) {
            OSubst gs;
            for (int v = 0, x = g; v < nvars; ++v, x /= 3) gs[v] = grounds[x % 3];
            std::map<int, int> n1, n2;
            bool unifies = render(osubst(a, gs), n1) == render(osubst(b, gs), n2);
            if (!unifies) continue;
            REQUIRE(got);
            std::map<int, OT> m;
            for (int v = 0; v < nvars; ++v) CHECK(match(sigma[v], gs[v], m));
        }
        k.st.trail.undo_to(mark);
        for (int v = 0; v < nvars; ++v) CHECK(deref(k.vars[v]) == k.vars[v]);
    }
    CHECK(unified > 50);
}

TEST_CASE("type unification examples") {
    Store st;
    TypeTerm* a = st.heap.tvar();
    TypeTerm* la = st.heap.tapp(sym::List, {a});
    TypeTerm* lint = st.heap.tapp(sym::List, {st.heap.tsort(sym::Int)});
    CHECK(type_unify(st.trail, la, lint));
    CHECK(deref(a)->kind == TypeTerm::Kind::Sort);
    CHECK(deref(a)->id == sym::Int);

    TypeTerm* b = st.heap.tvar();
    CHECK_FALSE(type_unify(st.trail, b, st.heap.tapp(sym::List, {b})));
    CHECK_FALSE(type_unify(st.trail, st.heap.tsort(sym::Int), st.heap.tsort(sym::String)));
}

TEST_CASE("skeleton split of declared constants") {
    Engine eng;
    eng.load_text(R"(
kind lst type.
type cons A -> lst -> lst.
type append (list A) -> (list A) -> (list A) -> o.
type pair A -> B -> o.
type mk A -> list B -> list B.
)");
    auto params = [&](const std::string& n) { return eng.signature().find(n)->skel.annotation_params; };
    CHECK(params("::").empty());
    CHECK(params("nil").empty());
    CHECK(params("cons") == std::vector<uint32_t>{0});
    CHECK(params("append") == std::vector<uint32_t>{0});
    CHECK(params("pair") == std::vector<uint32_t>{0, 1});
    CHECK(params("mk") == std::vector<uint32_t>{0});
    CHECK(eng.signature().find("append")->skel.predicate);
    CHECK_FALSE(eng.signature().find("cons")->skel.predicate);
}

namespace {

const char* kAppend = R"(
type append (list A) -> (list A) -> (list A) -> o.
append nil L L.
append (X :: L1) L2 (X :: L3) :- append L1 L2 L3.
)";

const char* kPrint = R"(
type print A -> o.
type printlist (list A) -> o.
print 1.
print "one".
printlist nil.
printlist (X :: L) :- print X, printlist L.
)";

std::vector<bool> needed_of(Engine& eng, const std::string& pred) {
    SymbolId s = eng.signature().find(pred)->sym;
    return eng.program().needed.at(s);
}

}  // namespace

TEST_CASE("neededness of append and print") {
    Engine a;
    a.load_text(kAppend);
    CHECK(needed_of(a, "append") == std::vector<bool>{false});

    Engine p;
    p.load_text(kPrint);
    CHECK(needed_of(p, "print") == std::vector<bool>{true});
    CHECK(needed_of(p, "printlist") == std::vector<bool>{true});
}

TEST_CASE("predicates defined in augment goals need every annotation") {
    Engine e;
    e.load_text(R"(
type q A -> o.
type r A -> B -> o.
type go o.
r X Y.
go :- (r 1 2 => q 1).
)");
    CHECK(needed_of(e, "r") == std::vector<bool>{true, true});
}

TEST_CASE("variable heads in a clause make the position needed") {
    Engine e;
    e.load_text(R"(
type id A -> A -> o.
type same A -> o.
id X X.
same 1.
)");
    CHECK(needed_of(e, "id") == std::vector<bool>{false});
    CHECK(needed_of(e, "same") == std::vector<bool>{true});
}

TEST_CASE("neededness does not depend on clause order") {
    std::string text = std::string(kAppend) + kPrint + R"(
type wrap A -> list A -> o.
wrap X L :- printlist (X :: nil), append L nil L.
type go o.
go :- wrap 1 nil.
)";
    auto items = parse_program(text);
    Store st;
    Symbols syms;
    Signature sig(st, syms);
    for (auto& it : items)
        if (it.kind == Item::Kind::TypeDecl) sig.add_type(it.tdecl);
    std::vector<ElabClause> clauses;
    for (auto& it : items) {
        if (it.kind != Item::Kind::Clause) continue;
        typecheck(sig, it.clause.expr);
        auto cs = elab(it.clause.expr, it.clause.loc);
        clauses.insert(clauses.end(), cs.begin(), cs.end());
    }
    std::vector<SymbolId> embedded;
    auto summaries = summarize(sig, clauses, embedded);
    NeededMatrix base = find_needed(sig.predicate_arity(), summaries, embedded);
    CHECK(base.at(sig.find("wrap")->sym) == std::vector<bool>{true});
    CHECK(base.at(sig.find("append")->sym) == std::vector<bool>{false});
    std::mt19937 rng(3);
    for (int i = 0; i < 20; ++i) {
        std::shuffle(summaries.begin(), summaries.end(), rng);
        CHECK(find_needed(sig.predicate_arity(), summaries, embedded) == base);
    }
}
