#include "hopu/frontend.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace hopu {

using K = TypeTerm::Kind;

namespace {

bool is_binop(const ExprP& e, const char* op) {
    return e->kind == Expr::Kind::App && e->head->is_const(op) && e->args.size() == 2;
}

bool is_quant(const ExprP& e, const char* q) {
    return e->kind == Expr::Kind::App && e->head->is_const(q) && e->args.size() == 1;
}

bool is_logical_name(const std::string& n) {
    return n == "true" || n == "," || n == ";" || n == "&" || n == "=>" || n == ":-" || n == "pi" || n == "sigma";
}

ExprP binop(const char* op, ExprP a, ExprP b) { return Expr::app(Expr::constant(op, a->loc), {a, b}, a->loc); }

}  // namespace

// ---- signature ----

Signature::Signature(Store& st, Symbols& syms) : st_(st), syms_(syms) {
    kinds_ = {{"o", 0}, {"int", 0}, {"string", 0}, {"list", 1}};
    Heap& h = st_.heap;
    TypeTerm* o = h.tsort(sym::O);
    TypeTerm* a = h.tparam(0);
    TypeTerm* oo = arrow(h, o, arrow(h, o, o));
    TypeTerm* quant = arrow(h, arrow(h, a, o), o);
    add_const("true", o);
    for (const char* op : {",", ";", "&", "=>", ":-"}) add_const(op, oo);
    add_const("pi", quant);
    add_const("sigma", quant);
    add_const("::", arrow(h, a, arrow(h, h.tapp(sym::List, {a}), h.tapp(sym::List, {a}))));
    add_const("nil", h.tapp(sym::List, {a}));
    for (auto& [s, info] : consts_) info.logical = is_logical(s);
}

void Signature::add_kind(const KindDecl& d) {
    auto it = kinds_.find(d.name);
    if (it != kinds_.end()) {
        if (it->second != d.arity) throw TypeError(d.loc, "kind '" + d.name + "' redeclared with a different arity");
        return;
    }
    kinds_[d.name] = d.arity;
    syms_.intern(d.name);
}

TypeTerm* Signature::schema_of(const TypeExpr& t, std::map<std::string, uint32_t>& params) {
    Heap& h = st_.heap;
    if (t.is_var) {
        auto it = params.find(t.name);
        if (it == params.end()) it = params.emplace(t.name, static_cast<uint32_t>(params.size())).first;
        return h.tparam(it->second);
    }
    if (t.name == "->") {
        TypeTerm* a = schema_of(t.args[0], params);
        return arrow(h, a, schema_of(t.args[1], params));
    }
    auto k = kinds_.find(t.name);
    if (k == kinds_.end()) throw TypeError(t.loc, "unknown type constructor '" + t.name + "'");
    if (k->second != t.args.size())
        throw TypeError(t.loc, "type constructor '" + t.name + "' expects " + std::to_string(k->second) +
                                   " arguments, got " + std::to_string(t.args.size()));
    SymbolId s = syms_.intern(t.name);
    if (t.args.empty()) return h.tsort(s);
    std::vector<TypeTerm*> args;
    for (const auto& a : t.args) args.push_back(schema_of(a, params));
    return h.tapp(s, std::move(args));
}

namespace {
// schemas are compared by printing, with params named by slot
std::string schema_key(TypeTerm* t, const Symbols& syms) { return type_to_string(t, syms); }
}  // namespace

void Signature::add_type(const TypeDecl& d) {
    std::map<std::string, uint32_t> params;
    TypeTerm* schema = schema_of(d.type, params);
    for (const auto& n : d.names) add_const(n, schema, d.loc);
}

void Signature::add_const(const std::string& name, TypeTerm* schema, Loc loc) {
    SymbolId s = syms_.intern(name);
    auto it = consts_.find(s);
    if (it != consts_.end()) {
        if (schema_key(it->second.schema, syms_) != schema_key(schema, syms_))
            throw TypeError(loc, "constant '" + name + "' redeclared with a different type");
        return;
    }
    ConstInfo info;
    info.sym = s;
    info.schema = schema;
    std::vector<uint32_t> ps;
    collect_params(schema, ps);
    info.nparams = static_cast<uint32_t>(ps.size());
    info.skel = split_skeleton(schema);
    consts_[s] = info;
}

const ConstInfo* Signature::find(const std::string& name) const {
    if (!syms_.contains(name)) return nullptr;
    return find(syms_.intern(name));
}

const ConstInfo* Signature::find(SymbolId s) const {
    auto it = consts_.find(s);
    return it == consts_.end() ? nullptr : &it->second;
}

std::map<SymbolId, size_t> Signature::predicate_arity() const {
    std::map<SymbolId, size_t> out;
    for (const auto& [s, info] : consts_)
        if (info.skel.predicate && !info.logical) out[s] = info.nparams;
    return out;
}

// ---- type inference ----

namespace {

class Checker {
public:
    Checker(Signature& sig, std::vector<std::pair<std::string, TypeTerm*>>* vars) : sig_(sig), vars_(vars) {}

    TypeTerm* infer(const ExprP& e) {
        Heap& h = sig_.store().heap;
        switch (e->kind) {
        case Expr::Kind::Int:
            e->type = h.tsort(sym::Int);
            break;
        case Expr::Kind::Str:
            e->type = h.tsort(sym::String);
            break;
        case Expr::Kind::Const: {
            const ConstInfo* info = sig_.find(e->name);
            if (!info) throw TypeError(e->loc, "undeclared constant '" + e->name + "'");
            e->inst.assign(info->nparams, nullptr);
            for (auto& p : e->inst) p = h.tvar();
            e->type = instantiate_type(h, info->schema, e->inst);
            break;
        }
        case Expr::Kind::Var: {
            auto it = std::find_if(local_.begin(), local_.end(), [&](auto& p) { return p.first == e->name; });
            if (it == local_.end()) {
                local_.emplace_back(e->name, h.tvar());
                it = local_.end() - 1;
            }
            e->type = it->second;
            break;
        }
        case Expr::Kind::Bound: {
            auto it = std::find_if(scope_.rbegin(), scope_.rend(), [&](auto& p) { return p.first == e->name; });
            if (it == scope_.rend()) throw TypeError(e->loc, "unbound identifier '" + e->name + "'");
            e->type = it->second;
            break;
        }
        case Expr::Kind::Lam: {
            TypeTerm* a = h.tvar();
            scope_.emplace_back(e->name, a);
            TypeTerm* b = infer(e->body);
            scope_.pop_back();
            e->type = arrow(h, a, b);
            break;
        }
        case Expr::Kind::App: {
            TypeTerm* f = infer(e->head);
            for (const auto& a : e->args) {
                TypeTerm* at = infer(a);
                TypeTerm* fr = deref(f);
                if (fr->kind == K::App && fr->id == sym::Arrow) {
                    if (!type_unify(trail_, fr->args[0], at)) mismatch(a, fr->args[0], at);
                    f = fr->args[1];
                } else {
                    TypeTerm* r = h.tvar();
                    if (!type_unify(trail_, f, arrow(h, at, r)))
                        throw TypeError(a->loc, "'" + print_expr(e->head) + "' is applied to too many arguments");
                    f = r;
                }
            }
            e->type = f;
            break;
        }
        }
        return e->type;
    }

    void expect(const ExprP& e, TypeTerm* want) {
        TypeTerm* got = infer(e);
        if (!type_unify(trail_, want, got)) mismatch(e, want, got);
    }

    void finish() {
        if (vars_)
            for (auto& v : local_)
                if (v.first.rfind("_#", 0) != 0) vars_->push_back(v);
    }

private:
    [[noreturn]] void mismatch(const ExprP& at, TypeTerm* want, TypeTerm* got) {
        const Symbols& syms = sig_.symbols();
        throw TypeError(at->loc, "type mismatch at '" + print_expr(at) + "': expected " + type_to_string(want, syms) +
                                     ", found " + type_to_string(got, syms));
    }

    Signature& sig_;
    std::vector<std::pair<std::string, TypeTerm*>>* vars_;
    std::vector<std::pair<std::string, TypeTerm*>> local_;
    std::vector<std::pair<std::string, TypeTerm*>> scope_;
    Trail trail_;
};

}  // namespace

void typecheck(Signature& sig, const ExprP& e, std::vector<std::pair<std::string, TypeTerm*>>* vars,
               bool proposition) {
    Checker c(sig, vars);
    if (proposition)
        c.expect(e, sig.store().heap.tsort(sym::O));
    else
        c.infer(e);
    c.finish();
}

// ---- elaboration ----

namespace {

// replaces free occurrences of bound name x by the expression r
ExprP subst_bound(const ExprP& e, const std::string& x, const ExprP& r) {
    switch (e->kind) {
    case Expr::Kind::Bound:
        return e->name == x ? r : e;
    case Expr::Kind::Lam: {
        if (e->name == x) return e;
        ExprP b = subst_bound(e->body, x, r);
        if (b == e->body) return e;
        auto n = std::make_shared<Expr>(*e);
        n->body = b;
        return n;
    }
    case Expr::Kind::App: {
        ExprP h = subst_bound(e->head, x, r);
        bool changed = h != e->head;
        std::vector<ExprP> args;
        for (const auto& a : e->args) {
            args.push_back(subst_bound(a, x, r));
            changed = changed || args.back() != a;
        }
        if (!changed) return e;
        auto n = std::make_shared<Expr>(*e);
        n->head = h;
        n->args = std::move(args);
        return n;
    }
    default:
        return e;
    }
}

TypeTerm* binder_type(const ExprP& lam) {
    TypeTerm* t = lam->type ? deref(lam->type) : nullptr;
    return t && t->kind == K::App && t->id == sym::Arrow ? t->args[0] : nullptr;
}

ExprP var_for_binder(const ExprP& lam, const std::string& name) {
    ExprP v = Expr::var(name, lam->loc);
    v->type = binder_type(lam);
    return v;
}

void check_head(const ExprP& h) {
    const ExprP& c = h->kind == Expr::Kind::App ? h->head : h;
    if (c->kind != Expr::Kind::Const || is_logical_name(c->name))
        throw TypeError(h->loc, "clause head '" + print_expr(h) + "' is not an atom with a constant predicate");
}

void elab_into(const ExprP& e, ExprP guard, Loc loc, std::vector<ElabClause>& out, int& fresh) {
    if (is_binop(e, ",") || is_binop(e, "&")) {
        elab_into(e->args[0], guard, loc, out, fresh);
        elab_into(e->args[1], guard, loc, out, fresh);
        return;
    }
    if (is_binop(e, ":-") || is_binop(e, "=>")) {
        bool neck = e->head->is_const(":-");
        ExprP g = neck ? e->args[1] : e->args[0];
        ExprP d = neck ? e->args[0] : e->args[1];
        elab_into(d, guard ? binop(",", g, guard) : g, loc, out, fresh);
        return;
    }
    if (is_quant(e, "pi") && e->args[0]->kind == Expr::Kind::Lam) {
        const ExprP& lam = e->args[0];
        ExprP v = var_for_binder(lam, "$" + lam->name + std::to_string(++fresh));
        elab_into(subst_bound(lam->body, lam->name, v), guard, loc, out, fresh);
        return;
    }
    check_head(e);
    out.push_back({e, guard, loc});
}

}  // namespace

std::vector<ElabClause> elab(const ExprP& clause, Loc loc) {
    std::vector<ElabClause> out;
    int fresh = 0;
    elab_into(clause, nullptr, loc, out, fresh);
    return out;
}

// ---- disjunctions ----

namespace {

struct FreeItem {
    std::string name;
    bool bound;
    TypeTerm* type;
};

void free_items(const ExprP& e, std::vector<std::string>& inner, std::vector<FreeItem>& out) {
    auto add = [&](bool bound) {
        for (auto& f : out)
            if (f.name == e->name && f.bound == bound) return;
        out.push_back({e->name, bound, e->type});
    };
    switch (e->kind) {
    case Expr::Kind::Var:
        add(false);
        break;
    case Expr::Kind::Bound:
        if (std::find(inner.begin(), inner.end(), e->name) == inner.end()) add(true);
        break;
    case Expr::Kind::Lam:
        inner.push_back(e->name);
        free_items(e->body, inner, out);
        inner.pop_back();
        break;
    case Expr::Kind::App:
        free_items(e->head, inner, out);
        for (const auto& a : e->args) free_items(a, inner, out);
        break;
    default:
        break;
    }
}

TypeTerm* params_for_vars(Heap& h, TypeTerm* t, const std::vector<TypeTerm*>& vars) {
    t = deref(t);
    if (t->kind == K::Var) {
        auto it = std::find(vars.begin(), vars.end(), t);
        return h.tparam(static_cast<uint32_t>(it - vars.begin()));
    }
    if (t->args.empty()) return t;
    std::vector<TypeTerm*> args;
    for (auto* a : t->args) args.push_back(params_for_vars(h, a, vars));
    return h.tapp(t->id, std::move(args));
}

class DisjEliminator {
public:
    DisjEliminator(Signature& sig, std::vector<ElabClause>& out, int& counter) : sig_(sig), out_(out), counter_(counter) {}

    ExprP goal(const ExprP& e) {
        if (is_binop(e, ",") || is_binop(e, "&")) return rebuild(e, {goal(e->args[0]), goal(e->args[1])});
        if (is_binop(e, "=>")) return rebuild(e, {e->args[0], goal(e->args[1])});
        if ((is_quant(e, "pi") || is_quant(e, "sigma")) && e->args[0]->kind == Expr::Kind::Lam) {
            const ExprP& lam = e->args[0];
            ExprP b = goal(lam->body);
            if (b == lam->body) return e;
            auto nl = std::make_shared<Expr>(*lam);
            nl->body = b;
            return rebuild(e, {nl});
        }
        if (is_binop(e, ";")) return replace(e);
        return e;
    }

private:
    static ExprP rebuild(const ExprP& e, std::vector<ExprP> args) {
        bool same = true;
        for (size_t i = 0; i < args.size(); ++i) same = same && args[i] == e->args[i];
        if (same) return e;
        auto n = std::make_shared<Expr>(*e);
        n->args = std::move(args);
        return n;
    }

    ExprP replace(const ExprP& e) {
        Heap& h = sig_.store().heap;
        std::vector<std::string> inner;
        std::vector<FreeItem> items;
        free_items(e, inner, items);

        const int k = ++counter_;
        const std::string name = "$disj_" + std::to_string(k);
        std::vector<TypeTerm*> tvars;
        for (auto& it : items) collect_vars(it.type, tvars);
        TypeTerm* schema = h.tsort(sym::O);
        for (auto it = items.rbegin(); it != items.rend(); ++it)
            schema = arrow(h, params_for_vars(h, it->type, tvars), schema);
        sig_.add_const(name, schema, e->loc);

        auto head_const = [&]() {
            ExprP c = Expr::constant(name, e->loc);
            c->inst = tvars;
            return c;
        };
        std::vector<ExprP> call_args, head_args;
        ExprP g1 = e->args[0], g2 = e->args[1];
        for (auto& it : items) {
            ExprP occ = it.bound ? Expr::bound(it.name, e->loc) : Expr::var(it.name, e->loc);
            occ->type = it.type;
            call_args.push_back(occ);
            if (!it.bound) {
                head_args.push_back(occ);
                continue;
            }
            ExprP v = Expr::var("$" + it.name + "_" + std::to_string(k), e->loc);
            v->type = it.type;
            head_args.push_back(v);
            g1 = subst_bound(g1, it.name, v);
            g2 = subst_bound(g2, it.name, v);
        }
        ExprP head = Expr::app(head_const(), head_args, e->loc);
        out_.push_back({head, g1, e->loc});
        out_.push_back({head, g2, e->loc});
        return Expr::app(head_const(), call_args, e->loc);
    }

    Signature& sig_;
    std::vector<ElabClause>& out_;
    int& counter_;
};

}  // namespace

void eliminate_disjunctions(Signature& sig, std::vector<ElabClause>& clauses, int& counter) {
    for (size_t i = 0; i < clauses.size(); ++i) {
        if (!clauses[i].body) continue;
        std::vector<ElabClause> extra;
        DisjEliminator d(sig, extra, counter);
        ExprP b = d.goal(clauses[i].body);
        clauses[i].body = b;
        clauses.insert(clauses.end(), extra.begin(), extra.end());
    }
}

// ---- neededness input ----

namespace {

class Summarizer {
public:
    Summarizer(const Signature& sig, ClauseSummary& out, std::vector<SymbolId>& embedded)
        : sig_(sig), out_(out), embedded_(embedded) {}

    enum class Pos { Goal, Clause, Term };

    void walk(const ExprP& e, Pos pos) {
        switch (e->kind) {
        case Expr::Kind::Const:
            if (pos == Pos::Term) term_const(*e);
            else atom(e, pos);
            return;
        case Expr::Kind::Lam:
            walk(e->body, Pos::Term);
            return;
        case Expr::Kind::App:
            break;
        default:
            return;
        }
        if (pos != Pos::Term && logical(e, pos)) return;
        if (pos != Pos::Term && e->head->kind == Expr::Kind::Const) {
            atom(e, pos);
        } else {
            walk(e->head, Pos::Term);
        }
        for (const auto& a : e->args) walk(a, Pos::Term);
    }

private:
    bool logical(const ExprP& e, Pos pos) {
        bool g = pos == Pos::Goal;
        if (is_binop(e, ",") || is_binop(e, "&") || (g && is_binop(e, ";"))) {
            walk(e->args[0], pos);
            walk(e->args[1], pos);
            return true;
        }
        if (is_binop(e, "=>")) {
            walk(e->args[0], g ? Pos::Clause : Pos::Goal);
            walk(e->args[1], g ? Pos::Goal : Pos::Clause);
            return true;
        }
        if (!g && is_binop(e, ":-")) {
            walk(e->args[0], Pos::Clause);
            walk(e->args[1], Pos::Goal);
            return true;
        }
        if ((is_quant(e, "pi") || (g && is_quant(e, "sigma"))) && e->args[0]->kind == Expr::Kind::Lam) {
            walk(e->args[0]->body, pos);
            return true;
        }
        return false;
    }

    void atom(const ExprP& e, Pos pos) {
        const Expr& c = e->kind == Expr::Kind::App ? *e->head : *e;
        const ConstInfo* info = sig_.find(c.name);
        if (!info || info->logical) return;
        if (!info->skel.predicate) {
            term_const(c);
            return;
        }
        if (pos == Pos::Goal) {
            out_.body_atoms.push_back({info->sym, c.inst});
        } else {
            out_.embedded_head_types.insert(out_.embedded_head_types.end(), c.inst.begin(), c.inst.end());
            embedded_.push_back(info->sym);
        }
    }

    void term_const(const Expr& c) {
        if (c.kind != Expr::Kind::Const) return;
        const ConstInfo* info = sig_.find(c.name);
        if (!info || info->logical) return;
        if (info->skel.predicate) {
            out_.nonpred_types.insert(out_.nonpred_types.end(), c.inst.begin(), c.inst.end());
            return;
        }
        for (uint32_t p : info->skel.annotation_params) out_.nonpred_types.push_back(c.inst[p]);
    }

    const Signature& sig_;
    ClauseSummary& out_;
    std::vector<SymbolId>& embedded_;
};

const Expr& head_const(const ExprP& h) { return h->kind == Expr::Kind::App ? *h->head : *h; }

}  // namespace

std::vector<ClauseSummary> summarize(const Signature& sig, const std::vector<ElabClause>& clauses,
                                     std::vector<SymbolId>& embedded) {
    std::vector<ClauseSummary> out;
    for (const auto& c : clauses) {
        ClauseSummary s;
        const Expr& hc = head_const(c.head);
        const ConstInfo* info = sig.find(hc.name);
        s.head = {info->sym, hc.inst};
        Summarizer w(sig, s, embedded);
        if (c.head->kind == Expr::Kind::App)
            for (const auto& a : c.head->args) w.walk(a, Summarizer::Pos::Term);
        if (c.body) w.walk(c.body, Summarizer::Pos::Goal);
        out.push_back(std::move(s));
    }
    return out;
}

// ---- encoding ----

bool first_arg_key(Term* atom, SymbolId& key) {
    atom = deref(atom);
    auto* a = std::get_if<AppData>(&atom->data);
    if (!a || a->args.empty()) return false;
    Term* t = deref(a->args[0]);
    if (auto* l = std::get_if<AbsData>(&t->data)) t = deref(l->body);
    if (auto* b = std::get_if<AppData>(&t->data)) t = deref(b->head);
    if (auto* c = std::get_if<ConstData>(&t->data)) {
        key = c->sym;
        return true;
    }
    return false;
}

TypeTerm* Encoder::close(TypeTerm* t) {
    Heap& h = sig_.store().heap;
    if (!templ_) return resolve_type(h, t);
    t = deref(t);
    switch (t->kind) {
    case K::Var: {
        auto it = tslots_.find(t);
        if (it == tslots_.end()) it = tslots_.emplace(t, static_cast<uint32_t>(tslots_.size())).first;
        return h.tparam(it->second);
    }
    case K::Sort:
    case K::Param:
        return t;
    case K::App:
        break;
    }
    std::vector<TypeTerm*> args;
    for (auto* a : t->args) args.push_back(close(a));
    return h.tapp(t->id, std::move(args));
}

std::vector<TypeTerm*> Encoder::annotations(const Expr& c, const ConstInfo& info, Pos pos) {
    std::vector<TypeTerm*> out;
    if (info.logical) return out;
    if (level_ == TypeOpt::None) {
        for (auto* t : c.inst) out.push_back(close(t));
        return out;
    }
    if (!info.skel.predicate) {
        for (uint32_t p : info.skel.annotation_params) out.push_back(close(c.inst[p]));
        return out;
    }
    const std::vector<bool>* mask = nullptr;
    if (level_ == TypeOpt::Full && needed_) {
        auto it = needed_->find(info.sym);
        if (it != needed_->end()) mask = &it->second;
    }
    auto needed = [&](size_t i) { return !mask || i >= mask->size() || (*mask)[i]; };
    for (size_t i = 0; i < c.inst.size(); ++i)
        if (needed(i)) out.push_back(close(c.inst[i]));
    // a predicate in term position may later become a goal head, so the surplus follows the needed prefix
    if (pos == Pos::Term)
        for (size_t i = 0; i < c.inst.size(); ++i)
            if (!needed(i)) out.push_back(close(c.inst[i]));
    return out;
}

Term* Encoder::encode(const ExprP& e, Pos pos, std::vector<std::string>& binders) {
    Heap& h = sig_.store().heap;
    Symbols& syms = sig_.symbols();
    switch (e->kind) {
    case Expr::Kind::Int:
    case Expr::Kind::Str: {
        SymbolId s = syms.intern(e->name);
        return h.constant(s, 0, syms.name_ptr(s));
    }
    case Expr::Kind::Const: {
        const ConstInfo* info = sig_.find(e->name);
        if (!info) throw TypeError(e->loc, "undeclared constant '" + e->name + "'");
        return h.constant(info->sym, 0, syms.name_ptr(info->sym), annotations(*e, *info, pos));
    }
    case Expr::Kind::Var: {
        if (templ_) {
            auto it = slots_.find(e->name);
            if (it == slots_.end()) it = slots_.emplace(e->name, static_cast<uint32_t>(slots_.size())).first;
            return h.param(it->second);
        }
        auto it = query_vars_->find(e->name);
        if (it == query_vars_->end()) it = query_vars_->emplace(e->name, h.var(0)).first;
        return it->second;
    }
    case Expr::Kind::Bound: {
        for (size_t i = binders.size(); i-- > 0;)
            if (binders[i] == e->name) return h.index(static_cast<uint32_t>(binders.size() - i));
        throw TypeError(e->loc, "unbound identifier '" + e->name + "'");
    }
    case Expr::Kind::Lam: {
        binders.push_back(e->name);
        Term* b = encode(e->body, pos, binders);
        binders.pop_back();
        return h.abs(1, b);
    }
    case Expr::Kind::App:
        break;
    }

    std::vector<Pos> argpos(e->args.size(), Pos::Term);
    Pos headpos = Pos::Term;
    bool g = pos == Pos::Goal;
    if (pos != Pos::Term) {
        if (is_binop(e, ",") || is_binop(e, "&") || (g && is_binop(e, ";"))) {
            argpos = {pos, pos};
        } else if (is_binop(e, "=>")) {
            argpos = g ? std::vector<Pos>{Pos::Clause, Pos::Goal} : std::vector<Pos>{Pos::Goal, Pos::Clause};
        } else if (!g && is_binop(e, ":-")) {
            argpos = {Pos::Clause, Pos::Goal};
        } else if ((is_quant(e, "pi") || (g && is_quant(e, "sigma"))) && e->args[0]->kind == Expr::Kind::Lam) {
            argpos = {pos};
        } else if (e->head->kind == Expr::Kind::Const) {
            headpos = pos;
        }
    }
    if (pos == Pos::Term && (e->head->is_const("=>") || e->head->is_const(":-")))
        throw TypeError(e->loc, "implication is not allowed inside a term");
    Term* head = encode(e->head, headpos, binders);
    std::vector<Term*> args;
    for (size_t i = 0; i < e->args.size(); ++i) args.push_back(encode(e->args[i], argpos[i], binders));
    return h.app(head, std::move(args));
}

ClauseTemplate Encoder::clause(const ElabClause& c) {
    templ_ = true;
    slots_.clear();
    tslots_.clear();
    std::vector<std::string> binders;
    ClauseTemplate t;
    t.head = encode(c.head, Pos::Clause, binders);
    t.body = c.body ? encode(c.body, Pos::Goal, binders) : nullptr;
    t.nvars = static_cast<uint32_t>(slots_.size());
    t.ntvars = static_cast<uint32_t>(tslots_.size());
    t.pred = sig_.find(head_const(c.head).name)->sym;
    t.has_key = first_arg_key(t.head, t.key);
    t.text = print_expr(c.body ? binop(":-", c.head, c.body) : c.head);
    return t;
}

Term* Encoder::query(const ExprP& goal, std::map<std::string, Term*>& vars) {
    templ_ = false;
    query_vars_ = &vars;
    std::vector<std::string> binders;
    Term* t = encode(goal, Pos::Goal, binders);
    query_vars_ = nullptr;
    return t;
}

CompiledProgram compile_program(Signature& sig, const std::vector<Item>& items, TypeOpt level) {
    for (const auto& it : items) {
        if (it.kind == Item::Kind::KindDecl) sig.add_kind(it.kdecl);
    }
    for (const auto& it : items) {
        if (it.kind == Item::Kind::TypeDecl) sig.add_type(it.tdecl);
    }
    CompiledProgram prog;
    std::vector<ElabClause> clauses;
    for (const auto& it : items) {
        if (it.kind != Item::Kind::Clause) continue;
        typecheck(sig, it.clause.expr);
        auto cs = elab(it.clause.expr, it.clause.loc);
        clauses.insert(clauses.end(), cs.begin(), cs.end());
    }
    eliminate_disjunctions(sig, clauses, prog.disjunctions);
    auto summaries = summarize(sig, clauses, prog.embedded);
    prog.needed = find_needed(sig.predicate_arity(), summaries, prog.embedded);
    Encoder enc(sig, level, &prog.needed);
    for (const auto& c : clauses) {
        prog.clauses.push_back(enc.clause(c));
        prog.by_pred[prog.clauses.back().pred].push_back(prog.clauses.size() - 1);
    }
    return prog;
}

// ---- readback ----

namespace {

ExprP read(Term* t, uint32_t depth, const Symbols& syms, const std::map<Term*, std::string>& names,
           std::map<Term*, std::string>& fresh) {
    t = deref(t);
    if (auto* c = std::get_if<ConstData>(&t->data)) return Expr::constant(c->name ? *c->name : syms.name(c->sym));
    if (t->is<VarData>()) {
        auto it = names.find(t);
        if (it != names.end()) return Expr::var(it->second);
        auto f = fresh.find(t);
        if (f == fresh.end()) f = fresh.emplace(t, "_" + std::to_string(fresh.size() + 1)).first;
        return Expr::var(f->second);
    }
    if (auto* ix = std::get_if<IndexData>(&t->data)) {
        if (ix->index > depth) return Expr::bound("#" + std::to_string(ix->index - depth));
        return Expr::bound("x" + std::to_string(depth - ix->index + 1));
    }
    if (auto* a = std::get_if<AppData>(&t->data)) {
        ExprP h = read(a->head, depth, syms, names, fresh);
        std::vector<ExprP> args;
        for (auto* x : a->args) args.push_back(read(x, depth, syms, names, fresh));
        return Expr::app(h, std::move(args));
    }
    if (auto* l = std::get_if<AbsData>(&t->data)) {
        ExprP body = read(l->body, depth + l->arity, syms, names, fresh);
        for (uint32_t i = l->arity; i >= 1; --i) body = Expr::lam("x" + std::to_string(depth + i), body);
        return body;
    }
    throw InternalError("readback of a term with suspensions or params");
}

}  // namespace

ExprP readback(Term* t, const Symbols& syms, const std::map<Term*, std::string>& var_names,
               std::map<Term*, std::string>& fresh_names) {
    return read(t, 0, syms, var_names, fresh_names);
}

}  // namespace hopu
