#include "hopu/term.hpp"

#include <sstream>
#include <unordered_set>

namespace hopu {

Env Env::push(EnvItem item) const {
    Env e;
    e.head_ = std::make_shared<const Cell>(Cell{item, head_});
    e.size_ = size_ + 1;
    return e;
}

const EnvItem& Env::at(uint32_t i) const {
    if (i == 0 || i > size_) throw InternalError("environment index out of range");
    const Cell* c = head_.get();
    while (--i) c = c->next.get();
    return c->item;
}

Env Env::drop(uint32_t n) const {
    if (n > size_) throw InternalError("environment drop out of range");
    Env e;
    e.size_ = size_ - n;
    std::shared_ptr<const Cell> c = head_;
    while (n--) c = c->next;
    e.head_ = std::move(c);
    return e;
}

Term* deref(Term* t) {
    for (;;) {
        if (auto* r = std::get_if<RefData>(&t->data)) {
            t = r->target;
        } else if (auto* v = std::get_if<VarData>(&t->data); v && v->binding) {
            t = v->binding;
        } else {
            return t;
        }
    }
}

TypeTerm* deref(TypeTerm* t) {
    while (t->kind == TypeTerm::Kind::Var && t->binding) t = t->binding;
    return t;
}

Term* Heap::make(Term::Data d) {
    terms_.push_back(Term{std::move(d), false});
    return &terms_.back();
}

Term* Heap::constant(SymbolId sym, uint32_t universe, const std::string* name, std::vector<TypeTerm*> annots) {
    bool params = false;
    for (auto* a : annots) params = params || a->has_params;
    Term* t = make(ConstData{sym, universe, name, std::move(annots)});
    t->has_params = params;
    return t;
}

Term* Heap::fresh_constant(uint32_t universe, const std::string* name) {
    return make(ConstData{next_sym_++, universe, name, {}});
}

Term* Heap::var(uint32_t universe) { return make(VarData{nullptr, universe, next_var_++}); }

Term* Heap::index(uint32_t i) {
    if (i == 0) throw InternalError("de Bruijn index 0");
    return make(IndexData{i});
}

Term* Heap::app(Term* head, std::vector<Term*> args) {
    if (args.empty()) return head;
    if (auto* a = std::get_if<AppData>(&head->data)) {
        std::vector<Term*> all = a->args;
        all.insert(all.end(), args.begin(), args.end());
        return app(a->head, std::move(all));
    }
    bool params = head->has_params;
    for (auto* a : args) params = params || a->has_params;
    Term* t = make(AppData{head, std::move(args)});
    t->has_params = params;
    return t;
}

Term* Heap::abs(uint32_t n, Term* body) {
    if (n == 0) return body;
    if (auto* a = std::get_if<AbsData>(&body->data)) return abs(n + a->arity, a->body);
    Term* t = make(AbsData{n, body});
    t->has_params = body->has_params;
    return t;
}

Term* Heap::susp(Term* body, uint32_t ol, uint32_t nl, Env env) {
    if (ol == 0 && nl == 0) return body;
    return make(SuspData{body, ol, nl, std::move(env)});
}

Term* Heap::ref(Term* target) { return make(RefData{target}); }

Term* Heap::param(uint32_t slot) {
    Term* t = make(ParamData{slot});
    t->has_params = true;
    return t;
}

TypeTerm* Heap::tvar() {
    types_.push_back(TypeTerm{TypeTerm::Kind::Var, nullptr, next_tvar_++, {}, false});
    return &types_.back();
}

TypeTerm* Heap::tsort(SymbolId ctor) {
    types_.push_back(TypeTerm{TypeTerm::Kind::Sort, nullptr, ctor, {}, false});
    return &types_.back();
}

TypeTerm* Heap::tapp(SymbolId ctor, std::vector<TypeTerm*> args) {
    bool params = false;
    for (auto* a : args) params = params || a->has_params;
    types_.push_back(TypeTerm{TypeTerm::Kind::App, nullptr, ctor, std::move(args), params});
    return &types_.back();
}

TypeTerm* Heap::tparam(uint32_t slot) {
    types_.push_back(TypeTerm{TypeTerm::Kind::Param, nullptr, slot, {}, true});
    return &types_.back();
}

void Heap::release(const Mark& m) {
    if (m.terms > terms_.size() || m.types > types_.size()) throw InternalError("heap release above top");
    terms_.resize(m.terms, Term{IndexData{1}, false});
    types_.resize(m.types, TypeTerm{TypeTerm::Kind::Var});
    next_var_ = m.vars;
    next_tvar_ = m.tvars;
    next_sym_ = m.syms;
}

std::vector<std::string> Heap::snapshot(size_t limit) const {
    std::vector<std::string> out;
    size_t i = 0;
    for (auto it = terms_.begin(); it != terms_.end() && i < limit; ++it, ++i) {
        std::ostringstream os;
        std::visit(
            [&](const auto& d) {
                using T = std::decay_t<decltype(d)>;
                if constexpr (std::is_same_v<T, ConstData>) {
                    os << "C " << d.sym << ' ' << d.universe;
                    for (auto* a : d.annots) os << ' ' << a;
                } else if constexpr (std::is_same_v<T, VarData>) {
                    os << "V " << d.binding << ' ' << d.universe << ' ' << d.id;
                } else if constexpr (std::is_same_v<T, IndexData>) {
                    os << "I " << d.index;
                } else if constexpr (std::is_same_v<T, AppData>) {
                    os << "A " << d.head;
                    for (auto* a : d.args) os << ' ' << a;
                } else if constexpr (std::is_same_v<T, AbsData>) {
                    os << "L " << d.arity << ' ' << d.body;
                } else if constexpr (std::is_same_v<T, SuspData>) {
                    os << "S " << d.body << ' ' << d.ol << ' ' << d.nl << ' ' << d.env.size();
                } else if constexpr (std::is_same_v<T, RefData>) {
                    os << "R " << d.target;
                } else {
                    os << "P " << d.slot;
                }
            },
            it->data);
        out.push_back(os.str());
    }
    return out;
}

void Trail::undo_to(Mark m) {
    while (entries_.size() > m) {
        Entry& e = entries_.back();
        if (e.tvar) {
            e.tvar->binding = nullptr;
        } else {
            if (e.binding) --bindings_;
            e.term->data = std::move(e.saved);
        }
        entries_.pop_back();
    }
}

void Trail::bind(Term* var, Term* value) {
    auto* v = std::get_if<VarData>(&var->data);
    if (!v || v->binding) throw InternalError("binding a non-variable");
    entries_.push_back(Entry{var, var->data, nullptr, true});
    v->binding = value;
    ++bindings_;
}

void Trail::assign(Term* node, Term* target) {
    if (node == target) return;
    entries_.push_back(Entry{node, std::move(node->data), nullptr, false});
    node->data = RefData{target};
}

void Trail::bind_type(TypeTerm* var, TypeTerm* value) {
    if (var->kind != TypeTerm::Kind::Var || var->binding) throw InternalError("binding a non-type-variable");
    entries_.push_back(Entry{nullptr, IndexData{1}, var, false});
    var->binding = value;
}

bool is_rigid_head(Term* h) {
    h = deref(h);
    return h->is<ConstData>() || h->is<IndexData>();
}

namespace {

void validate_rec(Term* t, std::unordered_set<Term*>& seen, std::unordered_set<Term*>& path) {
    if (seen.count(t)) return;
    if (path.count(t)) throw InternalError("cycle in term graph");
    path.insert(t);
    std::visit(
        [&](auto& d) {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, IndexData>) {
                if (d.index == 0) throw InternalError("index 0");
            } else if constexpr (std::is_same_v<T, VarData>) {
                if (d.binding) validate_rec(d.binding, seen, path);
            } else if constexpr (std::is_same_v<T, AppData>) {
                if (d.args.empty()) throw InternalError("application without arguments");
                if (std::holds_alternative<AppData>(d.head->data)) throw InternalError("application head is an application");
                validate_rec(d.head, seen, path);
                for (auto* a : d.args) validate_rec(a, seen, path);
            } else if constexpr (std::is_same_v<T, AbsData>) {
                if (d.arity == 0) throw InternalError("abstraction of arity 0");
                if (std::holds_alternative<AbsData>(d.body->data)) throw InternalError("abstraction body is an abstraction");
                validate_rec(d.body, seen, path);
            } else if constexpr (std::is_same_v<T, SuspData>) {
                if (d.env.size() != d.ol) throw InternalError("suspension env length differs from ol");
                for (uint32_t i = 1; i <= d.env.size(); ++i) {
                    const EnvItem& it = d.env.at(i);
                    if (it.level > d.nl) throw InternalError("environment level above nl");
                    if (it.term) validate_rec(it.term, seen, path);
                }
                validate_rec(d.body, seen, path);
            } else if constexpr (std::is_same_v<T, RefData>) {
                validate_rec(d.target, seen, path);
            }
        },
        t->data);
    path.erase(t);
    seen.insert(t);
}

}  // namespace

void validate(Term* t) {
    std::unordered_set<Term*> seen, path;
    validate_rec(t, seen, path);
}

}  // namespace hopu
