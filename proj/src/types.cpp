#include "hopu/types.hpp"

#include <algorithm>
#include <unordered_map>

namespace hopu {

using K = TypeTerm::Kind;

bool type_occurs(TypeTerm* var, TypeTerm* t) {
    t = deref(t);
    if (t == var) return true;
    for (auto* a : t->args)
        if (type_occurs(var, a)) return true;
    return false;
}

bool type_unify(Trail& trail, TypeTerm* a, TypeTerm* b) {
    a = deref(a);
    b = deref(b);
    if (a == b) return true;
    if (a->kind == K::Param || b->kind == K::Param) throw InternalError("unifying a type schema");
    if (a->kind == K::Var) {
        if (type_occurs(a, b)) return false;
        trail.bind_type(a, b);
        return true;
    }
    if (b->kind == K::Var) return type_unify(trail, b, a);
    if (a->id != b->id || a->args.size() != b->args.size()) return false;
    for (size_t i = 0; i < a->args.size(); ++i)
        if (!type_unify(trail, a->args[i], b->args[i])) return false;
    return true;
}

TypeTerm* instantiate_type(Heap& heap, TypeTerm* t, std::vector<TypeTerm*>& params) {
    if (!t->has_params) return t;
    if (t->kind == K::Param) {
        if (params.size() <= t->id) params.resize(t->id + 1, nullptr);
        if (!params[t->id]) params[t->id] = heap.tvar();
        return params[t->id];
    }
    std::vector<TypeTerm*> args;
    args.reserve(t->args.size());
    for (auto* a : t->args) args.push_back(instantiate_type(heap, a, params));
    return heap.tapp(t->id, std::move(args));
}

namespace {
bool has_bound(TypeTerm* t) {
    if (t->kind == K::Var) return t->binding != nullptr;
    for (auto* a : t->args)
        if (has_bound(a)) return true;
    return false;
}
}  // namespace

TypeTerm* resolve_type(Heap& heap, TypeTerm* t) {
    t = deref(t);
    if (!has_bound(t)) return t;
    std::vector<TypeTerm*> args;
    for (auto* a : t->args) args.push_back(resolve_type(heap, a));
    return heap.tapp(t->id, std::move(args));
}

TypeTerm* arrow(Heap& heap, TypeTerm* from, TypeTerm* to) { return heap.tapp(sym::Arrow, {from, to}); }

TypeTerm* target_type(TypeTerm* t) {
    t = deref(t);
    while (t->kind == K::App && t->id == sym::Arrow) t = deref(t->args[1]);
    return t;
}

std::vector<TypeTerm*> arg_types(TypeTerm* t) {
    std::vector<TypeTerm*> out;
    t = deref(t);
    while (t->kind == K::App && t->id == sym::Arrow) {
        out.push_back(t->args[0]);
        t = deref(t->args[1]);
    }
    return out;
}

void collect_params(TypeTerm* t, std::vector<uint32_t>& out) {
    if (t->kind == K::Param) {
        if (std::find(out.begin(), out.end(), t->id) == out.end()) out.push_back(t->id);
        return;
    }
    for (auto* a : t->args) collect_params(a, out);
}

void collect_vars(TypeTerm* t, std::vector<TypeTerm*>& out) {
    t = deref(t);
    if (t->kind == K::Var) {
        if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
        return;
    }
    for (auto* a : t->args) collect_vars(a, out);
}

SkeletonInfo split_skeleton(TypeTerm* schema) {
    SkeletonInfo info;
    TypeTerm* target = target_type(schema);
    info.predicate = target->kind == K::Sort && target->id == sym::O;
    std::vector<uint32_t> all;
    collect_params(schema, all);
    if (info.predicate) {
        info.annotation_params = all;
        return info;
    }
    std::vector<uint32_t> in_target;
    collect_params(target, in_target);
    for (uint32_t p : all)
        if (std::find(in_target.begin(), in_target.end(), p) == in_target.end()) info.annotation_params.push_back(p);
    return info;
}

std::string type_to_string(TypeTerm* t, const Symbols& syms) {
    t = deref(t);
    switch (t->kind) {
    case K::Var:
        return "_T" + std::to_string(t->id);
    case K::Param:
        return "'" + std::string(1, static_cast<char>('A' + t->id % 26)) + (t->id >= 26 ? std::to_string(t->id / 26) : "");
    case K::Sort:
        return syms.name(t->id);
    case K::App:
        break;
    }
    auto paren = [&](TypeTerm* a, bool in_arrow_left) {
        a = deref(a);
        std::string s = type_to_string(a, syms);
        bool is_arrow = a->kind == K::App && a->id == sym::Arrow;
        bool is_app = a->kind == K::App && !a->args.empty() && !is_arrow;
        if ((in_arrow_left && is_arrow) || (!in_arrow_left && (is_app || is_arrow))) return "(" + s + ")";
        return s;
    };
    if (t->id == sym::Arrow) {
        return paren(t->args[0], true) + " -> " + type_to_string(t->args[1], syms);
    }
    std::string s = syms.name(t->id);
    for (auto* a : t->args) s += " " + paren(a, false);
    return s;
}

namespace {

bool occurs_in_any(TypeTerm* v, const std::vector<TypeTerm*>& ts) {
    for (auto* t : ts)
        if (type_occurs(v, t)) return true;
    return false;
}

bool body_needs(TypeTerm* v, const ClauseSummary& c, const NeededMatrix& m) {
    for (const auto& atom : c.body_atoms) {
        auto it = m.find(atom.pred);
        if (it == m.end()) continue;
        for (size_t i = 0; i < atom.types.size() && i < it->second.size(); ++i)
            if (it->second[i] && type_occurs(v, atom.types[i])) return true;
    }
    return false;
}

}  // namespace

NeededMatrix find_needed(const std::map<SymbolId, size_t>& arity, const std::vector<ClauseSummary>& clauses,
                         const std::vector<SymbolId>& embedded) {
    NeededMatrix m;
    for (auto& [p, n] : arity) m[p] = std::vector<bool>(n, false);
    for (SymbolId p : embedded) std::fill(m[p].begin(), m[p].end(), true);

    for (const auto& c : clauses) {
        auto& row = m[c.head.pred];
        const auto& ts = c.head.types;
        for (size_t i = 0; i < ts.size() && i < row.size(); ++i) {
            if (row[i]) continue;
            TypeTerm* t = deref(ts[i]);
            if (t->kind != K::Var) {
                row[i] = true;
                continue;
            }
            bool other = false;
            for (size_t j = 0; j < ts.size() && !other; ++j)
                if (j != i && type_occurs(t, ts[j])) other = true;
            if (other || occurs_in_any(t, c.nonpred_types) || occurs_in_any(t, c.embedded_head_types)) row[i] = true;
        }
    }

    for (bool changed = true; changed;) {
        changed = false;
        for (const auto& c : clauses) {
            auto& row = m[c.head.pred];
            const auto& ts = c.head.types;
            for (size_t i = 0; i < ts.size() && i < row.size(); ++i) {
                if (row[i]) continue;
                TypeTerm* t = deref(ts[i]);
                if (t->kind == K::Var && body_needs(t, c, m)) {
                    row[i] = true;
                    changed = true;
                }
            }
        }
    }
    return m;
}

}  // namespace hopu
