#include "hopu/normalize.hpp"

namespace hopu {

namespace {

// A term under an implicit suspension. Non-abstractions are only ever returned with a trivial one.
struct Susp {
    Term* term;
    uint32_t ol = 0, nl = 0;
    Env env;
    bool trivial() const { return ol == 0 && nl == 0; }
};

class Normalizer {
    Store& st_;
    Heap& heap_;

public:
    explicit Normalizer(Store& st) : st_(st), heap_(st.heap) {}

    Term* explicit_form(const Susp& r) {
        if (r.trivial()) return r.term;
        const auto& a = r.term->as<AbsData>();
        Env e = r.env;
        for (uint32_t i = 0; i < a.arity; ++i) e = e.push(EnvItem::dum(r.nl + i));
        return heap_.abs(a.arity, heap_.susp(a.body, r.ol + a.arity, r.nl + a.arity, e));
    }

    Susp hnorm(Term* t, uint32_t ol, uint32_t nl, const Env& env, bool whnf) {
        ++st_.stats.hnorm_calls;
        while (auto* r = std::get_if<RefData>(&t->data)) t = r->target;
        const bool trivial = ol == 0 && nl == 0;

        switch (t->data.index()) {
        case 0:  // constant
            return {t};
        case 1: {  // logic variable; bindings are closed so the suspension vanishes
            auto& v = t->as<VarData>();
            if (v.binding) return hnorm(v.binding, 0, 0, Env{}, whnf);
            return {t};
        }
        case 2: {
            uint32_t i = t->as<IndexData>().index;
            if (trivial) return {t};
            if (i > ol) return {heap_.index(i - ol + nl)};
            const EnvItem& item = env.at(i);
            if (item.is_dum()) return {heap_.index(nl - item.level)};
            uint32_t shift = nl - item.level;
            Susp r = hnorm(item.term, 0, 0, Env{}, whnf);
            if (shift == 0) return r;
            if (!r.trivial()) return {r.term, r.ol, r.nl + shift, r.env};
            return hnorm(r.term, 0, shift, Env{}, whnf);
        }
        case 3:
            return app_case(t, ol, nl, env, whnf);
        case 4: {
            auto& a = t->as<AbsData>();
            if (whnf) return {t, ol, nl, env};
            if (trivial) {
                Term* body = a.body;
                Susp b = hnorm(body, 0, 0, Env{}, false);
                if (b.term == body) return {t};
                Term* nt = heap_.abs(a.arity, b.term);
                st_.trail.assign(t, nt);
                ++st_.stats.rewrites;
                return {nt};
            }
            Env e = env;
            for (uint32_t i = 0; i < a.arity; ++i) e = e.push(EnvItem::dum(nl + i));
            Susp b = hnorm(a.body, ol + a.arity, nl + a.arity, e, false);
            return {heap_.abs(a.arity, b.term)};
        }
        case 5: {
            auto& s = t->as<SuspData>();
            Susp r = hnorm(s.body, s.ol, s.nl, s.env, whnf);
            Term* ex = explicit_form(r);
            st_.trail.assign(t, ex);
            ++st_.stats.rewrites;
            if (trivial) return r;
            return hnorm(ex, ol, nl, env, whnf);
        }
        default:
            throw InternalError("normalizer met a clause-template slot");
        }
    }

    // Suspends an argument, resolving the atomic cases (r1-r4, r7) on the spot.
    Term* wrap(Term* a, uint32_t ol, uint32_t nl, const Env& env) {
        if (ol == 0 && nl == 0) return a;
        while (auto* r = std::get_if<RefData>(&a->data)) a = r->target;
        if (a->is<ConstData>() || a->is_unbound_var()) return a;
        auto* ix = std::get_if<IndexData>(&a->data);
        if (!ix) return heap_.susp(a, ol, nl, env);
        if (ix->index > ol) return heap_.index(ix->index - ol + nl);
        const EnvItem& item = env.at(ix->index);
        if (item.is_dum()) return heap_.index(nl - item.level);
        uint32_t shift = nl - item.level;
        Term* s = item.term;
        while (auto* r = std::get_if<RefData>(&s->data)) s = r->target;
        if (auto* sd = std::get_if<SuspData>(&s->data)) {
            if (shift == 0) return s;
            return heap_.susp(sd->body, sd->ol, sd->nl + shift, sd->env);
        }
        return heap_.susp(s, 0, shift, Env{});
    }

    Susp app_case(Term* t, uint32_t ol, uint32_t nl, const Env& env, bool whnf) {
        const bool trivial = ol == 0 && nl == 0;
        Term* head = t->as<AppData>().head;
        // copy: t may be overwritten by a nested rewrite of a shared node
        std::vector<Term*> args = t->as<AppData>().args;
        const size_t k = args.size();

        Susp f = hnorm(head, ol, nl, env, true);
        size_t i = 0;
        while (i < k && f.term->is<AbsData>()) {
            auto& a = f.term->as<AbsData>();
            uint32_t n = a.arity;
            Term* body = a.body;
            size_t j = std::min<size_t>(n, k - i);
            Env e = f.env;
            for (size_t q = 0; q < j; ++q) e = e.push(EnvItem::bndg(wrap(args[i + q], ol, nl, env), f.nl));
            st_.stats.beta += j;
            uint32_t nol = f.ol + static_cast<uint32_t>(j), nnl = f.nl;
            i += j;
            if (j < n) {
                f = Susp{heap_.abs(n - static_cast<uint32_t>(j), body), nol, nnl, e};
                break;
            }
            f = hnorm(body, nol, nnl, e, i < k ? true : whnf);
        }

        Susp result;
        if (i == k) {
            if (!f.trivial() && !whnf) f = hnorm(f.term, f.ol, f.nl, f.env, false);
            result = f;
        } else {
            if (i == 0 && trivial && f.term == head) return {t};
            std::vector<Term*> rest;
            rest.reserve(k - i);
            for (size_t q = i; q < k; ++q) rest.push_back(wrap(args[q], ol, nl, env));
            result = Susp{heap_.app(f.term, std::move(rest))};
        }
        if (trivial && result.trivial() && result.term != t) {
            st_.trail.assign(t, result.term);
            ++st_.stats.rewrites;
        }
        return result;
    }
};

}  // namespace

HeadNormalView head_norm(Store& st, Term* t) {
    Normalizer n(st);
    Term* r = n.hnorm(t, 0, 0, Env{}, false).term;
    HeadNormalView v;
    if (auto* a = std::get_if<AbsData>(&r->data)) {
        v.binder = a->arity;
        r = a->body;
        while (auto* rf = std::get_if<RefData>(&r->data)) r = rf->target;
    }
    if (auto* ap = std::get_if<AppData>(&r->data)) {
        v.head = deref(ap->head);
        v.args = ap->args;
    } else {
        v.head = r;
    }
    return v;
}

Term* full_normalize(Store& st, Term* t) {
    HeadNormalView v = head_norm(st, t);
    std::vector<Term*> args;
    args.reserve(v.args.size());
    for (auto* a : v.args) args.push_back(full_normalize(st, a));
    return st.heap.abs(v.binder, st.heap.app(v.head, std::move(args)));
}

HeadNormalView eta_adjust(Store& st, const HeadNormalView& v, uint32_t n) {
    if (n == 0) return v;
    HeadNormalView r;
    r.binder = v.binder + n;
    if (auto* ix = std::get_if<IndexData>(&v.head->data))
        r.head = st.heap.index(ix->index + n);
    else
        r.head = v.head;
    r.args.reserve(v.args.size() + n);
    for (auto* a : v.args) r.args.push_back(st.heap.susp(a, 0, n, Env{}));
    for (uint32_t i = n; i >= 1; --i) r.args.push_back(st.heap.index(i));
    return r;
}

Term* view_body(Store& st, const HeadNormalView& v) { return st.heap.app(v.head, v.args); }

Term* view_term(Store& st, const HeadNormalView& v) { return st.heap.abs(v.binder, view_body(st, v)); }

bool same_term(Term* a, Term* b) {
    a = deref(a);
    b = deref(b);
    if (a == b) return true;
    if (a->data.index() != b->data.index()) return false;
    if (auto* ca = std::get_if<ConstData>(&a->data)) return ca->sym == b->as<ConstData>().sym;
    if (auto* ia = std::get_if<IndexData>(&a->data)) return ia->index == b->as<IndexData>().index;
    if (auto* aa = std::get_if<AbsData>(&a->data)) {
        auto& ab = b->as<AbsData>();
        return aa->arity == ab.arity && same_term(aa->body, ab.body);
    }
    if (auto* pa = std::get_if<AppData>(&a->data)) {
        auto& pb = b->as<AppData>();
        if (pa->args.size() != pb.args.size() || !same_term(pa->head, pb.head)) return false;
        for (size_t i = 0; i < pa->args.size(); ++i)
            if (!same_term(pa->args[i], pb.args[i])) return false;
        return true;
    }
    return false;
}

}  // namespace hopu
