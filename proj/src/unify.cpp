#include "hopu/unify.hpp"

#include <algorithm>

#include "hopu/types.hpp"

namespace hopu {

bool Atom::operator==(const Atom& o) const {
    if (is_index != o.is_index) return false;
    if (is_index) return index == o.index;
    return constant->as<ConstData>().sym == o.constant->as<ConstData>().sym;
}

std::optional<std::vector<Atom>> llambda_args(Store& st, Term* var, const std::vector<Term*>& args) {
    uint32_t lv = deref(var)->as<VarData>().universe;
    std::vector<Atom> out;
    out.reserve(args.size());
    for (auto* a : args) {
        HeadNormalView v = head_norm(st, a);
        if (v.binder != 0 || !v.args.empty()) return std::nullopt;
        Atom at;
        if (auto* ix = std::get_if<IndexData>(&v.head->data)) {
            at = Atom::of_index(ix->index);
        } else if (auto* c = std::get_if<ConstData>(&v.head->data)) {
            if (c->universe <= lv) return std::nullopt;
            at = Atom::of_const(v.head);
        } else {
            return std::nullopt;
        }
        if (std::find(out.begin(), out.end(), at) != out.end()) return std::nullopt;
        out.push_back(at);
    }
    return out;
}

bool check_llambda(Store& st, Term* var, const std::vector<Term*>& args) {
    return llambda_args(st, var, args).has_value();
}

std::vector<Atom> raise_up(const std::vector<Atom>& al, uint32_t universe) {
    std::vector<Atom> out;
    for (const auto& a : al)
        if (!a.is_index && a.universe() <= universe) out.push_back(a);
    return out;
}

std::vector<uint32_t> select_down(const std::vector<Atom>& zl, const std::vector<Atom>& al) {
    std::vector<uint32_t> out;
    out.reserve(zl.size());
    const uint32_t n = static_cast<uint32_t>(al.size());
    for (const auto& z : zl) {
        auto it = std::find(al.begin(), al.end(), z);
        if (it == al.end()) throw InternalError("select_down: atom not in list");
        uint32_t i = static_cast<uint32_t>(it - al.begin()) + 1;
        out.push_back(n - i + 1);
    }
    return out;
}

bool Unifier::unify(Term* a, Term* b) { return unify_pairs({Pair{a, b}}); }

bool Unifier::unify_pairs(std::vector<Pair> pairs) {
    std::reverse(pairs.begin(), pairs.end());
    while (!pairs.empty()) {
        Pair p = pairs.back();
        pairs.pop_back();
        if (!step(p, pairs)) return false;
    }
    return true;
}

bool Unifier::recheck_residuals() {
    while (!residuals_.empty()) {
        uint64_t before = st_.trail.binding_count();
        std::vector<Pair> pending;
        pending.swap(residuals_);
        if (!unify_pairs(std::move(pending))) return false;
        if (st_.trail.binding_count() == before) break;
    }
    return true;
}

namespace {
uint32_t var_universe(Term* v) { return v->as<VarData>().universe; }
}  // namespace

bool Unifier::step(const Pair& p, std::vector<Pair>& work) {
    if (deref(p.lhs) == deref(p.rhs)) return true;
    if (on_pair) on_pair(p.lhs, p.rhs);
    HeadNormalView vt = head_norm(st_, p.lhs);
    HeadNormalView vs = head_norm(st_, p.rhs);
    if (vt.binder < vs.binder)
        vt = eta_adjust(st_, vt, vs.binder - vt.binder);
    else if (vs.binder < vt.binder)
        vs = eta_adjust(st_, vs, vt.binder - vs.binder);

    const bool ft = vt.flexible(), fs = vs.flexible();
    if (!ft && !fs) {
        Term* ht = vt.head;
        Term* hs = vs.head;
        if (auto* it = std::get_if<IndexData>(&ht->data)) {
            auto* is = std::get_if<IndexData>(&hs->data);
            if (!is || is->index != it->index) return false;
        } else {
            auto* ct = std::get_if<ConstData>(&ht->data);
            auto* cs = std::get_if<ConstData>(&hs->data);
            if (!ct || !cs || ct->sym != cs->sym) return false;
            if (!vt.args.empty() || cfg_.annotate_nullary) {
                size_t n = std::min(ct->annots.size(), cs->annots.size());
                for (size_t i = 0; i < n; ++i)
                    if (!type_unify(st_.trail, ct->annots[i], cs->annots[i])) return false;
            }
        }
        if (vt.args.size() != vs.args.size()) return false;
        for (size_t i = vt.args.size(); i-- > 0;) work.push_back(Pair{vt.args[i], vs.args[i]});
        return true;
    }

    if (ft && fs) {
        auto at = llambda_args(st_, vt.head, vt.args);
        auto as = llambda_args(st_, vs.head, vs.args);
        bool t_is_x;
        if (at && as) {
            uint32_t ut = var_universe(vt.head), us = var_universe(vs.head);
            // the variable of the higher universe gets bound, which avoids lowering it
            t_is_x = ut != us ? ut > us : true;
        } else if (at) {
            t_is_x = true;
        } else if (as) {
            t_is_x = false;
        } else {
            residuals_.push_back(p);
            ++deferred;
            return true;
        }
        if (t_is_x) return solve_flex(p, vt.head, *at, view_body(st_, vs));
        return solve_flex(p, vs.head, *as, view_body(st_, vt));
    }

    const HeadNormalView& flex = ft ? vt : vs;
    const HeadNormalView& rigid = ft ? vs : vt;
    auto atoms = llambda_args(st_, flex.head, flex.args);
    if (!atoms) {
        residuals_.push_back(p);
        ++deferred;
        return true;
    }
    return solve_flex(p, flex.head, *atoms, view_body(st_, rigid));
}

bool Unifier::solve_flex(const Pair& original, Term* x, const std::vector<Atom>& xatoms, Term* target) {
    Trail::Mark m = st_.trail.mark();
    switch (mksubst(x, xatoms, target)) {
    case Status::Ok:
        return true;
    case Status::Fail:
        return false;
    case Status::Defer:
        st_.trail.undo_to(m);
        residuals_.push_back(original);
        ++deferred;
        return true;
    }
    return false;
}

Unifier::Status Unifier::mksubst(Term* x, const std::vector<Atom>& xatoms, Term* target) {
    HeadNormalView v = head_norm(st_, target);
    const uint32_t n = static_cast<uint32_t>(xatoms.size());
    if (v.head == x) {
        auto bl = llambda_args(st_, x, v.args);
        if (!bl) return Status::Defer;
        const uint32_t k = v.binder, m = n + k;
        std::vector<Atom> al;
        for (const auto& a : xatoms) al.push_back(a.is_index ? Atom::of_index(a.index + k) : a);
        for (uint32_t i = k; i >= 1; --i) al.push_back(Atom::of_index(i));
        if (al.size() != bl->size()) return Status::Fail;
        if (m == 0) return Status::Ok;
        std::vector<Term*> ws;
        for (uint32_t i = 1; i <= m; ++i)
            if (al[i - 1] == (*bl)[i - 1]) ws.push_back(st_.heap.index(m - i + 1));
        Term* h = st_.heap.var(var_universe(x));
        st_.trail.bind(x, st_.heap.abs(m, st_.heap.app(h, std::move(ws))));
        return Status::Ok;
    }

    x_ = x;
    lx_ = var_universe(x);
    base_ = &xatoms;
    copy_ = n > 0;
    status_ = Status::Ok;
    Term* s = bnd(target, 0);
    if (status_ != Status::Ok) return status_;
    st_.trail.bind(x, copy_ ? st_.heap.abs(n, s) : target);
    return Status::Ok;
}

std::vector<Atom> Unifier::full_atoms(uint32_t l) const {
    std::vector<Atom> al;
    al.reserve(base_->size() + l);
    for (const auto& a : *base_) al.push_back(a.is_index ? Atom::of_index(a.index + l) : a);
    for (uint32_t i = l; i >= 1; --i) al.push_back(Atom::of_index(i));
    return al;
}

Term* Unifier::bnd(Term* t, uint32_t l) {
    HeadNormalView v = head_norm(st_, t);
    const uint32_t l2 = l + v.binder;
    const uint32_t n = static_cast<uint32_t>(base_->size());
    Term* h = v.head;

    if (auto* c = std::get_if<ConstData>(&h->data)) {
        if (c->universe > lx_) {
            auto it = std::find(base_->begin(), base_->end(), Atom::of_const(h));
            if (it == base_->end()) {
                status_ = Status::Fail;
                return nullptr;
            }
            uint32_t i = static_cast<uint32_t>(it - base_->begin()) + 1;
            h = st_.heap.index(n + l2 - i + 1);
        }
    } else if (auto* ix = std::get_if<IndexData>(&h->data)) {
        if (ix->index > l2) {
            auto it = std::find(base_->begin(), base_->end(), Atom::of_index(ix->index - l2));
            if (it == base_->end()) {
                status_ = Status::Fail;
                return nullptr;
            }
            uint32_t i = static_cast<uint32_t>(it - base_->begin()) + 1;
            h = st_.heap.index(n + l2 - i + 1);
        }
    } else {
        if (h == x_) {
            status_ = Status::Fail;
            return nullptr;
        }
        auto bl = llambda_args(st_, h, v.args);
        if (!bl) {
            status_ = Status::Defer;
            return nullptr;
        }
        Term* body = flex_case(h, *bl, l2);
        if (!copy_) return t;
        return st_.heap.abs(v.binder, body);
    }

    std::vector<Term*> args;
    if (copy_) args.reserve(v.args.size());
    for (auto* a : v.args) {
        Term* r = bnd(a, l2);
        if (status_ != Status::Ok) return nullptr;
        if (copy_) args.push_back(r);
    }
    if (!copy_) return t;
    return st_.heap.abs(v.binder, st_.heap.app(h, std::move(args)));
}

Term* Unifier::flex_case(Term* y, const std::vector<Atom>& bl, uint32_t l) {
    Heap& heap = st_.heap;
    const uint32_t ly = var_universe(y);
    const uint32_t m = static_cast<uint32_t>(bl.size());
    std::vector<Atom> al = full_atoms(l);
    std::vector<Atom> zl;
    for (const auto& a : al)
        if (std::find(bl.begin(), bl.end(), a) != bl.end()) zl.push_back(a);

    auto indices = [&](const std::vector<uint32_t>& ix, std::vector<Term*>& out) {
        for (uint32_t i : ix) out.push_back(heap.index(i));
    };

    if (lx_ < ly) {
        std::vector<Atom> cs = raise_up(al, ly);
        Term* h = heap.var(lx_);
        std::vector<Term*> yargs;
        for (const auto& c : cs) yargs.push_back(c.constant);
        indices(select_down(zl, bl), yargs);
        st_.trail.bind(y, heap.abs(m, heap.app(h, std::move(yargs))));
        std::vector<Term*> rargs;
        indices(select_down(cs, al), rargs);
        indices(select_down(zl, al), rargs);
        return heap.app(h, std::move(rargs));
    }

    std::vector<Atom> cs = raise_up(bl, lx_);
    std::vector<uint32_t> zdown = select_down(zl, bl);
    // with no arguments there is nothing to prune, and renaming Y would only add a variable
    Term* h = y;
    if (m > 0 || !cs.empty()) {
        h = heap.var(ly);
        std::vector<Term*> yargs;
        indices(select_down(cs, bl), yargs);
        indices(zdown, yargs);
        st_.trail.bind(y, heap.abs(m, heap.app(h, std::move(yargs))));
    }
    std::vector<Term*> rargs;
    for (const auto& c : cs) rargs.push_back(c.constant);
    indices(select_down(zl, al), rargs);
    return heap.app(h, std::move(rargs));
}

}  // namespace hopu
