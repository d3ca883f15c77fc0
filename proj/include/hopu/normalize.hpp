#pragma once

#include "hopu/term.hpp"

namespace hopu {

// λ^binder (head args...) with head a constant, logic variable or index.
struct HeadNormalView {
    uint32_t binder = 0;
    Term* head = nullptr;
    std::vector<Term*> args;

    bool flexible() const { return head->is_unbound_var(); }
};

HeadNormalView head_norm(Store& st, Term* t);

// Suspension-free β-normal form. Bound logic variables are replaced by their values.
Term* full_normalize(Store& st, Term* t);

// λ^k(h t1..tm)  =>  λ^(k+n)(h' ⟦t1,0,n,nil⟧..⟦tm,0,n,nil⟧ #n..#1)
HeadNormalView eta_adjust(Store& st, const HeadNormalView& v, uint32_t n);

// the body of a view, i.e. the term under its binders
Term* view_body(Store& st, const HeadNormalView& v);
Term* view_term(Store& st, const HeadNormalView& v);

// structural equality of suspension-free terms, modulo Ref and bound variables
bool same_term(Term* a, Term* b);

}  // namespace hopu
