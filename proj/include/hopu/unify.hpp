#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "hopu/normalize.hpp"
#include "hopu/term.hpp"

namespace hopu {

struct Pair {
    Term* lhs;
    Term* rhs;
};

// An argument of a pattern variable: a de Bruijn index or a constant.
struct Atom {
    bool is_index = false;
    uint32_t index = 0;
    Term* constant = nullptr;

    static Atom of_index(uint32_t i) { return {true, i, nullptr}; }
    static Atom of_const(Term* c) { return {false, 0, c}; }
    uint32_t universe() const { return is_index ? 0 : constant->as<ConstData>().universe; }
    bool operator==(const Atom& o) const;
};

// The atoms of var's arguments if they are distinct indices or constants of a higher universe.
std::optional<std::vector<Atom>> llambda_args(Store& st, Term* var, const std::vector<Term*>& args);
bool check_llambda(Store& st, Term* var, const std::vector<Term*>& args);

// constants of al whose universe is at most u, in al order
std::vector<Atom> raise_up(const std::vector<Atom>& al, uint32_t universe);
// for each z the index #(N-i+1) where i is its position in al and N = |al|
std::vector<uint32_t> select_down(const std::vector<Atom>& zl, const std::vector<Atom>& al);

struct UnifyConfig {
    // compare annotations of constants without arguments too
    bool annotate_nullary = false;
};

class Unifier {
public:
    Unifier(Store& st, std::vector<Pair>& residuals, UnifyConfig cfg = {}) : st_(st), residuals_(residuals), cfg_(cfg) {}

    // false on failure; bindings are left on the trail for the caller to unwind
    bool unify(Term* a, Term* b);
    bool unify_pairs(std::vector<Pair> pairs);
    // retries deferred pairs until no new bindings appear
    bool recheck_residuals();

    std::function<void(Term*, Term*)> on_pair;
    uint64_t deferred = 0;

private:
    enum class Status { Ok, Fail, Defer };

    bool step(const Pair& p, std::vector<Pair>& work);
    bool solve_flex(const Pair& original, Term* x, const std::vector<Atom>& xatoms, Term* target);
    Status mksubst(Term* x, const std::vector<Atom>& xatoms, Term* target);
    Term* bnd(Term* t, uint32_t l);
    Term* flex_case(Term* y, const std::vector<Atom>& bl, uint32_t l);
    std::vector<Atom> full_atoms(uint32_t l) const;

    Store& st_;
    std::vector<Pair>& residuals_;
    UnifyConfig cfg_;

    // state of the current bnd traversal
    Term* x_ = nullptr;
    uint32_t lx_ = 0;
    const std::vector<Atom>* base_ = nullptr;
    bool copy_ = true;
    Status status_ = Status::Ok;
};

}  // namespace hopu
