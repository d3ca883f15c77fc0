#pragma once

#include <map>
#include <string>
#include <vector>

#include "hopu/symbols.hpp"
#include "hopu/syntax.hpp"
#include "hopu/types.hpp"

namespace hopu {

struct TypeError : SyntaxError {
    using SyntaxError::SyntaxError;
};

enum class TypeOpt { None, Skeleton, Full };

struct ConstInfo {
    SymbolId sym = 0;
    TypeTerm* schema = nullptr;  // params stand for the declared type variables
    uint32_t nparams = 0;
    SkeletonInfo skel;
    bool logical = false;
};

class Signature {
public:
    Signature(Store& st, Symbols& syms);

    void add_kind(const KindDecl& d);
    void add_type(const TypeDecl& d);
    void add_const(const std::string& name, TypeTerm* schema, Loc loc = {});

    const ConstInfo* find(const std::string& name) const;
    const ConstInfo* find(SymbolId s) const;
    bool has_kind(const std::string& name) const { return kinds_.count(name) != 0; }
    // predicate -> number of type params
    std::map<SymbolId, size_t> predicate_arity() const;

    Store& store() { return st_; }
    Symbols& symbols() { return syms_; }

private:
    TypeTerm* schema_of(const TypeExpr& t, std::map<std::string, uint32_t>& params);

    Store& st_;
    Symbols& syms_;
    std::map<std::string, size_t> kinds_;
    std::map<SymbolId, ConstInfo> consts_;
};

// Infers types in place: every node gets a type, every constant its instantiation. Throws TypeError.
// Free variables are collected in first-occurrence order. Without proposition any type is accepted.
void typecheck(Signature& sig, const ExprP& e, std::vector<std::pair<std::string, TypeTerm*>>* vars = nullptr,
               bool proposition = true);

struct ElabClause {
    ExprP head;
    ExprP body;  // null for facts
    Loc loc;
};

// Splits conjunctions and implications of a top-level clause into atomic-headed clauses.
std::vector<ElabClause> elab(const ExprP& clause, Loc loc = {});

// Replaces goal-position disjunctions in clause bodies by calls to fresh predicates $disj_k.
void eliminate_disjunctions(Signature& sig, std::vector<ElabClause>& clauses, int& counter);

std::vector<ClauseSummary> summarize(const Signature& sig, const std::vector<ElabClause>& clauses,
                                     std::vector<SymbolId>& embedded);

// A clause in instantiable form: term params are clause variables, type params clause type variables.
struct ClauseTemplate {
    SymbolId pred = 0;
    Term* head = nullptr;
    Term* body = nullptr;
    uint32_t nvars = 0;
    uint32_t ntvars = 0;
    bool has_key = false;
    SymbolId key = 0;
    std::string text;
};

// the rigid constant heading the first argument of an atom, if any
bool first_arg_key(Term* atom, SymbolId& key);

class Encoder {
public:
    Encoder(Signature& sig, TypeOpt level, const NeededMatrix* needed) : sig_(sig), level_(level), needed_(needed) {}

    ClauseTemplate clause(const ElabClause& c);
    // query variables become logic variables at universe 0, remaining type variables stay as they are
    Term* query(const ExprP& goal, std::map<std::string, Term*>& vars);

private:
    enum class Pos { Goal, Clause, Term };
    Term* encode(const ExprP& e, Pos pos, std::vector<std::string>& binders);
    std::vector<TypeTerm*> annotations(const Expr& c, const ConstInfo& info, Pos pos);
    TypeTerm* close(TypeTerm* t);

    Signature& sig_;
    TypeOpt level_;
    const NeededMatrix* needed_;
    bool templ_ = false;
    std::map<std::string, Term*>* query_vars_ = nullptr;
    std::map<std::string, uint32_t> slots_;
    std::map<TypeTerm*, uint32_t> tslots_;
};

struct CompiledProgram {
    std::vector<ClauseTemplate> clauses;
    std::map<SymbolId, std::vector<size_t>> by_pred;
    NeededMatrix needed;
    // predicates heading clauses inside augment goals
    std::vector<SymbolId> embedded;
    int disjunctions = 0;
};

CompiledProgram compile_program(Signature& sig, const std::vector<Item>& items, TypeOpt level);

// Named readback of a suspension-free term. Bound variables are x1, x2, ... outermost first.
ExprP readback(Term* t, const Symbols& syms, const std::map<Term*, std::string>& var_names,
               std::map<Term*, std::string>& fresh_names);

}  // namespace hopu
