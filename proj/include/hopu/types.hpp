#pragma once

#include <map>
#include <string>
#include <vector>

#include "hopu/symbols.hpp"
#include "hopu/term.hpp"

namespace hopu {

// Unifies two types, recording bindings on the trail. On failure the caller unwinds.
bool type_unify(Trail& trail, TypeTerm* a, TypeTerm* b);
bool type_occurs(TypeTerm* var, TypeTerm* t);

// Copies a schema, replacing Param slots with params[slot]; missing slots get fresh variables.
TypeTerm* instantiate_type(Heap& heap, TypeTerm* schema, std::vector<TypeTerm*>& params);

// Fully dereferenced copy; shares subterms that contain no bound variables.
TypeTerm* resolve_type(Heap& heap, TypeTerm* t);

std::string type_to_string(TypeTerm* t, const Symbols& syms);

TypeTerm* arrow(Heap& heap, TypeTerm* from, TypeTerm* to);
// target type after stripping all arrows
TypeTerm* target_type(TypeTerm* t);
std::vector<TypeTerm*> arg_types(TypeTerm* t);

// Params of a schema in the order they first occur.
void collect_params(TypeTerm* t, std::vector<uint32_t>& out);
void collect_vars(TypeTerm* t, std::vector<TypeTerm*>& out);

struct SkeletonInfo {
    bool predicate = false;
    // schema params carried as annotations, first-occurrence order
    std::vector<uint32_t> annotation_params;
};

// Non-predicates carry only the params absent from the target type. Predicates carry all of them.
SkeletonInfo split_skeleton(TypeTerm* schema);

// Input to the neededness analysis: one entry per top-level clause.
struct NeededAtom {
    SymbolId pred;
    std::vector<TypeTerm*> types;
};

struct ClauseSummary {
    NeededAtom head;
    // annotation lists of non-predicate constants (and predicates in term position)
    std::vector<TypeTerm*> nonpred_types;
    // annotation lists of predicates heading embedded clauses in the body
    std::vector<TypeTerm*> embedded_head_types;
    // atoms in goal position reachable from the body, including bodies of embedded clauses
    std::vector<NeededAtom> body_atoms;
};

using NeededMatrix = std::map<SymbolId, std::vector<bool>>;

// arity: predicate -> number of type params; embedded: predicates defined by embedded clauses
NeededMatrix find_needed(const std::map<SymbolId, size_t>& arity, const std::vector<ClauseSummary>& clauses,
                         const std::vector<SymbolId>& embedded);

}  // namespace hopu
