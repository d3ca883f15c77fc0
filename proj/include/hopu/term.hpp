#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace hopu {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InternalError : Error {
    using Error::Error;
};

using SymbolId = uint32_t;

struct Term;
struct TypeTerm;

// Dum(l) when term is null, Bndg(term, l) otherwise.
struct EnvItem {
    Term* term = nullptr;
    uint32_t level = 0;

    static EnvItem dum(uint32_t l) { return {nullptr, l}; }
    static EnvItem bndg(Term* t, uint32_t l) { return {t, l}; }
    bool is_dum() const { return term == nullptr; }
};

// Persistent cons list; push never mutates the receiver.
class Env {
    struct Cell {
        EnvItem item;
        std::shared_ptr<const Cell> next;
    };
    std::shared_ptr<const Cell> head_;
    uint32_t size_ = 0;

public:
    Env() = default;
    uint32_t size() const { return size_; }
    bool empty() const { return size_ == 0; }
    Env push(EnvItem item) const;
    // 1-based, index 1 is the most recently pushed entry
    const EnvItem& at(uint32_t i) const;
    // the tail after dropping the first n entries
    Env drop(uint32_t n) const;
};

struct ConstData {
    SymbolId sym;
    uint32_t universe;
    const std::string* name;
    std::vector<TypeTerm*> annots;
};
struct VarData {
    Term* binding;
    uint32_t universe;
    uint32_t id;
};
struct IndexData {
    uint32_t index;
};
struct AppData {
    Term* head;
    std::vector<Term*> args;
};
struct AbsData {
    uint32_t arity;
    Term* body;
};
struct SuspData {
    Term* body;
    uint32_t ol, nl;
    Env env;
};
struct RefData {
    Term* target;
};
// Clause-template slot. Replaced during instantiation, never seen by the normalizer.
struct ParamData {
    uint32_t slot;
};

struct Term {
    using Data = std::variant<ConstData, VarData, IndexData, AppData, AbsData, SuspData, RefData, ParamData>;
    Data data;
    bool has_params = false;

    template <class T> bool is() const { return std::holds_alternative<T>(data); }
    template <class T> T& as() { return std::get<T>(data); }
    template <class T> const T& as() const { return std::get<T>(data); }

    bool is_unbound_var() const { return is<VarData>() && as<VarData>().binding == nullptr; }
};

struct TypeTerm {
    enum class Kind : uint8_t { Var, Sort, App, Param };
    Kind kind;
    TypeTerm* binding = nullptr;
    uint32_t id = 0;  // var id, ctor symbol or param slot
    std::vector<TypeTerm*> args;
    bool has_params = false;
};

Term* deref(Term* t);
TypeTerm* deref(TypeTerm* t);

class Heap {
    std::deque<Term> terms_;
    std::deque<TypeTerm> types_;
    uint32_t next_var_ = 0;
    uint32_t next_tvar_ = 0;
    uint32_t next_sym_ = 1u << 30;

public:
    struct Mark {
        size_t terms, types;
        uint32_t vars, tvars, syms;
    };

    Term* make(Term::Data d);
    Term* constant(SymbolId sym, uint32_t universe, const std::string* name, std::vector<TypeTerm*> annots = {});
    // a constant with a symbol id nobody else has
    Term* fresh_constant(uint32_t universe, const std::string* name);
    Term* var(uint32_t universe);
    Term* index(uint32_t i);
    Term* app(Term* head, std::vector<Term*> args);
    Term* abs(uint32_t n, Term* body);
    Term* susp(Term* body, uint32_t ol, uint32_t nl, Env env);
    Term* ref(Term* target);
    Term* param(uint32_t slot);

    TypeTerm* tvar();
    TypeTerm* tsort(SymbolId ctor);
    TypeTerm* tapp(SymbolId ctor, std::vector<TypeTerm*> args);
    TypeTerm* tparam(uint32_t slot);

    Mark mark() const { return {terms_.size(), types_.size(), next_var_, next_tvar_, next_sym_}; }
    void release(const Mark& m);
    size_t size() const { return terms_.size(); }
    size_t type_count() const { return types_.size(); }

    // one line per node in [0, limit); children are identified by address
    std::vector<std::string> snapshot(size_t limit) const;
};

class Trail {
    struct Entry {
        Term* term;
        Term::Data saved;
        TypeTerm* tvar;
        bool binding;
    };
    std::vector<Entry> entries_;
    uint64_t bindings_ = 0;

public:
    using Mark = size_t;
    Mark mark() const { return entries_.size(); }
    void undo_to(Mark m);
    void bind(Term* var, Term* value);
    // destructive rewrite of a node into a reference to an equivalent term
    void assign(Term* node, Term* target);
    void bind_type(TypeTerm* var, TypeTerm* value);
    // number of live term-variable bindings
    uint64_t binding_count() const { return bindings_; }
};

struct Stats {
    uint64_t beta = 0;
    uint64_t rewrites = 0;
    uint64_t hnorm_calls = 0;
};

struct Store {
    Heap heap;
    Trail trail;
    Stats stats;
    // last universe label handed out to a generic constant
    uint32_t universe_counter = 0;
};

// Checks the structural invariants of a term graph. Throws InternalError on violation.
void validate(Term* t);

bool is_rigid_head(Term* h);

}  // namespace hopu
