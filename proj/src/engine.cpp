#include "hopu/engine.hpp"

#include <deque>
#include <fstream>
#include <iostream>
#include <sstream>

namespace hopu {

TypeOpt parse_type_opt(const std::string& s) {
    if (s == "none") return TypeOpt::None;
    if (s == "skeleton") return TypeOpt::Skeleton;
    if (s == "full") return TypeOpt::Full;
    throw Error("unknown type optimization level '" + s + "' (expected none, skeleton or full)");
}

const char* type_opt_name(TypeOpt t) {
    switch (t) {
    case TypeOpt::None:
        return "none";
    case TypeOpt::Skeleton:
        return "skeleton";
    case TypeOpt::Full:
        return "full";
    }
    return "?";
}

std::string format_answer(const Answer& a, bool final_period) {
    std::ostringstream os;
    for (const auto& [n, v] : a.bindings) os << n << " = " << v << (final_period ? "." : "") << "\n";
    for (const auto& [l, r] : a.residuals) os << "| <" << l << ", " << r << ">\n";
    return os.str();
}

// ---- engine ----

Engine::Engine(EngineConfig cfg) : cfg_(cfg) { rebuild({}); }

Engine::~Engine() = default;

void Engine::rebuild(const std::vector<Item>& items) {
    auto st = std::make_unique<Store>();
    auto syms = std::make_unique<Symbols>();
    auto sig = std::make_unique<Signature>(*st, *syms);
    CompiledProgram prog = compile_program(*sig, items, cfg_.type_opt);
    store_ = std::move(st);
    syms_ = std::move(syms);
    sig_ = std::move(sig);
    prog_ = std::move(prog);
    items_ = items;
}

void Engine::load_text(const std::string& text) {
    if (solving_) throw Error("cannot load while a query is active");
    std::vector<Item> items = items_;
    auto more = parse_program(text);
    items.insert(items.end(), more.begin(), more.end());
    try {
        rebuild(items);
    } catch (...) {
        // the failed attempt overwrote the types stored in the old items
        rebuild(std::vector<Item>(items_));
        throw;
    }
}

void Engine::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        load_text(ss.str());
    } catch (const SyntaxError& e) {
        throw Error(path + ":" + e.what());
    }
}

void Engine::set_type_opt(TypeOpt level) {
    if (solving_) throw Error("cannot change the type optimization while a query is active");
    cfg_.type_opt = level;
    rebuild(std::vector<Item>(items_));
}

std::unique_ptr<Solution> Engine::solve(const std::string& query, bool keep_snapshot) {
    if (solving_) throw Error("another query is still active");
    Heap::Mark pre = store_->heap.mark();
    Term* g = nullptr;
    std::vector<std::pair<std::string, Term*>> ordered;
    std::vector<TypeTerm*> tvars;
    try {
        ExprP goal = parse_query(query);
        std::vector<std::pair<std::string, TypeTerm*>> typed;
        typecheck(*sig_, goal, &typed);
        std::map<std::string, Term*> vars;
        Encoder enc(*sig_, cfg_.type_opt, &prog_.needed);
        g = enc.query(goal, vars);
        for (auto& [name, ty] : typed) {
            auto it = vars.find(name);
            if (it != vars.end()) ordered.emplace_back(name, it->second);
            collect_vars(ty, tvars);
        }
    } catch (...) {
        store_->heap.release(pre);
        throw;
    }
    std::unique_ptr<Solution> s(new Solution(*this, g, std::move(ordered), std::move(tvars), keep_snapshot));
    s->heap0_ = pre;
    return s;
}

// ---- the abstract machine ----

namespace {

struct DynClause {
    Term* head;
    Term* body;  // may be null
    uint32_t k;  // number of pi binders over head and body
    SymbolId pred;
    bool has_key;
    SymbolId key;
};

struct Block {
    std::vector<DynClause> clauses;
    std::shared_ptr<const Block> parent;
};
using Ctx = std::shared_ptr<const Block>;

struct Goal {
    Term* term;
    Ctx ctx;
    uint32_t universe;
};

struct GoalCell {
    Goal goal;
    std::shared_ptr<const GoalCell> next;
};
using Goals = std::shared_ptr<const GoalCell>;

Goals cons(Goal g, Goals rest) { return std::make_shared<const GoalCell>(GoalCell{std::move(g), std::move(rest)}); }

// position in the clause list of a predicate: dynamic blocks newest first, then the static clauses
struct Cursor {
    const Block* block;
    size_t index;
    bool in_static;
};

struct Candidate {
    const DynClause* dyn = nullptr;
    const ClauseTemplate* stat = nullptr;
};

struct Choice {
    enum class Kind { Bottom, Alternative, Clauses } kind;
    Goals goals;  // Alternative: the goals to resume; Clauses: the goals after the atom
    Goal atom{};
    SymbolId pred = 0;
    bool has_key = false;
    SymbolId key = 0;
    Cursor cursor{};
    Trail::Mark trail = 0;
    Heap::Mark heap{};
    std::vector<Pair> residuals;
    uint32_t universe_counter = 0;
};

}  // namespace

struct Solution::Machine {
    Engine& eng;
    Store& st;
    const CompiledProgram& prog;
    const Symbols& syms;
    std::ostream& trace;
    std::vector<Pair> residuals;
    Unifier unifier;
    std::vector<Choice> choices;
    Goals goals;
    Term* true_term;
    std::vector<std::pair<std::string, Term*>> vars;
    std::vector<TypeTerm*> tvars;
    std::set<SymbolId> dynamic_preds;
    std::deque<std::string> generic_names;
    uint64_t* steps;

    Machine(Engine& e, uint64_t* step_counter)
        : eng(e),
          st(e.store()),
          prog(e.program()),
          syms(e.symbols()),
          trace(e.config().trace_out ? *e.config().trace_out : std::cerr),
          unifier(st, residuals, UnifyConfig{e.config().type_opt == TypeOpt::None}),
          true_term(st.heap.constant(sym::True, 0, e.symbols().name_ptr(sym::True))),
          steps(step_counter) {
        dynamic_preds.insert(prog.embedded.begin(), prog.embedded.end());
        if (e.config().trace_unify)
            unifier.on_pair = [this](Term* l, Term* r) {
                trace << "unify: " << show(l) << " =?= " << show(r) << "\n";
            };
    }

    std::string show(Term* t) {
        std::map<Term*, std::string> names, fresh;
        for (auto& [n, v] : vars)
            if (deref(v)->is_unbound_var()) names.emplace(deref(v), n);
        return print_expr(readback(full_normalize(st, t), syms, names, fresh));
    }

    Choice make_choice(Choice::Kind k) {
        Choice c;
        c.kind = k;
        c.trail = st.trail.mark();
        c.heap = st.heap.mark();
        c.residuals = residuals;
        c.universe_counter = st.universe_counter;
        return c;
    }

    void restore(const Choice& c) {
        st.trail.undo_to(c.trail);
        st.heap.release(c.heap);
        residuals = c.residuals;
        st.universe_counter = c.universe_counter;
    }

    // ---- clause access ----

    std::optional<Candidate> next_candidate(Cursor& cur, SymbolId pred, bool has_key, SymbolId key) {
        while (!cur.in_static) {
            if (!cur.block) {
                cur = Cursor{nullptr, 0, true};
                break;
            }
            while (cur.index < cur.block->clauses.size()) {
                const DynClause& d = cur.block->clauses[cur.index++];
                if (d.pred != pred) continue;
                if (has_key && d.has_key && d.key != key) continue;
                return Candidate{&d, nullptr};
            }
            cur = Cursor{cur.block->parent.get(), 0, false};
        }
        auto it = prog.by_pred.find(pred);
        if (it == prog.by_pred.end()) return std::nullopt;
        while (cur.index < it->second.size()) {
            const ClauseTemplate& c = prog.clauses[it->second[cur.index++]];
            if (has_key && c.has_key && c.key != key) continue;
            return Candidate{nullptr, &c};
        }
        return std::nullopt;
    }

    Term* instantiate(Term* t, std::vector<Term*>& vs, std::vector<TypeTerm*>& tps) {
        if (!t->has_params) return t;
        Heap& h = st.heap;
        if (auto* p = std::get_if<ParamData>(&t->data)) return vs[p->slot];
        if (auto* c = std::get_if<ConstData>(&t->data)) {
            std::vector<TypeTerm*> annots;
            annots.reserve(c->annots.size());
            for (auto* a : c->annots) annots.push_back(instantiate_type(h, a, tps));
            return h.constant(c->sym, c->universe, c->name, std::move(annots));
        }
        if (auto* a = std::get_if<AppData>(&t->data)) {
            Term* hd = instantiate(a->head, vs, tps);
            std::vector<Term*> args;
            args.reserve(a->args.size());
            for (auto* x : a->args) args.push_back(instantiate(x, vs, tps));
            return h.app(hd, std::move(args));
        }
        if (auto* l = std::get_if<AbsData>(&t->data)) return h.abs(l->arity, instantiate(l->body, vs, tps));
        throw InternalError("unexpected node in a clause template");
    }

    bool try_clause(const Candidate& cand, const Goal& g, const Goals& rest) {
        Term* head;
        Term* body;
        if (cand.stat) {
            const ClauseTemplate& c = *cand.stat;
            if (eng.config().trace_clauses) trace << "clause: " << c.text << "\n";
            std::vector<Term*> vs(c.nvars);
            for (auto& v : vs) v = st.heap.var(g.universe);
            std::vector<TypeTerm*> tps(c.ntvars, nullptr);
            head = instantiate(c.head, vs, tps);
            body = c.body ? instantiate(c.body, vs, tps) : nullptr;
        } else {
            const DynClause& d = *cand.dyn;
            head = d.head;
            body = d.body;
            if (d.k > 0) {
                Env env;
                for (uint32_t i = 0; i < d.k; ++i) env = env.push(EnvItem::bndg(st.heap.var(g.universe), 0));
                head = st.heap.susp(head, d.k, 0, env);
                if (body) body = st.heap.susp(body, d.k, 0, env);
            }
            if (eng.config().trace_clauses) trace << "clause (local): " << show(head) << "\n";
        }
        uint64_t before = st.trail.binding_count();
        // clause head first, so clause variables are the ones that get bound
        if (!unifier.unify_pairs({Pair{head, g.term}})) return false;
        if (st.trail.binding_count() != before && !residuals.empty() && !unifier.recheck_residuals()) return false;
        goals = body ? cons(Goal{body, g.ctx, g.universe}, rest) : rest;
        return true;
    }

    bool resume(Choice& c) {
        Cursor cur = c.cursor;
        auto cand = next_candidate(cur, c.pred, c.has_key, c.key);
        if (!cand) {
            choices.pop_back();
            return false;
        }
        Cursor peek = cur;
        bool more = next_candidate(peek, c.pred, c.has_key, c.key).has_value();
        Goal g = c.atom;
        Goals rest = c.goals;
        if (more) {
            c.cursor = cur;
        } else {
            choices.pop_back();
        }
        return try_clause(*cand, g, rest);
    }

    bool resolve(const Goal& g, const HeadNormalView& v, const Goals& rest) {
        SymbolId pred = v.head->as<ConstData>().sym;
        SymbolId key = 0;
        bool has_key = false;
        if (!v.args.empty()) {
            HeadNormalView a = head_norm(st, v.args[0]);
            if (auto* c = std::get_if<ConstData>(&a.head->data)) {
                has_key = true;
                key = c->sym;
            }
        }
        if (!prog.by_pred.count(pred) && !dynamic_preds.count(pred)) {
            bool local = false;
            for (const Block* b = g.ctx.get(); b && !local; b = b->parent.get())
                for (const auto& d : b->clauses) local = local || d.pred == pred;
            if (!local) throw RuntimeError("no clauses for predicate '" + syms.name(pred) + "'");
        }
        Choice c = make_choice(Choice::Kind::Clauses);
        c.goals = rest;
        c.atom = g;
        c.pred = pred;
        c.has_key = has_key;
        c.key = key;
        c.cursor = Cursor{g.ctx.get(), 0, false};
        choices.push_back(std::move(c));
        return resume(choices.back());
    }

    // ---- augment goals ----

    void elab_dynamic(Term* d, Term* guard, uint32_t k, std::vector<DynClause>& out) {
        d = deref(d);
        Term* h = d;
        std::vector<Term*> args;
        if (auto* a = std::get_if<AppData>(&d->data)) {
            h = deref(a->head);
            args = a->args;
        }
        auto* c = std::get_if<ConstData>(&h->data);
        if (!c) throw RuntimeError("clause in an augment goal has a flexible head: " + show(d));
        Heap& hp = st.heap;
        auto conj = [&](Term* a, Term* b) {
            if (!b) return a;
            return hp.app(hp.constant(sym::And, 0, syms.name_ptr(sym::And)), {a, b});
        };
        if ((c->sym == sym::And || c->sym == sym::Amp) && args.size() == 2) {
            elab_dynamic(args[0], guard, k, out);
            elab_dynamic(args[1], guard, k, out);
            return;
        }
        if ((c->sym == sym::Imp || c->sym == sym::Neck) && args.size() == 2) {
            bool neck = c->sym == sym::Neck;
            elab_dynamic(neck ? args[0] : args[1], conj(neck ? args[1] : args[0], guard), k, out);
            return;
        }
        if (c->sym == sym::Pi && args.size() == 1) {
            Term* p = deref(args[0]);
            auto* l = std::get_if<AbsData>(&p->data);
            if (!l) throw RuntimeError("pi in an augment goal is not applied to an abstraction");
            Term* body = hp.abs(l->arity - 1, l->body);
            elab_dynamic(body, guard ? hp.susp(guard, 0, 1, Env{}) : nullptr, k + 1, out);
            return;
        }
        if (is_logical(c->sym)) throw RuntimeError("'" + syms.name(c->sym) + "' cannot head a clause");
        DynClause dc{d, guard, k, c->sym, false, 0};
        if (!args.empty()) {
            Term* f = deref(args[0]);
            if (auto* l = std::get_if<AbsData>(&f->data)) f = deref(l->body);
            if (auto* b = std::get_if<AppData>(&f->data)) f = deref(b->head);
            if (auto* fc = std::get_if<ConstData>(&f->data)) {
                dc.has_key = true;
                dc.key = fc->sym;
            }
        }
        dynamic_preds.insert(c->sym);
        out.push_back(dc);
    }

    // ---- the main loop ----

    bool solve_goal(const Goal& g, const Goals& rest) {
        HeadNormalView v = head_norm(st, g.term);
        if (v.flexible()) {
            // a flexible goal is solved by the trivial instantiation of its head
            uint64_t before = st.trail.binding_count();
            st.trail.bind(v.head, st.heap.abs(static_cast<uint32_t>(v.args.size()), true_term));
            if (st.trail.binding_count() != before && !residuals.empty() && !unifier.recheck_residuals())
                return false;
            goals = rest;
            return true;
        }
        auto* c = std::get_if<ConstData>(&v.head->data);
        if (!c || v.binder != 0) throw RuntimeError("goal is not a proposition: " + show(g.term));
        const size_t n = v.args.size();
        switch (c->sym) {
        case sym::True:
            goals = rest;
            return true;
        case sym::And:
        case sym::Amp:
            if (n != 2) break;
            goals = cons(Goal{v.args[0], g.ctx, g.universe}, cons(Goal{v.args[1], g.ctx, g.universe}, rest));
            return true;
        case sym::Or: {
            if (n != 2) break;
            Choice ch = make_choice(Choice::Kind::Alternative);
            ch.goals = cons(Goal{v.args[1], g.ctx, g.universe}, rest);
            choices.push_back(std::move(ch));
            goals = cons(Goal{v.args[0], g.ctx, g.universe}, rest);
            return true;
        }
        case sym::Imp: {
            if (n != 2) break;
            auto block = std::make_shared<Block>();
            elab_dynamic(full_normalize(st, v.args[0]), nullptr, 0, block->clauses);
            block->parent = g.ctx;
            goals = cons(Goal{v.args[1], block, g.universe}, rest);
            return true;
        }
        case sym::Pi: {
            if (n != 1) break;
            uint32_t u = ++st.universe_counter;
            generic_names.push_back("c" + std::to_string(u));
            Term* k = st.heap.fresh_constant(u, &generic_names.back());
            goals = cons(Goal{st.heap.app(v.args[0], {k}), g.ctx, u}, rest);
            return true;
        }
        case sym::Sigma: {
            if (n != 1) break;
            Term* x = st.heap.var(g.universe);
            goals = cons(Goal{st.heap.app(v.args[0], {x}), g.ctx, g.universe}, rest);
            return true;
        }
        case sym::Neck:
            throw RuntimeError("':-' used as a goal");
        default:
            return resolve(g, v, rest);
        }
        throw RuntimeError("connective '" + syms.name(c->sym) + "' applied to the wrong number of arguments");
    }

    bool backtrack() {
        while (!choices.empty()) {
            Choice& c = choices.back();
            restore(c);
            switch (c.kind) {
            case Choice::Kind::Bottom:
                return false;
            case Choice::Kind::Alternative:
                goals = c.goals;
                choices.pop_back();
                return true;
            case Choice::Kind::Clauses:
                if (resume(c)) return true;
                break;
            }
        }
        return false;
    }

    // runs until the agenda is empty (true) or the search space is exhausted (false)
    bool run(uint64_t max_steps) {
        for (;;) {
            if (!goals) return true;
            if (max_steps && *steps >= max_steps) throw StepLimit{};
            ++*steps;
            Goal g = goals->goal;
            Goals rest = goals->next;
            if (!solve_goal(g, rest) && !backtrack()) return false;
        }
    }

    Answer answer() {
        Answer a;
        std::map<Term*, std::string> names, fresh;
        for (auto& [n, v] : vars) {
            Term* d = deref(v);
            if (d->is_unbound_var()) names.emplace(d, n);
        }
        for (auto& [n, v] : vars) {
            Term* d = deref(v);
            if (d->is_unbound_var() && names[d] == n) continue;
            a.bindings.emplace_back(n, print_expr(readback(full_normalize(st, v), syms, names, fresh)));
        }
        for (const auto& p : residuals) {
            std::string l = print_expr(readback(full_normalize(st, p.lhs), syms, names, fresh));
            std::string r = print_expr(readback(full_normalize(st, p.rhs), syms, names, fresh));
            a.residuals.emplace_back(l, r);
        }
        for (auto* t : tvars) {
            TypeTerm* d = deref(t);
            if (d != t) a.type_bindings.emplace_back(type_to_string(t, syms), type_to_string(d, syms));
        }
        if (eng.config().trace_normalize)
            trace << "normalize: beta=" << st.stats.beta << " rewrites=" << st.stats.rewrites
                  << " hnorm=" << st.stats.hnorm_calls << "\n";
        return a;
    }

    struct StepLimit {};
};

Solution::Solution(Engine& eng, Term* goal, std::vector<std::pair<std::string, Term*>> vars,
                   std::vector<TypeTerm*> tvars, bool keep_snapshot)
    : eng_(eng), m_(std::make_unique<Machine>(eng, &steps_)) {
    eng_.solving_ = true;
    Store& st = eng.store();
    m_->vars = std::move(vars);
    m_->tvars = std::move(tvars);
    m_->goals = cons(Goal{goal, nullptr, st.universe_counter}, nullptr);
    trail0_ = st.trail.mark();
    heap_size0_ = st.heap.size();
    if (keep_snapshot) snapshot0_ = st.heap.snapshot(heap_size0_);
    m_->choices.push_back(m_->make_choice(Choice::Kind::Bottom));
}

Solution::~Solution() {
    Store& st = eng_.store();
    st.trail.undo_to(trail0_);
    m_.reset();
    st.heap.release(heap0_);
    eng_.solving_ = false;
}

std::optional<Answer> Solution::next() {
    if (exhausted_ || step_limit_) return std::nullopt;
    if (answers_ >= eng_.config().max_answers) return std::nullopt;
    bool found;
    try {
        if (started_) {
            found = m_->backtrack() && m_->run(eng_.config().max_steps);
        } else {
            started_ = true;
            found = m_->run(eng_.config().max_steps);
        }
    } catch (const Machine::StepLimit&) {
        step_limit_ = true;
        return std::nullopt;
    }
    if (!found) {
        exhausted_ = true;
        return std::nullopt;
    }
    ++answers_;
    return m_->answer();
}

}  // namespace hopu
