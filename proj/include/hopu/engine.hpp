#pragma once

#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hopu/frontend.hpp"
#include "hopu/unify.hpp"

namespace hopu {

struct RuntimeError : Error {
    using Error::Error;
};

struct EngineConfig {
    TypeOpt type_opt = TypeOpt::Full;
    size_t max_answers = 10;
    uint64_t max_steps = 0;  // 0 means unlimited
    bool trace_unify = false;
    bool trace_normalize = false;
    bool trace_clauses = false;
    std::ostream* trace_out = nullptr;  // stderr when null
};

struct Answer {
    std::vector<std::pair<std::string, std::string>> bindings;
    std::vector<std::pair<std::string, std::string>> type_bindings;
    std::vector<std::pair<std::string, std::string>> residuals;
};

class Engine;

// Lazy answer stream of one query. Only one may be live per engine.
class Solution {
public:
    ~Solution();
    Solution(const Solution&) = delete;
    Solution& operator=(const Solution&) = delete;

    // nullopt once the stream is exhausted, the answer limit is reached or the step limit is hit
    std::optional<Answer> next();

    bool exhausted() const { return exhausted_; }
    bool step_limit_hit() const { return step_limit_; }
    uint64_t steps() const { return steps_; }

    // state recorded when the query was set up, for integrity checks
    Trail::Mark initial_trail() const { return trail0_; }
    size_t initial_heap() const { return heap_size0_; }
    const std::vector<std::string>& initial_snapshot() const { return snapshot0_; }

private:
    friend class Engine;
    struct Machine;
    Solution(Engine& eng, Term* goal, std::vector<std::pair<std::string, Term*>> vars,
             std::vector<TypeTerm*> tvars, bool keep_snapshot);

    Engine& eng_;
    std::unique_ptr<Machine> m_;
    bool started_ = false;
    bool exhausted_ = false;
    bool step_limit_ = false;
    size_t answers_ = 0;
    uint64_t steps_ = 0;
    Trail::Mark trail0_ = 0;
    size_t heap_size0_ = 0;
    Heap::Mark heap0_{};
    std::vector<std::string> snapshot0_;
};

class Engine {
public:
    explicit Engine(EngineConfig cfg = {});
    ~Engine();

    // Both keep the previous program if the new text fails to load.
    void load_text(const std::string& text);
    void load_file(const std::string& path);
    void set_type_opt(TypeOpt level);

    // keep_snapshot records the heap image for the backtracking integrity check
    std::unique_ptr<Solution> solve(const std::string& query, bool keep_snapshot = false);

    EngineConfig& config() { return cfg_; }
    Store& store() { return *store_; }
    const Symbols& symbols() const { return *syms_; }
    Signature& signature() { return *sig_; }
    const CompiledProgram& program() const { return prog_; }

private:
    friend class Solution;
    void rebuild(const std::vector<Item>& items);

    EngineConfig cfg_;
    std::vector<Item> items_;
    std::unique_ptr<Store> store_;
    std::unique_ptr<Symbols> syms_;
    std::unique_ptr<Signature> sig_;
    CompiledProgram prog_;
    bool solving_ = false;
};

TypeOpt parse_type_opt(const std::string& s);
const char* type_opt_name(TypeOpt t);

// Renders an answer the way the command line tool prints it.
std::string format_answer(const Answer& a, bool final_period);

}  // namespace hopu
