#include <CLI11.hpp>

#include <iomanip>
#include <iostream>
#include <string>

#include "hopu/bench.hpp"
#include "hopu/engine.hpp"

using namespace hopu;

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// returns true when the query had at least one answer
bool run_batch_query(Engine& eng, const std::string& q) {
    auto sol = eng.solve(q);
    size_t n = 0;
    while (auto a = sol->next()) {
        if (n) std::cout << ";\n";
        ++n;
        std::string text = format_answer(*a, true);
        std::cout << (text.empty() ? "yes.\n" : text);
    }
    if (sol->step_limit_hit()) std::cout << "step limit reached\n";
    else if (n == 0) std::cout << "no\n";
    else if (sol->exhausted()) std::cout << "no more answers\n";
    std::cout.flush();
    return n > 0;
}

void repl_query(Engine& eng, const std::string& q) {
    auto sol = eng.solve(q);
    while (true) {
        auto a = sol->next();
        if (!a) {
            std::cout << (sol->step_limit_hit() ? "step limit reached\n" : "no\n");
            return;
        }
        std::string text = format_answer(*a, false);
        if (text.empty()) {
            std::cout << "yes\n";
            return;
        }
        std::cout << text << std::flush;
        std::string reply;
        if (!std::getline(std::cin, reply) || trim(reply) != ";") {
            std::cout << "yes\n";
            return;
        }
    }
}

// handles one directive; returns false on #quit
bool repl_command(Engine& eng, std::string cmd) {
    if (!cmd.empty() && cmd.back() == '.') cmd.pop_back();
    cmd = trim(cmd);
    if (cmd == "#quit") return false;
    if (cmd.rfind("#load", 0) == 0) {
        std::string arg = trim(cmd.substr(5));
        if (arg.size() >= 2 && arg.front() == '"' && arg.back() == '"') arg = arg.substr(1, arg.size() - 2);
        eng.load_file(arg);
        std::cout << "loaded " << arg << "\n";
        return true;
    }
    if (cmd.rfind("#typeopt", 0) == 0) {
        eng.set_type_opt(parse_type_opt(trim(cmd.substr(8))));
        std::cout << "type optimization: " << type_opt_name(eng.config().type_opt) << "\n";
        return true;
    }
    throw Error("unknown command '" + cmd + "' (expected #load, #typeopt or #quit)");
}

void repl(Engine& eng) {
    std::string pending;
    while (true) {
        std::cout << (pending.empty() ? "?- " : "   ") << std::flush;
        std::string line;
        if (!std::getline(std::cin, line)) break;
        pending += line + "\n";
        std::string text = trim(pending);
        if (text.empty()) {
            pending.clear();
            continue;
        }
        // a query or command ends with a period at the end of a line
        if (text.back() != '.') continue;
        pending.clear();
        try {
            if (text[0] == '#') {
                if (!repl_command(eng, text)) return;
            } else {
                repl_query(eng, text);
            }
        } catch (const Error& e) {
            std::cout << "error: " << e.what() << "\n";
        }
    }
    std::cout << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hopu: an interpreter for a higher-order logic programming language"};
    std::vector<std::string> files, queries, traces;
    size_t answers = 10;
    uint64_t max_steps = 0;
    std::string type_opt = "full";
    std::string bench;
    app.add_option("files", files, "program files, loaded in order")->check(CLI::ExistingFile);
    app.add_option("-q,--query", queries, "run a query in batch mode (repeatable)");
    app.add_option("--answers", answers, "maximum answers per query")->check(CLI::PositiveNumber);
    app.add_option("--max-steps", max_steps, "maximum resolution steps per query, 0 for no limit");
    app.add_option("--type-opt", type_opt, "type annotation level")
        ->check(CLI::IsMember({"none", "skeleton", "full"}));
    app.add_option("--trace", traces, "trace an area (unify, normalize, clauses)")
        ->check(CLI::IsMember({"unify", "normalize", "clauses"}));
    app.add_option("--bench", bench, "run a micro-benchmark")
        ->check(CLI::IsMember({"naive-rev", "linear-rev", "copy-depth4"}));
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    EngineConfig cfg;
    cfg.type_opt = parse_type_opt(type_opt);
    cfg.max_answers = answers;
    cfg.max_steps = max_steps;
    for (const auto& t : traces) {
        if (t == "unify") cfg.trace_unify = true;
        if (t == "normalize") cfg.trace_normalize = true;
        if (t == "clauses") cfg.trace_clauses = true;
    }

    if (!bench.empty()) {
        try {
            BenchResult r = run_bench(bench, cfg.type_opt);
            std::cout << r.name << ": " << r.runs << " runs, " << r.answers << " answered, wall time "
                      << std::fixed << std::setprecision(3) << r.seconds << " s\n";
            return r.answers == r.runs ? 0 : 1;
        } catch (const Error& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 2;
        }
    }

    Engine eng(cfg);
    for (const auto& f : files) {
        try {
            eng.load_file(f);
        } catch (const Error& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 2;
        }
    }

    if (queries.empty()) {
        repl(eng);
        return 0;
    }
    int code = 0;
    for (const auto& q : queries) {
        try {
            if (!run_batch_query(eng, q)) code = std::max(code, 1);
        } catch (const RuntimeError& e) {
            std::cout << "error: " << e.what() << "\n";
            code = std::max(code, 1);
        } catch (const Error& e) {
            std::cerr << "error: " << e.what() << "\n";
            code = 2;
        }
    }
    return code;
}
