#include "hopu/bench.hpp"

#include <chrono>

#include "hopu/engine.hpp"

namespace hopu {

namespace {

const char* kRevProgram = R"(
kind i type.
kind ilist type.
type e0, e1, e2, e3, e4, e5, e6, e7, e8, e9 i.
type mnil ilist.
type mcons i -> ilist -> ilist.
type rev ilist -> ilist -> o.
type app ilist -> ilist -> ilist -> o.
rev mnil mnil.
rev (mcons X L1) L2 :- rev L1 L3, app L3 (mcons X mnil) L2.
app mnil L L.
app (mcons X L1) L2 (mcons X L3) :- app L1 L2 L3.
type lrev ilist -> ilist -> o.
type rev_aux ilist -> ilist -> ilist -> o.
lrev L1 L2 :- rev_aux L1 mnil L2.
rev_aux mnil L L.
rev_aux (mcons X L1) L2 L3 :- rev_aux L1 (mcons X L2) L3.
)";

const char* kCopyProgram = R"(
kind tm type.
type a tm.
type app tm -> tm -> tm.
type abs (tm -> tm) -> tm.
type copy tm -> tm -> o.
copy a a.
copy (app T1 T2) (app T3 T4) :- copy T1 T3, copy T2 T4.
copy (abs T1) (abs T2) :- pi c\ (copy c c => copy (T1 c) (T2 c)).
)";

std::string ten_list() {
    std::string s = "mnil";
    for (int i = 9; i >= 0; --i) s = "(mcons e" + std::to_string(i) + " " + s + ")";
    return s;
}

// a complete tree of depth d mixing abstractions and applications over bound variables
std::string copy_tree(int d, int depth) {
    if (d == 0) return depth > 0 ? "x" + std::to_string(depth) : "a";
    if (d % 2 == 0) {
        std::string v = "x" + std::to_string(depth + 1);
        return "(abs " + v + "\\ " + copy_tree(d - 1, depth + 1) + ")";
    }
    return "(app " + copy_tree(d - 1, depth) + " " + copy_tree(d - 1, depth) + ")";
}

}  // namespace

const std::vector<std::string>& bench_names() {
    static const std::vector<std::string> names = {"naive-rev", "linear-rev", "copy-depth4"};
    return names;
}

BenchResult run_bench(const std::string& name, TypeOpt level, size_t runs) {
    EngineConfig cfg;
    cfg.type_opt = level;
    cfg.max_answers = 1;
    Engine eng(cfg);
    std::string query;
    if (name == "naive-rev") {
        eng.load_text(kRevProgram);
        query = "rev " + ten_list() + " R.";
        if (!runs) runs = 30000;
    } else if (name == "linear-rev") {
        eng.load_text(kRevProgram);
        query = "lrev " + ten_list() + " R.";
        if (!runs) runs = 100000;
    } else if (name == "copy-depth4") {
        eng.load_text(kCopyProgram);
        query = "copy " + copy_tree(4, 0) + " R.";
        if (!runs) runs = 20000;
    } else {
        throw Error("unknown benchmark '" + name + "' (expected naive-rev, linear-rev or copy-depth4)");
    }
    BenchResult r;
    r.name = name;
    r.runs = runs;
    auto t0 = std::chrono::steady_clock::now();
    for (size_t i = 0; i < runs; ++i) {
        auto sol = eng.solve(query);
        if (sol->next()) ++r.answers;
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

}  // namespace hopu
