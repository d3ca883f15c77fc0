#include <set>

#include "corpus.hpp"
#include "doctest.h"
#include "hopu/engine.hpp"

using namespace hopu;

namespace {

std::vector<std::string> answers(Engine& eng, const std::string& q, size_t limit = 10) {
    eng.config().max_answers = limit;
    auto sol = eng.solve(q);
    std::vector<std::string> out;
    while (auto a = sol->next()) out.push_back(format_answer(*a, false));
    return out;
}

std::unique_ptr<Engine> loaded(const std::string& file, TypeOpt level = TypeOpt::Full) {
    EngineConfig cfg;
    cfg.type_opt = level;
    auto eng = std::make_unique<Engine>(cfg);
    eng->load_file(corpus::path(HOPU_CORPUS, file));
    return eng;
}

}  // namespace

TEST_CASE("copy") {
    auto engp = loaded("copy.lp");
    Engine& eng = *engp;
    CHECK(answers(eng, "copy a R.") == std::vector<std::string>{"R = a\n"});
    CHECK(answers(eng, "copy (app a a) R.") == std::vector<std::string>{"R = app a a\n"});
    CHECK(answers(eng, "copy (abs x\\ abs y\\ app y x) R.") ==
          std::vector<std::string>{"R = abs x1\\ abs x2\\ app x2 x1\n"});
    CHECK(answers(eng, "pi c\\ copy c c.").empty());
    CHECK(answers(eng, "pi c\\ (copy c c => copy (app c a) (app c R)).") == std::vector<std::string>{"R = a\n"});
}

TEST_CASE("predicates as arguments") {
    auto engp = loaded("mappred.lp");
    Engine& eng = *engp;
    CHECK(answers(eng, "mappred (bob :: sue :: nil) parent L.") ==
          std::vector<std::string>{"L = john :: dick :: nil\n"});
    CHECK(answers(eng, "mappred (bob :: sue :: nil) (x\\ y\\ (Sigma z\\ (parent x z, parent z y))) L.") ==
          std::vector<std::string>{"L = mary :: kate :: nil\n"});
}

TEST_CASE("non-pattern pairs are reported, not enumerated") {
    auto engp = loaded("mapfun.lp");
    Engine& eng = *engp;
    auto as = answers(eng, "mapfun (a :: nil) F ((g a) :: nil).");
    REQUIRE(as.size() == 1);
    CHECK(as[0] == "| <F a, g a>\n");
}

TEST_CASE("flexible goals succeed with the trivial instantiation") {
    auto engp = loaded("misc.lp");
    Engine& eng = *engp;
    CHECK(answers(eng, "F a.") == std::vector<std::string>{"F = x1\\ true\n"});
    CHECK(answers(eng, "F a, q X.") == std::vector<std::string>{"F = x1\\ true\nX = a\n"});
}

TEST_CASE("universe labels keep generic constants out of outer variables") {
    auto engp = loaded("misc.lp");
    Engine& eng = *engp;
    CHECK(answers(eng, "sigma y\\ pi z\\ p y z.").empty());
    CHECK(answers(eng, "pi z\\ sigma y\\ p y z.").size() == 1);
    CHECK(answers(eng, "pi z\\ p z z.").size() == 1);
}

TEST_CASE("augmentation lasts for the subgoal only") {
    auto engp = loaded("misc.lp");
    Engine& eng = *engp;
    CHECK(answers(eng, "q b => q b.").size() == 1);
    CHECK(answers(eng, "(q b => q b), q b.").empty());
    CHECK(answers(eng, "(pi x\\ (p b x :- q x)) => p b Y.") == std::vector<std::string>{"Y = a\n", "Y = b\n"});
    CHECK(answers(eng, "(q b => q X).") == std::vector<std::string>{"X = b\n", "X = a\n"});
    CHECK(answers(eng, "sigma Z\\ ((q Z) => q b).") == std::vector<std::string>{""});
}

TEST_CASE("disjunctions in clause bodies") {
    auto engp = loaded("misc.lp");
    Engine& eng = *engp;
    CHECK(answers(eng, "either X.") == std::vector<std::string>{"X = a\n", "X = b\n"});
    CHECK(answers(eng, "both X.") == std::vector<std::string>{"X = a\n", "X = b\n"});
    CHECK(eng.program().disjunctions == 3);
}

TEST_CASE("answer printing") {
    auto engp = loaded("append.lp");
    Engine& eng = *engp;
    CHECK(answers(eng, "append X nil Y.", 3) ==
          std::vector<std::string>{"X = nil\nY = nil\n", "X = _1 :: nil\nY = _1 :: nil\n",
                                   "X = _1 :: _2 :: nil\nY = _1 :: _2 :: nil\n"});
    CHECK(answers(eng, "append nil nil nil.") == std::vector<std::string>{""});
}

TEST_CASE("errors") {
    auto engp = loaded("misc.lp");
    Engine& eng = *engp;
    CHECK_THROWS_AS(eng.solve("p a"), TypeError);
    CHECK_THROWS_AS(eng.solve("nosuch a."), TypeError);
    CHECK_THROWS_AS(eng.solve("p a ."), TypeError);
    eng.load_text("type lonely i -> o.");
    {
        auto sol = eng.solve("lonely a.");
        CHECK_THROWS_AS(sol->next(), RuntimeError);
    }
    {
        auto sol = eng.solve("q a.");
        CHECK_THROWS(eng.solve("q a."));
    }
    // a failed load keeps the previous program
    CHECK_THROWS(eng.load_text("q \"not an i\"."));
    CHECK(answers(eng, "q X.") == std::vector<std::string>{"X = a\n"});
}

TEST_CASE("step limit") {
    Engine eng;
    eng.load_text("kind i type. type loop i -> o. type c i. loop X :- loop X.");
    eng.config().max_steps = 1000;
    auto sol = eng.solve("loop c.");
    CHECK_FALSE(sol->next());
    CHECK(sol->step_limit_hit());
    CHECK(sol->steps() == 1000);
}

TEST_CASE("exhausting a query restores the trail and the term graph") {
    for (const auto& prog : corpus::load_all(HOPU_CORPUS)) {
        Engine eng;
        eng.load_file(prog.path);
        for (const auto& q : prog.queries) {
            CAPTURE(q);
            eng.config().max_answers = 1000;
            eng.config().max_steps = 200000;
            auto sol = eng.solve(q, true);
            while (sol->next()) {
            }
            if (!sol->exhausted()) continue;
            CHECK(eng.store().trail.mark() == sol->initial_trail());
            CHECK(eng.store().heap.size() == sol->initial_heap());
            CHECK(eng.store().heap.snapshot(sol->initial_heap()) == sol->initial_snapshot());
        }
    }
}

TEST_CASE("all type annotation levels give the same answers on the corpus") {
    for (const auto& prog : corpus::load_all(HOPU_CORPUS)) {
        CAPTURE(prog.path);
        std::vector<std::vector<std::string>> per_level;
        for (TypeOpt level : {TypeOpt::None, TypeOpt::Skeleton, TypeOpt::Full}) {
            EngineConfig cfg;
            cfg.type_opt = level;
            cfg.max_answers = 10;
            Engine eng(cfg);
            eng.load_file(prog.path);
            std::vector<std::string> all;
            for (const auto& q : prog.queries) {
                auto sol = eng.solve(q);
                std::string text = q + "\n";
                while (auto a = sol->next()) text += format_answer(*a, false) + ";\n";
                all.push_back(text);
            }
            per_level.push_back(all);
        }
        CHECK(per_level[0] == per_level[2]);
        CHECK(per_level[1] == per_level[2]);
    }
}

TEST_CASE("ad hoc polymorphism needs annotations at run time") {
    auto fullp = loaded("print.lp");
    Engine& full = *fullp;
    CHECK(answers(full, "printlist (1 :: 2 :: nil).").size() == 1);
    CHECK(answers(full, "printlist (\"two\" :: nil).").empty());
    CHECK(answers(full, "print X.", 10).size() == 3);
}
