#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "binary_queries.hpp"
#include "catch_cases.hpp"
#include "ldbj/reader.hpp"
#include "ldbj/satlab.hpp"
#include "ldbj/transform.hpp"
#include "ldbj/writer.hpp"

using namespace ldbj;
using namespace ldbj::testing;

namespace {

const CnfInstance kPaper = dimacs_import("p cnf 4 2\n1 -2 3 0\n-1 4 0\n");

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Corpus, EmbeddedMatchesFiles) {
    EXPECT_EQ(corpus_source(CorpusProgram::P1), read_file(LDBJ_CORPUS_DIR "/p1.pl"));
    EXPECT_EQ(corpus_source(CorpusProgram::P3), read_file(LDBJ_CORPUS_DIR "/p3.pl"));
    for (const auto& b : binary_test_programs())
        EXPECT_EQ(binary_test_source(b.name), read_file(LDBJ_CORPUS_DIR "/binary/" + b.name + ".pl"));
    EXPECT_GE(binary_test_programs().size(), 3u);
}

TEST(Corpus, ProgramNames) {
    for (auto p : {CorpusProgram::P1, CorpusProgram::P2, CorpusProgram::P3, CorpusProgram::P1Binary,
                   CorpusProgram::P2Annotated})
        EXPECT_EQ(parse_corpus_program(to_string(p)), p);
    EXPECT_EQ(parse_corpus_program("P3"), CorpusProgram::P3);
    EXPECT_FALSE(parse_corpus_program("p4"));
}

TEST(Query, PaperFormula) {
    Term t = cnf_term(kPaper);
    EXPECT_TRUE(is_variant(t, parse_term("[[true-X,false-Y,true-Z],[false-X,true-V]]")));
    EXPECT_EQ(write_term(to_query(kPaper, CorpusProgram::P1), [](const Term& v) { return v.hint(); }),
              "sat_cnf([[true-X1,false-X2,true-X3],[false-X1,true-X4]])");
    EXPECT_EQ(to_query(kPaper, CorpusProgram::P2).arity(), 2u);
}

TEST(Query, EmptyConjunctionSucceeds) {
    CnfInstance empty{3, {}};
    EXPECT_EQ(write_term(to_query(empty, CorpusProgram::P1)), "sat_cnf([])");
    for (auto p : {CorpusProgram::P1, CorpusProgram::P2, CorpusProgram::P3})
        EXPECT_EQ(run_sat(empty, p, {}).verdict, SatVerdict::Sat);
}

TEST(Query, UnitClauseUnderP2) {
    CnfInstance unit{1, {{{true, 1}}}};
    SatRun r = run_sat(unit, CorpusProgram::P2, {});
    ASSERT_EQ(r.verdict, SatVerdict::Sat);
    EXPECT_EQ(write_term(*r.result.answers[0].find("X1")), "1,true");
    EXPECT_EQ(write_term(Term::compound("f", {*r.result.answers[0].find("X1")})), "f((1,true))");
}

TEST(Oracle, Examples) {
    EXPECT_FALSE(brute_force({1, {{{true, 1}}, {{false, 1}}}}).sat);
    OracleResult r = brute_force(kPaper);
    ASSERT_TRUE(r.sat);
    EXPECT_TRUE(r.model[1]);
    EXPECT_TRUE(r.model[2]);  // first in true-first order
    EXPECT_TRUE(r.model[4]);
    EXPECT_FALSE(brute_force({2, {{{true, 1}}, {}}}).sat);
    EXPECT_THROW(brute_force({27, {}}), std::invalid_argument);
}

TEST(Oracle, FullSignCoverageIsUnsat) {
    CnfInstance c{3, {}};
    for (int m = 0; m < 8; ++m) c.clauses.push_back({{bool(m & 1), 1}, {bool(m & 2), 2}, {bool(m & 4), 3}});
    EXPECT_FALSE(brute_force(c).sat);
    for (auto p : {CorpusProgram::P1, CorpusProgram::P2, CorpusProgram::P3, CorpusProgram::P1Binary})
        EXPECT_EQ(run_sat(c, p, {}).verdict, SatVerdict::Unsat) << to_string(p);
    c.clauses.pop_back();
    EXPECT_TRUE(brute_force(c).sat);
}

TEST(Generator, DeterministicAndWellFormed) {
    EXPECT_EQ(gen_cnf(20, 85, 3, 7), gen_cnf(20, 85, 3, 7));
    EXPECT_FALSE(gen_cnf(20, 85, 3, 7) == gen_cnf(20, 85, 3, 8));
    CnfInstance c = gen_cnf(10, 40, 3, 1);
    EXPECT_EQ(c.num_vars, 10);
    ASSERT_EQ(c.clauses.size(), 40u);
    for (const auto& cl : c.clauses) {
        ASSERT_EQ(cl.size(), 3u);
        std::set<int> vars;
        for (const auto& l : cl) {
            EXPECT_GE(l.var, 1);
            EXPECT_LE(l.var, 10);
            vars.insert(l.var);
        }
        EXPECT_EQ(vars.size(), 3u);
    }
    EXPECT_THROW(gen_cnf(2, 1, 3, 0), std::invalid_argument);
}

TEST(Dimacs, Import) {
    CnfInstance c = dimacs_import("p cnf 2 2\n1 -2 0\n-1 0\n");
    EXPECT_EQ(c.num_vars, 2);
    EXPECT_EQ(c.clauses, (std::vector<std::vector<Literal>>{{{true, 1}, {false, 2}}, {{false, 1}}}));
    CnfInstance e = dimacs_import("c just a comment\np cnf 3 0\nc more\n");
    EXPECT_EQ(e.num_vars, 3);
    EXPECT_TRUE(e.clauses.empty());
    EXPECT_EQ(dimacs_import("p cnf 2 2\n1 -2\n0 2 0\n").clauses.size(), 2u);
    EXPECT_EQ(dimacs_import("p cnf 1 1\n1 0\n%\n0\n").clauses.size(), 1u);
}

TEST(Dimacs, ErrorsCarryLine) {
    auto line_of = [](const char* text) {
        try {
            dimacs_import(text);
        } catch (const DimacsError& e) {
            return e.line();
        }
        return -1;
    };
    EXPECT_EQ(line_of("p cnf x 1\n1 0\n"), 1);
    EXPECT_EQ(line_of("c\np cnf 2 1\n3 0\n"), 3);
    EXPECT_EQ(line_of("p cnf 2 1\n1 2\n"), 2);
    EXPECT_EQ(line_of("1 0\n"), 1);
    EXPECT_EQ(line_of("p cnf 2 1\np cnf 2 1\n"), 2);
    EXPECT_EQ(line_of("p cnf 2 1\n1 a 0\n"), 2);
    EXPECT_NE(line_of("p cnf 2 2\n1 0\n"), -1);
}

TEST(Dimacs, RoundTrip) {
    for (std::uint64_t s = 0; s < 50; ++s) {
        CnfInstance c = gen_cnf(8, 30, 3, s);
        EXPECT_EQ(dimacs_import(dimacs_export(c)), c);
    }
}

TEST(Models, PaperFormulaOnAllPrograms) {
    for (auto p : {CorpusProgram::P1, CorpusProgram::P2, CorpusProgram::P3, CorpusProgram::P1Binary}) {
        SatRun r = run_sat(kPaper, p, {});
        ASSERT_EQ(r.verdict, SatVerdict::Sat) << to_string(p);
        EXPECT_TRUE(satisfies(kPaper, r.result.answers[0])) << to_string(p);
    }
    SatRun p1 = run_sat(kPaper, CorpusProgram::P1, {});
    EXPECT_TRUE(valid_plain_model(kPaper, p1.result.answers[0]));
    SatRun p3 = run_sat(kPaper, CorpusProgram::P3, {});
    std::string why;
    EXPECT_TRUE(valid_numbered_model(kPaper, p3.result.answers[0], &why)) << why;
    EXPECT_EQ(render_answer(p3.result.answers[0]), "X1=1,true,X2=_,X3=_,X4=2,true");
}

TEST(Models, NumberedModelChecks) {
    Answer gap;
    gap.bindings = {{"X1", parse_term("(1,true)")}, {"X2", parse_term("(3,true)")}};
    CnfInstance c{2, {{{true, 1}}, {{true, 2}}}};
    std::string why;
    EXPECT_FALSE(valid_numbered_model(c, gap, &why));
    EXPECT_FALSE(why.empty());
    Answer ok;
    ok.bindings = {{"X1", parse_term("(1,true)")}, {"X2", parse_term("(2,true)")}};
    EXPECT_TRUE(valid_numbered_model(c, ok));
    Answer wrong;
    wrong.bindings = {{"X1", parse_term("(1,false)")}, {"X2", parse_term("(2,true)")}};
    EXPECT_FALSE(valid_numbered_model(c, wrong));
    EXPECT_FALSE(satisfies(c, wrong));
}

TEST(Models, SmallInstancesAgreeWithOracle) {
    for (std::uint64_t s = 0; s < 60; ++s) {
        CnfInstance c = gen_cnf(6, 6 + static_cast<int>(s % 7), 3, s);
        bool want = brute_force(c).sat;
        for (auto p : {CorpusProgram::P1, CorpusProgram::P2, CorpusProgram::P1Binary}) {
            SatRun r = run_sat(c, p, {});
            EXPECT_EQ(r.verdict, want ? SatVerdict::Sat : SatVerdict::Unsat) << to_string(p) << " seed " << s;
            if (r.verdict == SatVerdict::Sat) EXPECT_TRUE(satisfies(c, r.result.answers[0]));
        }
    }
}

TEST(Models, P1BinaryNativeAndTransformedAgree) {
    for (std::uint64_t s = 0; s < 30; ++s) {
        CnfInstance c = gen_cnf(7, 25, 3, s);
        SolveOptions native;
        native.mode = EngineMode::NativeBackjump;
        SatRun a = run_sat(c, CorpusProgram::P1Binary, native);
        SatRun b = run_sat(c, CorpusProgram::P1Binary, {});
        EXPECT_EQ(a.verdict, b.verdict);
        EXPECT_EQ(a.result.stats.clause_tries, b.result.stats.clause_tries);
    }
}

TEST(Bench, RowsAndCsv) {
    std::vector<CnfInstance> inst;
    for (std::uint64_t s = 0; s < 6; ++s) inst.push_back(gen_cnf(8, 14, 3, s));
    BenchOptions o;
    o.record_time = false;
    o.threads = 3;
    auto rows = bench(inst, {CorpusProgram::P2, CorpusProgram::P3}, o);
    ASSERT_EQ(rows.size(), 12u);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(rows[i].instance, i / 2 + 1);
        EXPECT_EQ(rows[i].program, i % 2 ? CorpusProgram::P3 : CorpusProgram::P2);
        EXPECT_FALSE(rows[i].oracle_mismatch);
        EXPECT_EQ(rows[i].micros, 0u);
    }
    EXPECT_EQ(rows[0].verdict, rows[1].verdict);
    std::string csv = bench_csv(rows);
    EXPECT_EQ(csv.substr(0, kBenchHeader.size()), kBenchHeader);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 13);
    o.threads = 1;
    EXPECT_EQ(bench_csv(bench(inst, {CorpusProgram::P2, CorpusProgram::P3}, o)), csv);
}

TEST(Bench, PaperFormulaEqualVerdicts) {
    BenchOptions o;
    auto rows = bench({kPaper}, {CorpusProgram::P2, CorpusProgram::P3}, o);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].verdict, SatVerdict::Sat);
    EXPECT_EQ(rows[1].verdict, SatVerdict::Sat);
}

TEST(Bench, StepLimit) {
    BenchOptions o;
    o.max_steps = 10;
    auto rows = bench({gen_cnf(12, 50, 3, 1)}, {CorpusProgram::P2}, o);
    EXPECT_EQ(rows[0].verdict, SatVerdict::Limit);
    EXPECT_FALSE(rows[0].oracle_mismatch);
}

TEST(BinaryPrograms, RandomQueriesTerminate) {
    auto cases = random_binary_cases(3, 10);
    EXPECT_EQ(cases.size(), 10 * binary_program_names().size());
    for (const auto& c : cases) {
        Recorded r = run_recorded(lower_native(*c.annotated), c.query, EngineMode::NativeBackjump);
        EXPECT_EQ(r.status, ExitStatus::Exhausted) << c.program << " " << write_term(c.query);
    }
}

TEST(BinaryPrograms, IdentifierErasure) {
    EXPECT_EQ(erase_identifiers(parse_term("f('$bj'(3, a), (1, '$bj'(4, b), true), c(x, 2, 17))")),
              parse_term("f(id, (1, id, true), c(x, 2, id))"));
    EXPECT_EQ(erase_identifiers(parse_term("(1, 5, false)")), parse_term("(1, id, false)"));
}
