#include <gtest/gtest.h>

#include "catch_cases.hpp"
#include "ldbj/reader.hpp"
#include "ldbj/writer.hpp"

namespace ldbj::testing {
// Keeps test listings readable: gtest would otherwise dump the bytes.
void PrintTo(const CatchCase& c, std::ostream* os) { *os << c.query; }
}  // namespace ldbj::testing

using namespace ldbj;
using namespace ldbj::testing;

class CatchSuite : public ::testing::TestWithParam<CatchCase> {};

TEST_P(CatchSuite, Case) {
    std::string why = check_catch_case(GetParam());
    EXPECT_TRUE(why.empty()) << GetParam().query << ": " << why;
}

INSTANTIATE_TEST_SUITE_P(Iso, CatchSuite, ::testing::ValuesIn(catch_cases()),
                         [](const ::testing::TestParamInfo<CatchCase>& info) { return info.param.name; });

TEST(Catch, SuiteIsLargeEnough) { EXPECT_GE(catch_cases().size(), 15u); }

// Ball copy: after the catch the recovery's variables are not linked to
// the thrower's.
TEST(Catch, BallCopySeversLinks) {
    SolveResult r = solve(parse_program("p."), "X = g(Y), catch(throw(X), g(Z), true), Z = 5");
    ASSERT_EQ(r.answers.size(), 1u);
    EXPECT_EQ(render_answer(r.answers[0]), "X=g(_),Y=_,Z=5");
}

TEST(Catch, TraceEvents) {
    VectorSink sink;
    solve(parse_program("p(1). p(2). p(3)."), "catch((p(X), X > 1, throw(t)), t, fail)", {}, &sink);
    int throws = 0, catches = 0;
    for (const auto& e : sink.events()) {
        if (e.kind == TraceKind::Throw) {
            ++throws;
            EXPECT_EQ(e.ball, "t");
        }
        if (e.kind == TraceKind::Catch) {
            ++catches;
            EXPECT_EQ(e.ball, "t");
            EXPECT_EQ(e.pred.str(), "catch/3");
            EXPECT_EQ(e.node, 0u);
        }
    }
    EXPECT_EQ(throws, 1);
    EXPECT_EQ(catches, 1);
}

// Throwing from inside a recovery does not re-enter the same catch.
TEST(Catch, RecoveryIsOutsideItsOwnScope) {
    SolveResult r = solve(parse_program("p."), "catch(throw(a), a, throw(a))");
    EXPECT_EQ(r.status, ExitStatus::UncaughtException);
    ASSERT_TRUE(r.ball);
    EXPECT_EQ(*r.ball, Term::atom("a"));
}

// A catch whose goal has exited is inactive, even though the goal still
// has alternatives to retry into.
TEST(Catch, ReactivatedOnRetry) {
    SolveResult r = solve(parse_program("p(1). p(2)."), "catch(p(X), t, R = caught), (X = 1 -> fail ; throw(t))");
    EXPECT_EQ(r.status, ExitStatus::UncaughtException);
    r = solve(parse_program("p(1). p(2). q(1) :- fail. q(2) :- throw(t)."), "catch((p(X), q(X)), t, R = caught)");
    EXPECT_EQ(render_answer(r.answers.at(0)), "X=_,R=caught");
}
