#include "catch_cases.hpp"

#include <algorithm>

#include "ldbj/reader.hpp"
#include "ldbj/writer.hpp"

namespace ldbj::testing {

namespace {

const std::string kP123 = "p(1). p(2). p(3).";

}  // namespace

const std::vector<CatchCase>& catch_cases() {
    static const std::vector<CatchCase> cases{
        {"failure_is_not_an_exception", "", "catch(fail, _, true)", {}, "exhausted", "", {}, {}},
        {"success_passes_through", "", "catch(true, _, fail)", {"true"}, "exhausted", "", {}, {}},
        {"catcher_binds_ball", "", "catch(throw(f(1)), f(X), true)", {"X=1"}, "exhausted", "", {}, {}},
        {"uncaught_atom", "", "throw(t)", {}, "uncaught-exception", "t", {}, {}},
        {"integer_ball", "", "catch(throw(7), 7, true)", {"true"}, "exhausted", "", {}, {}},
        {"rethrow_on_mismatch", "", "catch(catch(throw(a), b, X = inner), a, X = outer)", {"X=outer"}, "exhausted", "", {}, {}},
        {"no_matching_catcher", "", "catch(throw(a), b, true)", {}, "uncaught-exception", "a", {}, {}},
        {"ball_copied_at_throw", "", "X = g(Y), catch(throw(X), g(Z), true), Y = 1", {"X=g(1),Y=1,Z=_"}, "exhausted", "", {}, {}},
        {"bindings_undone_before_recovery", "", "catch((X = 1, throw(t)), t, true)", {"X=_"}, "exhausted", "", {}, {}},
        {"ball_keeps_throw_time_value", "", "catch((X = 1, throw(f(X))), f(Y), true)", {"X=_,Y=1"}, "exhausted", "", {}, {}},
        {"transparent_to_backtracking", kP123, "catch(p(X), _, true)", {"X=1", "X=2", "X=3"}, "exhausted", "", {}, {}},
        {"throw_after_retry_is_caught", kP123, "catch((p(X), X >= 2, throw(found(X))), found(Y), true)", {"X=_,Y=2"},
         "exhausted", "", {"p/1:1", "p/1:2"}, {"p/1:3"}},
        {"catch_skips_remaining_alternatives", kP123, "catch((p(X), X > 1, throw(t)), t, fail)", {}, "exhausted", "",
         {"p/1:1", "p/1:2"}, {"p/1:3"}},
        {"inactive_after_exit", kP123, "catch(p(X), t, true), throw(t)", {}, "uncaught-exception", "t", {"p/1:1"}, {"p/1:2"}},
        {"innermost_catch_wins", "", "catch(catch(throw(x), x, R = inner), x, R = outer)", {"R=inner"}, "exhausted", "", {}, {}},
        {"recovery_throw_goes_outward", "", "catch(catch(throw(a), a, throw(b)), b, R = got_b)", {"R=got_b"}, "exhausted", "", {}, {}},
        {"unbound_ball", "", "catch(throw(_), error(E, _), true)", {"E=instantiation_error"}, "exhausted", "", {}, {}},
        {"arithmetic_error_ball", "", "catch(X is foo + 1, error(type_error(T, _), _), true)", {"X=_,T=evaluable"}, "exhausted", "", {}, {}},
        {"retry_into_goal_after_exit", kP123, "catch(p(X), _, true), X > 1", {"X=2", "X=3"}, "exhausted", "", {}, {}},
        {"recovery_is_nondeterministic", kP123, "catch(throw(t), t, p(X))", {"X=1", "X=2", "X=3"}, "exhausted", "", {}, {}},
        {"unknown_procedure_ball", "", "catch(nope, error(existence_error(procedure, PI), _), true)", {"PI=/(nope,0)"}, "exhausted", "", {}, {}},
        {"ball_from_deep_recursion", "d(0) :- throw(bottom). d(N) :- N > 0, M is N - 1, d(M).",
         "catch(d(5), B, true)", {"B=bottom"}, "exhausted", "", {}, {}},
        {"catcher_instantiated_in_goal", kP123, "catch((p(X), throw(X)), 2, true)", {}, "uncaught-exception", "1", {}, {"p/1:2"}},
    };
    return cases;
}

std::string render_answer(const Answer& a) {
    if (a.bindings.empty()) return "true";
    std::string out;
    for (const auto& [name, value] : a.bindings) {
        if (!out.empty()) out += ',';
        out += name + "=" + write_term(value, [](const Term&) { return std::string("_"); });
    }
    return out;
}

std::string check_catch_case(const CatchCase& c) {
    Program p = parse_program(c.program);
    SolveOptions opts;
    opts.verify_trail = true;
    VectorSink sink;
    SolveResult r = solve(p, c.query, opts, &sink);

    std::vector<std::string> got;
    for (const auto& a : r.answers) got.push_back(render_answer(a));
    auto join = [](const std::vector<std::string>& v) {
        std::string s;
        for (const auto& x : v) s += (s.empty() ? "" : " ; ") + x;
        return "[" + s + "]";
    };
    if (got != c.answers) return "answers " + join(got) + ", expected " + join(c.answers);
    if (to_string(r.status) != c.status) return "status " + std::string(to_string(r.status)) + ", expected " + c.status;
    std::string ball = r.ball ? write_term(*r.ball) : "";
    if (r.status == ExitStatus::UncaughtException && ball != c.ball) return "ball " + ball + ", expected " + c.ball;

    std::vector<std::string> tries;
    for (const auto& e : sink.events())
        if (e.kind == TraceKind::ClauseTry) tries.push_back(e.pred.str() + ":" + std::to_string(e.clause_index));
    auto has = [&](const std::string& t) { return std::find(tries.begin(), tries.end(), t) != tries.end(); };
    for (const auto& t : c.tried)
        if (!has(t)) return "missing ClauseTry " + t;
    for (const auto& t : c.skipped)
        if (has(t)) return "unexpected ClauseTry " + t;
    return {};
}

}  // namespace ldbj::testing
