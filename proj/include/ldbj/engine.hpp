#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ldbj/term.hpp"
#include "ldbj/trace.hpp"

namespace ldbj {

enum class EngineMode { Plain, NativeBackjump };

struct Limits {
    std::uint64_t max_steps = 10'000'000;
    std::uint64_t max_answers = UINT64_MAX;
};

struct SolveOptions {
    EngineMode mode = EngineMode::Plain;
    Limits limits;
    bool occurs_check = false;
    // Compare the whole heap with a snapshot every time a choice point is
    // resumed. Slow; for tests.
    bool verify_trail = false;
};

enum class ExitStatus { Exhausted, AnswerLimit, StepLimit, UncaughtException, Error };

std::string_view to_string(ExitStatus s);

// Query variables (named, non-anonymous) and their dereferenced values.
struct Answer {
    std::vector<std::pair<std::string, Term>> bindings;

    const Term* find(std::string_view name) const;
};

struct SolveResult {
    std::vector<Answer> answers;
    ExitStatus status = ExitStatus::Exhausted;
    std::optional<Term> ball;  // for UncaughtException and thrown errors
    std::string message;       // for Error
    std::uint64_t steps = 0;
    TraceStats stats;
};

// Depth-first, leftmost-goal, textual-clause-order resolution with ISO-style
// catch/throw. In native_backjump mode parent_choice/1 and backjump/1 are
// available; in plain mode they are unknown procedures.
//
// Every user-predicate call gets a NodeId and a choice point that stays on
// the stack until all of its clauses have been tried, so a node can be the
// target of backjump/1 for as long as its subtree is being explored.
SolveResult solve(const Program& program, const Term& query, const SolveOptions& options = {},
                  TraceSink* sink = nullptr);

// Convenience: parse the query text first (variables named as written).
SolveResult solve(const Program& program, std::string_view query, const SolveOptions& options = {},
                  TraceSink* sink = nullptr);

}  // namespace ldbj
