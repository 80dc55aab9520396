#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ldbj/term.hpp"

namespace ldbj {

enum class TraceKind : std::uint8_t { Call, Exit, Redo, Fail, ClauseTry, Throw, Catch, Backjump };

std::string_view to_string(TraceKind k);
std::optional<TraceKind> parse_trace_kind(std::string_view s);

// One traversal event. node is the NodeId of the user-predicate call the
// event belongs to (0 for built-ins); clause_index is 1-based.
struct TraceEvent {
    std::uint64_t step = 0;
    TraceKind kind = TraceKind::Call;
    PredKey pred;
    std::uint64_t node = 0;
    std::uint32_t clause_index = 0;
    std::optional<std::string> ball;  // written form, Throw/Catch only
    std::uint32_t depth = 0;

    friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

using Trace = std::vector<TraceEvent>;

class TraceWriteError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class TraceSink {
public:
    virtual ~TraceSink() = default;
    virtual void record(const TraceEvent& e) = 0;
};

class VectorSink final : public TraceSink {
public:
    void record(const TraceEvent& e) override { events_.push_back(e); }
    const Trace& events() const { return events_; }
    Trace take() { return std::move(events_); }

private:
    Trace events_;
};

// Writes the "ldtrace 1" text format. Throws TraceWriteError if the stream
// goes bad.
class StreamSink final : public TraceSink {
public:
    explicit StreamSink(std::ostream& out);
    void record(const TraceEvent& e) override;

private:
    std::ostream& out_;
};

inline constexpr std::string_view kTraceHeader = "ldtrace 1";

// Tab-separated: step, kind, pred, node, clause_index, ball, depth; "-" for
// absent fields.
std::string format_event(const TraceEvent& e);
std::string format_trace(const Trace& t);
// Inverse of format_trace; throws std::invalid_argument on malformed input.
Trace parse_trace(std::string_view text);

// Keeps only port events (Call/Exit/Redo/Fail/ClauseTry) of user predicates,
// dropping built-ins, '$' predicates and anything listed in also_drop.
Trace project_user(const Trace& t, const std::set<PredKey>& also_drop = {});
// Only the ClauseTry events.
Trace clause_tries_only(const Trace& t);

struct Divergence {
    std::size_t index = 0;  // position in the compared traces
    std::uint64_t step_a = 0;
    std::uint64_t step_b = 0;  // 0 when that trace ended early
};

// Event-by-event comparison of kind, predicate and clause index; node ids
// are compared after relabelling each trace by first occurrence.
std::optional<Divergence> compare(const Trace& a, const Trace& b);

struct TraceStats {
    std::uint64_t calls = 0;
    std::uint64_t exits = 0;
    std::uint64_t redos = 0;
    std::uint64_t fails = 0;
    std::uint64_t clause_tries = 0;
    std::uint64_t throws = 0;
    std::uint64_t catches = 0;
    std::uint64_t backjumps = 0;
    std::uint32_t max_depth = 0;

    void count(const TraceEvent& e) { count(e.kind, e.depth); }
    void count(TraceKind k, std::uint32_t depth);
    friend bool operator==(const TraceStats&, const TraceStats&) = default;
};

TraceStats stats(const Trace& t);

// Checks per-node event order: Call first, ClauseTry indices increasing,
// Exit only after a ClauseTry, nothing after Fail. Returns a description of
// the first violation.
std::optional<std::string> check_well_nested(const Trace& t);

}  // namespace ldbj
