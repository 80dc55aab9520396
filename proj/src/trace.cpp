#include "ldbj/trace.hpp"

#include <charconv>
#include <map>
#include <ostream>
#include <sstream>

#include "ldbj/builtins.hpp"

namespace ldbj {

namespace {

constexpr std::string_view kKindNames[] = {"Call", "Exit", "Redo", "Fail", "ClauseTry", "Throw", "Catch", "Backjump"};

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto tab = line.find('\t', start);
        out.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
        if (tab == std::string_view::npos) break;
        start = tab + 1;
    }
    return out;
}

template <class T>
T parse_number(std::string_view s, std::size_t line) {
    T v{};
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw std::invalid_argument("trace line " + std::to_string(line) + ": bad number '" + std::string(s) + "'");
    return v;
}

bool is_port(TraceKind k) {
    return k == TraceKind::Call || k == TraceKind::Exit || k == TraceKind::Redo || k == TraceKind::Fail ||
           k == TraceKind::ClauseTry;
}

}  // namespace

std::string_view to_string(TraceKind k) { return kKindNames[static_cast<int>(k)]; }

std::optional<TraceKind> parse_trace_kind(std::string_view s) {
    for (int i = 0; i < 8; ++i)
        if (kKindNames[i] == s) return static_cast<TraceKind>(i);
    return std::nullopt;
}

StreamSink::StreamSink(std::ostream& out) : out_(out) {
    out_ << kTraceHeader << '\n';
    if (!out_) throw TraceWriteError("cannot write trace header");
}

void StreamSink::record(const TraceEvent& e) {
    out_ << format_event(e) << '\n';
    if (!out_) throw TraceWriteError("trace write failed at step " + std::to_string(e.step));
}

std::string format_event(const TraceEvent& e) {
    std::string s = std::to_string(e.step);
    s += '\t';
    s += to_string(e.kind);
    s += '\t';
    s += e.pred.name.empty() && e.pred.arity == 0 ? std::string("-") : e.pred.str();
    s += '\t';
    s += e.node ? std::to_string(e.node) : "-";
    s += '\t';
    s += e.clause_index ? std::to_string(e.clause_index) : "-";
    s += '\t';
    s += e.ball ? *e.ball : "-";
    s += '\t';
    s += std::to_string(e.depth);
    return s;
}

std::string format_trace(const Trace& t) {
    std::string out(kTraceHeader);
    out += '\n';
    for (const auto& e : t) {
        out += format_event(e);
        out += '\n';
    }
    return out;
}

Trace parse_trace(std::string_view text) {
    Trace out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        ++line_no;
        if (line_no == 1) {
            if (line != kTraceHeader) throw std::invalid_argument("missing '" + std::string(kTraceHeader) + "' header");
            continue;
        }
        if (line.empty()) continue;
        auto f = split_tabs(line);
        if (f.size() != 7) throw std::invalid_argument("trace line " + std::to_string(line_no) + ": expected 7 fields");
        TraceEvent e;
        e.step = parse_number<std::uint64_t>(f[0], line_no);
        auto kind = parse_trace_kind(f[1]);
        if (!kind) throw std::invalid_argument("trace line " + std::to_string(line_no) + ": unknown kind");
        e.kind = *kind;
        if (f[2] != "-") e.pred = parse_pred_key(f[2]);
        if (f[3] != "-") e.node = parse_number<std::uint64_t>(f[3], line_no);
        if (f[4] != "-") e.clause_index = parse_number<std::uint32_t>(f[4], line_no);
        if (f[5] != "-") e.ball = std::string(f[5]);
        e.depth = parse_number<std::uint32_t>(f[6], line_no);
        out.push_back(std::move(e));
    }
    return out;
}

Trace project_user(const Trace& t, const std::set<PredKey>& also_drop) {
    Trace out;
    for (const auto& e : t) {
        if (!is_port(e.kind) || is_bookkeeping(e.pred) || also_drop.contains(e.pred)) continue;
        out.push_back(e);
    }
    return out;
}

Trace clause_tries_only(const Trace& t) {
    Trace out;
    for (const auto& e : t)
        if (e.kind == TraceKind::ClauseTry) out.push_back(e);
    return out;
}

std::optional<Divergence> compare(const Trace& a, const Trace& b) {
    std::map<std::uint64_t, std::uint64_t> label_a, label_b;
    auto relabel = [](std::map<std::uint64_t, std::uint64_t>& labels, std::uint64_t node) -> std::uint64_t {
        if (node == 0) return 0;
        return labels.try_emplace(node, labels.size() + 1).first->second;
    };
    std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        const auto& x = a[i];
        const auto& y = b[i];
        bool same = x.kind == y.kind && x.pred == y.pred && x.clause_index == y.clause_index &&
                    relabel(label_a, x.node) == relabel(label_b, y.node);
        if (!same) return Divergence{i, x.step, y.step};
    }
    if (a.size() == b.size()) return std::nullopt;
    return Divergence{n, n < a.size() ? a[n].step : 0, n < b.size() ? b[n].step : 0};
}

void TraceStats::count(TraceKind k, std::uint32_t depth) {
    switch (k) {
    case TraceKind::Call: ++calls; break;
    case TraceKind::Exit: ++exits; break;
    case TraceKind::Redo: ++redos; break;
    case TraceKind::Fail: ++fails; break;
    case TraceKind::ClauseTry: ++clause_tries; break;
    case TraceKind::Throw: ++throws; break;
    case TraceKind::Catch: ++catches; break;
    case TraceKind::Backjump: ++backjumps; break;
    }
    if (depth > max_depth) max_depth = depth;
}

TraceStats stats(const Trace& t) {
    TraceStats s;
    for (const auto& e : t) s.count(e);
    return s;
}

std::optional<std::string> check_well_nested(const Trace& t) {
    struct NodeState {
        bool failed = false;
        bool tried = false;
        std::uint32_t last_clause = 0;
    };
    std::map<std::uint64_t, NodeState> nodes;
    for (const auto& e : t) {
        if (!is_port(e.kind) || e.node == 0) continue;
        auto where = [&] { return "step " + std::to_string(e.step) + " (" + e.pred.str() + ")"; };
        auto it = nodes.find(e.node);
        if (e.kind == TraceKind::Call) {
            if (it != nodes.end()) return "node called twice at " + where();
            nodes.emplace(e.node, NodeState{});
            continue;
        }
        if (it == nodes.end()) return std::string(to_string(e.kind)) + " before Call at " + where();
        auto& st = it->second;
        if (st.failed) return "event after Fail at " + where();
        switch (e.kind) {
        case TraceKind::ClauseTry:
            if (e.clause_index <= st.last_clause) return "clause index not increasing at " + where();
            st.last_clause = e.clause_index;
            st.tried = true;
            break;
        case TraceKind::Exit:
            if (!st.tried) return "Exit without ClauseTry at " + where();
            break;
        case TraceKind::Fail:
            st.failed = true;
            break;
        default:
            break;
        }
    }
    return std::nullopt;
}

}  // namespace ldbj
