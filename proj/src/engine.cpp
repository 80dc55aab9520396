#include "ldbj/engine.hpp"

#include <algorithm>
#include <limits>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <unordered_map>

#include "ldbj/builtins.hpp"
#include "ldbj/reader.hpp"
#include "ldbj/store.hpp"
#include "ldbj/writer.hpp"

namespace ldbj {

std::string_view to_string(ExitStatus s) {
    switch (s) {
    case ExitStatus::Exhausted: return "exhausted";
    case ExitStatus::AnswerLimit: return "answer-limit";
    case ExitStatus::StepLimit: return "step-limit";
    case ExitStatus::UncaughtException: return "uncaught-exception";
    case ExitStatus::Error: return "error";
    }
    return "error";
}

const Term* Answer::find(std::string_view name) const {
    for (const auto& [n, t] : bindings)
        if (n == name) return &t;
    return nullptr;
}

namespace {

constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

enum class FrameKind : std::uint8_t { Goal, Exit, CatchExit, Commit };

// Continuation cell. Frames form linked lists through next; the arena only
// grows between choice points and is cut back when one is resumed.
struct Frame {
    Cell goal;                // Goal: goal to run; Exit: the call
    std::uint64_t node = 0;   // Goal: node of the enclosing call; Exit: the call's node
    std::uint32_t next = kNone;
    std::uint32_t depth = 0;  // depth of the enclosing call (Exit: of the call itself)
    std::uint32_t aux = 0;    // Exit: dispatch entry; CatchExit: catch record; Commit: choice height
    FrameKind kind = FrameKind::Goal;
};

struct CatchRecord {
    Cell catcher;
    Cell recovery;
    TrailMark trail;
    std::size_t heap_top = 0;
    std::uint32_t frames_top = 0;
    std::uint32_t choice_height = 0;
    std::uint32_t cont = kNone;
    std::uint64_t node = 0;
    std::uint32_t depth = 0;
};

enum class ChoiceKind : std::uint8_t { Clauses, Alternative };

struct ChoicePoint {
    ChoiceKind kind = ChoiceKind::Clauses;
    Cell goal;
    std::uint64_t node = 0;  // Clauses: NodeId of the call; Alternative: enclosing call
    std::uint32_t entry = 0;  // dispatch entry of the called predicate
    std::uint32_t next_clause = 0;
    std::uint32_t cont = kNone;
    std::uint32_t depth = 0;
    TrailMark trail;
    std::size_t heap_top = 0;
    std::uint32_t frames_top = 0;
    std::uint32_t catches_top = 0;
    std::vector<Cell> heap_snapshot;  // only with verify_trail
};

enum class DispatchKind : std::uint8_t { User, Builtin, Unknown };

struct Dispatch {
    DispatchKind kind = DispatchKind::Unknown;
    PredKey key;
    Builtin builtin = Builtin::True;
    bool control = false;
    std::span<const ClauseTemplate> clauses;
};

// Clause templates of a program, with the symbol table they were built in.
struct CompiledProgram {
    SymbolTable symbols;
    std::vector<std::pair<PredKey, std::vector<ClauseTemplate>>> procedures;
};

// Recently compiled programs by Program::serial. Runs over the same corpus
// program then skip recompiling it.
std::shared_ptr<const CompiledProgram> compiled(const Program& program) {
    static std::mutex mu;
    static std::deque<std::pair<std::uint64_t, std::shared_ptr<const CompiledProgram>>> cache;
    {
        std::lock_guard lock(mu);
        for (const auto& [serial, c] : cache)
            if (serial == program.serial()) return c;
    }
    auto out = std::make_shared<CompiledProgram>();
    Bindings scratch;
    for (const auto& [key, positions] : program.index()) {
        std::vector<ClauseTemplate> clauses;
        for (auto pos : positions) clauses.push_back(scratch.compile(program.clauses()[pos]));
        out->procedures.emplace_back(key, std::move(clauses));
    }
    out->symbols = scratch.symbols();
    std::lock_guard lock(mu);
    cache.emplace_back(program.serial(), out);
    if (cache.size() > 32) cache.pop_front();
    return out;
}

// A thrown ball that has not yet been placed on the heap.
struct PendingBall {
    Term ball;
};

Term error_term(Term formal, const PredKey& context) {
    return Term::compound("error", {std::move(formal), Term::compound("/", {Term::atom(context.name),
                                                                           Term::integer(static_cast<std::int64_t>(context.arity))})});
}

class Machine {
public:
    Machine(const Program& program, const SolveOptions& options, TraceSink* sink)
        : options_(options), sink_(sink), code_(compiled(program)), store_(code_->symbols) {
        for (const auto& [key, clauses] : code_->procedures) {
            Dispatch d;
            d.kind = DispatchKind::User;
            d.key = key;
            d.clauses = clauses;
            add_entry(std::move(d));
        }
        dot_ = store_.intern(".");
        nil_ = store_.intern("[]");
        bj_ = store_.intern(kBacktrackIdFunctor);
    }

    SolveResult run(const Term& query) {
        std::map<std::int64_t, Cell> vars;
        Cell root = store_.put(query, vars);
        std::vector<std::pair<std::string, Cell>> named;
        for (const auto& v : term_variables(query))
            if (!v.hint().empty() && v.hint().front() != '_') named.emplace_back(v.hint(), vars.at(v.var_id()));

        cur_ = push_frame({root, 0, kNone, 0, 0, FrameKind::Goal});
        try {
            loop(named);
        } catch (const TraceWriteError& e) {
            finish(ExitStatus::Error);
            result_.message = e.what();
        } catch (const CyclicTermError& e) {
            finish(ExitStatus::Error);
            result_.message = e.what();
        }
        result_.steps = steps_;
        result_.stats = stats_;
        return std::move(result_);
    }

private:
    // ---- control ---------------------------------------------------------

    void loop(const std::vector<std::pair<std::string, Cell>>& named) {
        while (!done_) {
            if (cur_ == kNone) {
                Answer a;
                for (const auto& [name, cell] : named) a.bindings.emplace_back(name, store_.resolve(cell));
                result_.answers.push_back(std::move(a));
                if (result_.answers.size() >= options_.limits.max_answers) {
                    finish(ExitStatus::AnswerLimit);
                    break;
                }
                fail();
                continue;
            }
            const Frame f = frames_[cur_];
            switch (f.kind) {
            case FrameKind::Goal:
                execute(f);
                break;
            case FrameKind::Exit:
                emit(TraceKind::Exit, entries_[f.aux].key, f.node, 0, f.depth);
                cur_ = f.next;
                break;
            case FrameKind::CatchExit:
                emit(TraceKind::Exit, catch_key_, 0, 0, f.depth + 1);
                cur_ = f.next;
                break;
            case FrameKind::Commit:
                choices_.resize(f.aux);
                cur_ = f.next;
                break;
            }
        }
    }

    void finish(ExitStatus s) {
        if (done_) return;
        done_ = true;
        result_.status = s;
    }

    void fail() {
        if (!backtrack() && !done_) finish(ExitStatus::Exhausted);
    }

    bool count_step() {
        if (++steps_ > options_.limits.max_steps) {
            --steps_;
            finish(ExitStatus::StepLimit);
            return false;
        }
        return true;
    }

    std::uint32_t push_frame(const Frame& f) {
        frames_.push_back(f);
        return static_cast<std::uint32_t>(frames_.size() - 1);
    }

    ChoicePoint& push_choice(ChoiceKind kind, Cell goal, std::uint64_t node, std::uint32_t cont, std::uint32_t depth) {
        ChoicePoint cp;
        cp.kind = kind;
        cp.goal = goal;
        cp.node = node;
        cp.cont = cont;
        cp.depth = depth;
        cp.trail = store_.mark();
        cp.heap_top = store_.heap_top();
        cp.frames_top = static_cast<std::uint32_t>(frames_.size());
        cp.catches_top = static_cast<std::uint32_t>(catches_.size());
        if (options_.verify_trail) cp.heap_snapshot = store_.snapshot();
        choices_.push_back(std::move(cp));
        return choices_.back();
    }

    void restore(const ChoicePoint& cp) {
        store_.undo_to(cp.trail);
        store_.truncate(cp.heap_top);
        frames_.resize(cp.frames_top);
        catches_.resize(cp.catches_top);
        if (options_.verify_trail && store_.snapshot() != cp.heap_snapshot) {
            finish(ExitStatus::Error);
            result_.message = "trail discipline violated at node " + std::to_string(cp.node);
        }
    }

    // Resumes the youngest choice point. Returns false when none is left or
    // the run has been stopped.
    bool backtrack() {
        while (!choices_.empty() && !done_) {
            auto i = choices_.size() - 1;
            restore(choices_[i]);
            if (done_) return false;
            if (choices_[i].kind == ChoiceKind::Alternative) {
                ChoicePoint cp = std::move(choices_[i]);
                choices_.pop_back();
                cur_ = push_frame({cp.goal, cp.node, cp.cont, cp.depth, 0, FrameKind::Goal});
                return true;
            }
            auto& cp = choices_[i];
            const auto& d = entries_[cp.entry];
            if (cp.next_clause < d.clauses.size()) {
                if (!count_step()) return false;
                emit(TraceKind::Redo, d.key, cp.node, 0, cp.depth);
                if (try_clauses(i)) return true;
                continue;  // try_clauses popped it
            }
            emit(TraceKind::Fail, d.key, cp.node, 0, cp.depth);
            choices_.pop_back();
        }
        return false;
    }

    bool try_clauses(std::size_t i) {
        auto& cp = choices_[i];
        const auto& d = entries_[cp.entry];
        for (auto j = cp.next_clause; j < d.clauses.size(); ++j) {
            emit(TraceKind::ClauseTry, d.key, cp.node, j + 1, cp.depth);
            const auto& tmpl = d.clauses[j];
            std::size_t base = 0;
            Cell head = store_.rename_head(tmpl, base);
            if (store_.unify(cp.goal, head, options_.occurs_check)) {
                cp.next_clause = j + 1;
                auto exit = push_frame({cp.goal, cp.node, cp.cont, cp.depth, cp.entry, FrameKind::Exit});
                if (tmpl.fact) {
                    cur_ = exit;
                } else {
                    Cell body = store_.rename_body(tmpl, base);
                    cur_ = push_frame({body, cp.node, exit, cp.depth, 0, FrameKind::Goal});
                }
                return true;
            }
            store_.truncate(cp.heap_top);
        }
        cp.next_clause = static_cast<std::uint32_t>(d.clauses.size());
        emit(TraceKind::Fail, d.key, cp.node, 0, cp.depth);
        choices_.pop_back();
        return false;
    }

    // Copy of a btid argument with fresh variables. Programs may store Id in
    // data reachable from the arguments, so sharing them would make Id cyclic,
    // and a full copy would nest every earlier identifier's payload. Nested
    // identifiers keep their number only: '$bj'(M, []).
    Cell id_payload(Cell c, std::map<std::size_t, Cell>& vars, std::size_t depth) {
        if (depth == 0) throw CyclicTermError();
        c = store_.deref(c);
        if (c.tag == Tag::Ref) {
            auto [it, fresh] = vars.try_emplace(c.index());
            if (fresh) it->second = store_.new_var();
            return it->second;
        }
        if (c.tag != Tag::Str) return c;
        const Cell f = store_.functor(c);
        if (f.symbol() == bj_ && f.aux == 2) return store_.make_compound(bj_, {store_.deref(store_.arg(c, 0)), Cell::atom(nil_)});
        std::vector<Cell> args(f.aux);
        for (std::size_t i = 0; i < f.aux; ++i) args[i] = id_payload(store_.arg(c, i), vars, depth - 1);
        return store_.make_compound(f.symbol(), args);
    }

    // ---- goals -----------------------------------------------------------

    std::uint32_t lookup(Symbol name, std::size_t arity) {
        std::uint64_t k = (static_cast<std::uint64_t>(name) << 16) | arity;
        if (auto it = dispatch_.find(k); it != dispatch_.end()) return it->second;
        Dispatch d;
        d.key = {store_.symbols().name(name), arity};
        if (auto b = lookup_builtin(d.key.name, arity)) {
            d.kind = DispatchKind::Builtin;
            d.builtin = b->id;
            d.control = b->control;
            bool native_only = b->id == Builtin::ParentChoice || b->id == Builtin::Backjump;
            if (native_only && options_.mode == EngineMode::Plain) d.kind = DispatchKind::Unknown;
        }
        auto idx = add_entry(std::move(d));
        dispatch_.emplace(k, idx);
        return idx;
    }

    std::uint32_t add_entry(Dispatch d) {
        std::uint64_t k = (static_cast<std::uint64_t>(store_.intern(d.key.name)) << 16) | d.key.arity;
        entries_.push_back(std::move(d));
        auto idx = static_cast<std::uint32_t>(entries_.size() - 1);
        dispatch_.emplace(k, idx);
        return idx;
    }

    void execute(const Frame& f) {
        Cell g = store_.deref(f.goal);
        try {
            if (g.tag == Tag::Ref) throw PendingBall{error_term(Term::atom("instantiation_error"), {"call", 1})};
            if (g.tag == Tag::Int)
                throw PendingBall{error_term(Term::compound("type_error", {Term::atom("callable"), Term::integer(g.value)}), {"call", 1})};
            Symbol name = g.tag == Tag::Atom ? g.symbol() : store_.functor(g).symbol();
            std::size_t arity = g.tag == Tag::Atom ? 0 : store_.functor(g).aux;
            auto entry = lookup(name, arity);
            const auto& d = entries_[entry];
            switch (d.kind) {
            case DispatchKind::User:
                call_user(g, entry, f);
                return;
            case DispatchKind::Unknown:
                throw PendingBall{error_term(
                    Term::compound("existence_error",
                                   {Term::atom("procedure"), Term::compound("/", {Term::atom(d.key.name), Term::integer(static_cast<std::int64_t>(arity))})}),
                    d.key)};
            case DispatchKind::Builtin:
                if (d.control)
                    control(g, d.builtin, f);
                else
                    builtin(g, entry, f);
                return;
            }
        } catch (PendingBall& pb) {
            throw_ball(pb.ball, f.next, f.depth + 1);
        }
    }

    void call_user(Cell g, std::uint32_t entry, const Frame& f) {
        if (!count_step()) return;
        std::uint64_t node = ++node_counter_;
        std::uint32_t depth = f.depth + 1;
        emit(TraceKind::Call, entries_[entry].key, node, 0, depth);
        auto& cp = push_choice(ChoiceKind::Clauses, g, node, f.next, depth);
        cp.entry = entry;
        if (!try_clauses(choices_.size() - 1)) fail();
    }

    void control(Cell g, Builtin b, const Frame& f) {
        Cell a = store_.arg(g, 0);
        Cell c = store_.arg(g, 1);
        switch (b) {
        case Builtin::Conj: {
            auto rest = push_frame({c, f.node, f.next, f.depth, 0, FrameKind::Goal});
            cur_ = push_frame({a, f.node, rest, f.depth, 0, FrameKind::Goal});
            return;
        }
        case Builtin::Disj: {
            Cell left = store_.deref(a);
            if (left.tag == Tag::Str && is_functor(left, "->", 2)) {
                auto height = static_cast<std::uint32_t>(choices_.size());
                push_choice(ChoiceKind::Alternative, c, f.node, f.next, f.depth);
                auto then = push_frame({store_.arg(left, 1), f.node, f.next, f.depth, 0, FrameKind::Goal});
                auto commit = push_frame({Cell{}, f.node, then, f.depth, height, FrameKind::Commit});
                cur_ = push_frame({store_.arg(left, 0), f.node, commit, f.depth, 0, FrameKind::Goal});
                return;
            }
            push_choice(ChoiceKind::Alternative, c, f.node, f.next, f.depth);
            cur_ = push_frame({a, f.node, f.next, f.depth, 0, FrameKind::Goal});
            return;
        }
        case Builtin::IfThen: {
            auto height = static_cast<std::uint32_t>(choices_.size());
            auto then = push_frame({c, f.node, f.next, f.depth, 0, FrameKind::Goal});
            auto commit = push_frame({Cell{}, f.node, then, f.depth, height, FrameKind::Commit});
            cur_ = push_frame({a, f.node, commit, f.depth, 0, FrameKind::Goal});
            return;
        }
        default:
            return;
        }
    }

    bool is_functor(Cell str, std::string_view name, std::size_t arity) const {
        const Cell& fn = store_.functor(str);
        return fn.aux == arity && store_.symbols().name(fn.symbol()) == name;
    }

    void builtin(Cell g, std::uint32_t entry, const Frame& f) {
        if (!count_step()) return;
        const PredKey& key = entries_[entry].key;
        std::uint32_t depth = f.depth + 1;
        emit(TraceKind::Call, key, 0, 0, depth);
        auto arg = [&](std::size_t i) { return store_.deref(store_.arg(g, i)); };
        bool ok = true;
        switch (entries_[entry].builtin) {
        case Builtin::True:
            break;
        case Builtin::Fail:
            ok = false;
            break;
        case Builtin::Unify:
            ok = store_.unify(arg(0), arg(1), options_.occurs_check);
            break;
        case Builtin::Var:
            ok = arg(0).tag == Tag::Ref;
            break;
        case Builtin::Nonvar:
            ok = arg(0).tag != Tag::Ref;
            break;
        case Builtin::Is:
            ok = store_.unify(arg(0), Cell::integer(eval(arg(1), key)), options_.occurs_check);
            break;
        case Builtin::Greater:
            ok = eval(arg(0), key) > eval(arg(1), key);
            break;
        case Builtin::Less:
            ok = eval(arg(0), key) < eval(arg(1), key);
            break;
        case Builtin::GreaterEq:
            ok = eval(arg(0), key) >= eval(arg(1), key);
            break;
        case Builtin::LessEq:
            ok = eval(arg(0), key) <= eval(arg(1), key);
            break;
        case Builtin::Btid: {
            std::map<std::size_t, Cell> vars;
            Cell id = store_.make_compound(bj_, {Cell::integer(++btid_counter_), id_payload(arg(0), vars, Bindings::kDefaultDepthCap)});
            ok = store_.unify(arg(1), id, options_.occurs_check);
            break;
        }
        case Builtin::SortDesc:
            ok = sort_desc(arg(0), arg(1), key);
            break;
        case Builtin::Catch:
            enter_catch(g, f);
            return;
        case Builtin::Throw: {
            Cell ball = arg(0);
            if (ball.tag == Tag::Ref) throw PendingBall{error_term(Term::atom("instantiation_error"), key)};
            throw_ball(store_.resolve(ball), f.next, depth);
            return;
        }
        case Builtin::ParentChoice:
            if (f.node == 0)
                throw PendingBall{error_term(Term::compound("existence_error", {Term::atom("parent_call"), Term::atom("top_level")}), key)};
            ok = store_.unify(arg(0), Cell::integer(static_cast<std::int64_t>(f.node)), options_.occurs_check);
            break;
        case Builtin::Backjump:
            backjump(arg(0), key, depth);
            return;
        case Builtin::MyIdMarker:
        case Builtin::CatchRestMarker:
            throw PendingBall{error_term(
                Term::compound("system_error", {Term::compound("transformation_leak", {Term::compound("/", {Term::atom(key.name), Term::integer(1)})})}),
                key)};
        default:
            break;
        }
        if (ok) {
            emit(TraceKind::Exit, key, 0, 0, depth);
            cur_ = f.next;
        } else {
            emit(TraceKind::Fail, key, 0, 0, depth);
            fail();
        }
    }

    std::int64_t eval(Cell c, const PredKey& ctx) {
        c = store_.deref(c);
        switch (c.tag) {
        case Tag::Int:
            return c.value;
        case Tag::Ref:
            throw PendingBall{error_term(Term::atom("instantiation_error"), ctx)};
        case Tag::Atom:
            throw PendingBall{error_term(
                Term::compound("type_error", {Term::atom("evaluable"), Term::compound("/", {Term::atom(store_.symbols().name(c.symbol())), Term::integer(0)})}),
                ctx)};
        default:
            break;
        }
        const Cell& fn = store_.functor(c);
        const std::string& op = store_.symbols().name(fn.symbol());
        if (fn.aux == 1 && op == "-") return -eval(store_.arg(c, 0), ctx);
        if (fn.aux == 1 && op == "+") return eval(store_.arg(c, 0), ctx);
        if (fn.aux == 2) {
            std::int64_t x = eval(store_.arg(c, 0), ctx);
            std::int64_t y = eval(store_.arg(c, 1), ctx);
            std::int64_t r = 0;
            bool overflow = false;
            if (op == "+") {
                overflow = __builtin_add_overflow(x, y, &r);
            } else if (op == "-") {
                overflow = __builtin_sub_overflow(x, y, &r);
            } else if (op == "*") {
                overflow = __builtin_mul_overflow(x, y, &r);
            } else if (op == "//") {
                if (y == 0) throw PendingBall{error_term(Term::compound("evaluation_error", {Term::atom("zero_divisor")}), ctx)};
                overflow = x == std::numeric_limits<std::int64_t>::min() && y == -1;
                if (!overflow) r = x / y;
            } else {
                throw_unevaluable(op, 2, ctx);
            }
            if (overflow) throw PendingBall{error_term(Term::compound("evaluation_error", {Term::atom("int_overflow")}), ctx)};
            return r;
        }
        throw_unevaluable(op, fn.aux, ctx);
    }

    [[noreturn]] void throw_unevaluable(const std::string& op, std::size_t arity, const PredKey& ctx) {
        throw PendingBall{error_term(
            Term::compound("type_error", {Term::atom("evaluable"), Term::compound("/", {Term::atom(op), Term::integer(static_cast<std::int64_t>(arity))})}),
            ctx)};
    }

    bool sort_desc(Cell list, Cell out, const PredKey& ctx) {
        std::vector<std::int64_t> values;
        Cell cur = list;
        while (true) {
            cur = store_.deref(cur);
            if (cur.tag == Tag::Ref) throw PendingBall{error_term(Term::atom("instantiation_error"), ctx)};
            if (cur.tag == Tag::Atom && cur.symbol() == nil_) break;
            if (cur.tag != Tag::Str || store_.functor(cur) != Cell::fun(dot_, 2))
                throw PendingBall{error_term(Term::compound("type_error", {Term::atom("list"), store_.resolve(list)}), ctx)};
            Cell item = store_.deref(store_.arg(cur, 0));
            if (item.tag == Tag::Ref) throw PendingBall{error_term(Term::atom("instantiation_error"), ctx)};
            if (item.tag != Tag::Int)
                throw PendingBall{error_term(Term::compound("type_error", {Term::atom("integer"), store_.resolve(item)}), ctx)};
            values.push_back(item.value);
            cur = store_.arg(cur, 1);
        }
        std::stable_sort(values.begin(), values.end(), std::greater<>());
        std::vector<Cell> cells;
        cells.reserve(values.size());
        for (auto v : values) cells.push_back(Cell::integer(v));
        return store_.unify(out, store_.make_list(cells, Cell::atom(nil_)), options_.occurs_check);
    }

    // ---- exceptions and backjumping --------------------------------------

    void enter_catch(Cell g, const Frame& f) {
        CatchRecord rec;
        rec.catcher = store_.arg(g, 1);
        rec.recovery = store_.arg(g, 2);
        rec.trail = store_.mark();
        rec.heap_top = store_.heap_top();
        rec.frames_top = static_cast<std::uint32_t>(frames_.size());
        rec.choice_height = static_cast<std::uint32_t>(choices_.size());
        rec.cont = f.next;
        rec.node = f.node;
        rec.depth = f.depth;
        catches_.push_back(rec);
        auto exit = push_frame({Cell{}, f.node, f.next, f.depth, static_cast<std::uint32_t>(catches_.size() - 1), FrameKind::CatchExit});
        cur_ = push_frame({store_.arg(g, 0), f.node, exit, f.depth, 0, FrameKind::Goal});
    }

    // Unwinds to the innermost active catch/3 whose catcher unifies with a
    // copy of the ball. Active catches are exactly the CatchExit frames on
    // the continuation of the throwing goal.
    void throw_ball(const Term& ball, std::uint32_t cont, std::uint32_t depth) {
        std::string text;
        if (sink_) text = write_term(ball);
        emit(TraceKind::Throw, throw_key_, 0, 0, depth, sink_ ? &text : nullptr);
        for (auto fi = cont; fi != kNone;) {
            const Frame fr = frames_[fi];
            if (fr.kind == FrameKind::CatchExit) {
                const CatchRecord rec = catches_[fr.aux];
                choices_.resize(rec.choice_height);
                store_.undo_to(rec.trail);
                store_.truncate(rec.heap_top);
                Cell copy = store_.put(ball);
                if (store_.unify(rec.catcher, copy, options_.occurs_check)) {
                    emit(TraceKind::Catch, catch_key_, 0, 0, rec.depth + 1, sink_ ? &text : nullptr);
                    frames_.resize(rec.frames_top);
                    catches_.resize(fr.aux);
                    cur_ = push_frame({rec.recovery, rec.node, rec.cont, rec.depth, 0, FrameKind::Goal});
                    return;
                }
                store_.truncate(rec.heap_top);
            }
            fi = fr.next;
        }
        result_.ball = ball;
        bool system = ball.is_compound("error", 2);
        finish(system ? ExitStatus::Error : ExitStatus::UncaughtException);
        if (system) result_.message = describe_error(ball);
    }

    static std::string describe_error(const Term& ball) {
        const Term& e = ball.arg(0);
        if (e.is_compound("existence_error", 2) && e.arg(0).is_atom("procedure") && e.arg(1).is_compound("/", 2) &&
            e.arg(1).arg(0).is_atom() && e.arg(1).arg(1).is_int())
            return "unknown procedure " + format_atom(e.arg(1).arg(0).name()) + "/" +
                   std::to_string(e.arg(1).arg(1).int_value());
        return "uncaught " + write_term(ball);
    }

    void backjump(Cell target, const PredKey& key, std::uint32_t depth) {
        if (target.tag == Tag::Ref) throw PendingBall{error_term(Term::atom("instantiation_error"), key)};
        if (target.tag != Tag::Int)
            throw PendingBall{error_term(Term::compound("type_error", {Term::atom("node_id"), store_.resolve(target)}), key)};
        auto id = static_cast<std::uint64_t>(target.value);
        auto it = std::find_if(choices_.rbegin(), choices_.rend(), [&](const ChoicePoint& cp) {
            return cp.kind == ChoiceKind::Clauses && cp.node == id;
        });
        if (it == choices_.rend())
            throw PendingBall{error_term(
                Term::compound("system_error", {Term::compound("stale_backjump_target", {Term::integer(target.value)})}), key)};
        emit(TraceKind::Backjump, key, id, 0, depth);
        choices_.erase(it.base(), choices_.end());
        fail();
    }

    // ---- tracing ---------------------------------------------------------

    void emit(TraceKind kind, const PredKey& key, std::uint64_t node, std::uint32_t clause, std::uint32_t depth,
              const std::string* ball = nullptr) {
        stats_.count(kind, depth);
        if (!sink_) return;
        TraceEvent e;
        e.step = ++events_;
        e.kind = kind;
        e.pred = key;
        e.node = node;
        e.clause_index = clause;
        if (ball) e.ball = *ball;
        e.depth = depth;
        sink_->record(e);
    }

    SolveOptions options_;
    TraceSink* sink_;
    std::shared_ptr<const CompiledProgram> code_;
    Bindings store_;
    std::vector<Frame> frames_;
    std::vector<ChoicePoint> choices_;
    std::vector<CatchRecord> catches_;
    std::vector<Dispatch> entries_;
    std::unordered_map<std::uint64_t, std::uint32_t> dispatch_;
    std::uint32_t cur_ = kNone;
    std::uint64_t steps_ = 0;
    std::uint64_t events_ = 0;
    std::uint64_t node_counter_ = 0;
    std::int64_t btid_counter_ = 0;
    bool done_ = false;
    SolveResult result_;
    TraceStats stats_;
    Symbol dot_ = 0;
    Symbol nil_ = 0;
    Symbol bj_ = 0;
    const PredKey catch_key_{"catch", 3};
    const PredKey throw_key_{"throw", 1};
};

}  // namespace

SolveResult solve(const Program& program, const Term& query, const SolveOptions& options, TraceSink* sink) {
    Machine m(program, options, sink);
    return m.run(query);
}

SolveResult solve(const Program& program, std::string_view query, const SolveOptions& options, TraceSink* sink) {
    return solve(program, parse_term(query, program.max_var_id() + 1), options, sink);
}

}  // namespace ldbj
