#include "ldbj/transform.hpp"

#include <functional>
#include <optional>
#include <sstream>

#include "ldbj/builtins.hpp"
#include "ldbj/writer.hpp"

namespace ldbj {

std::string_view to_string(Approach a) {
    switch (a) {
    case Approach::A1: return "a1";
    case Approach::A1a: return "a1a";
    case Approach::A2: return "a2";
    }
    return "a1";
}

namespace {

class FreshVars {
public:
    explicit FreshVars(const Program& p) : next_(p.max_var_id() + 1) {}
    Term operator()(std::string hint) { return Term::var(next_++, std::move(hint)); }

private:
    std::int64_t next_;
};

bool is_control(const Term& g) {
    return g.is_compound(",", 2) || g.is_compound(";", 2) || g.is_compound("->", 2);
}

// Visits every goal position: control constructs are descended, as are the
// goal and recovery of catch/3.
void for_each_goal(const Term& g, const std::function<void(const Term&)>& fn) {
    if (is_control(g)) {
        for_each_goal(g.arg(0), fn);
        for_each_goal(g.arg(1), fn);
        return;
    }
    if (g.is_compound("catch", 3)) {
        for_each_goal(g.arg(0), fn);
        for_each_goal(g.arg(2), fn);
    }
    fn(g);
}

// Rebuilds a goal, replacing each leaf by fn(leaf); nullopt deletes the
// leaf (a deleted conjunct vanishes, elsewhere it becomes true).
using GoalMap = std::function<std::optional<Term>(const Term&)>;

std::optional<Term> map_goals_opt(const Term& g, const GoalMap& fn) {
    if (g.is_compound(",", 2)) {
        auto a = map_goals_opt(g.arg(0), fn);
        auto b = map_goals_opt(g.arg(1), fn);
        if (!a) return b;
        if (!b) return a;
        return Term::compound(",", {*a, *b});
    }
    if (is_control(g) || g.is_compound("catch", 3)) {
        auto a = map_goals_opt(g.arg(0), fn).value_or(Term::atom("true"));
        if (g.is_compound("catch", 3))
            return Term::compound("catch", {a, g.arg(1), map_goals_opt(g.arg(2), fn).value_or(Term::atom("true"))});
        return Term::compound(g.name(), {a, map_goals_opt(g.arg(1), fn).value_or(Term::atom("true"))});
    }
    return fn(g);
}

Term map_goals(const Term& g, const GoalMap& fn) { return map_goals_opt(g, fn).value_or(Term::atom("true")); }

bool is_marker(const Term& g, std::string_view name) { return g.is_compound(name, 1); }

std::size_t count_goals(const Term& body, const std::function<bool(const Term&)>& pred) {
    std::size_t n = 0;
    for_each_goal(body, [&](const Term& g) { n += pred(g) ? 1 : 0; });
    return n;
}

Term backjumps_to_throws(const Term& body) {
    return map_goals(body, [](const Term& g) -> std::optional<Term> {
        if (g.is_compound("backjump", 1)) return Term::compound("throw", {g.arg(0)});
        return g;
    });
}

Term head_tuple(const Term& head) {
    if (head.is_atom()) return head;
    return ldbj::make_tuple({head.args().begin(), head.args().end()});
}

Term conj(const Term& a, const Term& b) {
    if (a.is_atom("true")) return b;
    if (b.is_atom("true")) return a;
    return Term::compound(",", {a, b});
}

Term catch_fail(const Term& goal, const Term& id) { return Term::compound("catch", {goal, id, Term::atom("fail")}); }

void check_targets(const Program& p, const std::set<PredKey>& targets) {
    if (targets.empty()) throw TransformError(0, "no target predicates given");
    for (const auto& t : targets)
        if (!p.defines(t)) throw TransformError(0, "target " + t.str() + " is not defined");
}

void reject_transformed(const Program& p, const std::set<PredKey>& targets) {
    for (std::size_t i = 0; i < p.clauses().size(); ++i) {
        const auto& c = p.clauses()[i];
        if (contains_functor(c.head, kBacktrackIdFunctor) || contains_functor(c.body, kBacktrackIdFunctor))
            throw TransformError(i + 1, "program already transformed: reserved functor '$bj' present");
        if (targets.contains(c.key()) && count_goals(c.body, [](const Term& g) { return g.is_compound("btid", 2); }))
            throw TransformError(i + 1, "program already transformed: target " + c.key().str() + " calls btid/2");
    }
}

void reject_marker(const Clause& c, std::size_t pos, std::string_view marker, const std::string& why) {
    if (count_goals(c.body, [&](const Term& g) { return is_marker(g, marker); }))
        throw TransformError(pos, "marker " + format_atom(std::string(marker)) + "/1 " + why);
}

// Takes the '$my_id'(V) marker out of a target clause. Returns the clause
// without it and V, or nullopt when the clause has no marker.
std::pair<Clause, std::optional<Term>> take_identifier(const Clause& c, std::size_t pos) {
    std::optional<Term> id;
    std::size_t n = count_goals(c.body, [](const Term& g) { return is_marker(g, kMyIdMarker); });
    if (n > 1) throw TransformError(pos, "marker '$my_id'/1 appears more than once");
    if (n == 0) return {c, std::nullopt};
    Term body = map_goals(c.body, [&](const Term& g) -> std::optional<Term> {
        if (!is_marker(g, kMyIdMarker)) return g;
        if (!g.arg(0).is_var()) throw TransformError(pos, "argument of '$my_id'/1 must be a variable");
        id = g.arg(0);
        return std::nullopt;
    });
    return {Clause{c.head, body}, id};
}

void warn_unmarked(std::vector<std::string>& warnings, const Clause& c, std::size_t pos) {
    warnings.push_back("clause " + std::to_string(pos) + " of " + c.key().str() +
                       " has no '$my_id' marker; its identifier is not used");
}

// Extends a2b so that substitute(a, a2b) == b, as a bijection.
bool variant_map(const Term& a, const Term& b, std::map<std::int64_t, Term>& a2b, std::map<std::int64_t, std::int64_t>& b2a) {
    if (a.is_var() || b.is_var()) {
        if (!a.is_var() || !b.is_var()) return false;
        auto [ia, fresh_a] = a2b.emplace(a.var_id(), b);
        auto [ib, fresh_b] = b2a.emplace(b.var_id(), a.var_id());
        return ia->second.var_id() == b.var_id() && ib->second == a.var_id();
    }
    if (a.kind() != b.kind()) return false;
    if (a.is_int()) return a.int_value() == b.int_value();
    if (a.name() != b.name() || a.arity() != b.arity()) return false;
    for (std::size_t i = 0; i < a.arity(); ++i)
        if (!variant_map(a.arg(i), b.arg(i), a2b, b2a)) return false;
    return true;
}

Clause merge_procedure(const std::vector<std::pair<Clause, std::size_t>>& clauses, FreshVars& fresh,
                       std::vector<std::string>& warnings) {
    const Term& first = clauses.front().first.head;
    const std::size_t k = first.arity();
    const std::size_t n = clauses.size();
    Term id = fresh("Id");

    std::vector<Clause> renamed;
    for (const auto& [c, pos] : clauses) {
        auto [stripped, v] = take_identifier(c, pos);
        if (!v) {
            warn_unmarked(warnings, c, pos);
            renamed.push_back(stripped);
            continue;
        }
        std::map<std::int64_t, Term> s{{v->var_id(), id}};
        renamed.push_back({substitute(stripped.head, s), substitute(stripped.body, s)});
    }

    bool shared = n >= 2;
    for (std::size_t j = 1; shared && j < n; ++j) shared = is_variant(renamed[j].head, renamed[0].head);

    Term head = renamed[0].head;
    std::vector<Term> goals;
    if (shared) {
        for (std::size_t j = 0; j < n; ++j) {
            std::map<std::int64_t, Term> a2b;
            std::map<std::int64_t, std::int64_t> b2a;
            variant_map(renamed[j].head, head, a2b, b2a);
            goals.push_back(backjumps_to_throws(substitute(renamed[j].body, a2b)));
        }
    } else {
        std::vector<Term> xs;
        for (std::size_t i = 0; i < k; ++i) xs.push_back(fresh("X" + std::to_string(i + 1)));
        head = k ? Term::compound(first.name(), xs) : first;
        for (const auto& c : renamed) {
            Term body = backjumps_to_throws(c.body);
            if (k == 0) {
                goals.push_back(body);
                continue;
            }
            Term eq = Term::compound("=", {ldbj::make_tuple(xs), head_tuple(c.head)});
            goals.push_back(conj(eq, body));
        }
    }

    Term chain = catch_fail(goals.back(), id);
    for (std::size_t j = n - 1; j-- > 0;) {
        Term attempt = Term::compound(";", {goals[j], Term::compound("throw", {id})});
        chain = Term::compound("catch", {attempt, id, chain});
    }
    Term body = Term::compound(",", {Term::compound("btid", {head_tuple(head), id}), chain});
    return {head, body};
}

void copy_directives(const Program& from, Program& to) {
    for (const auto& d : from.directives()) to.add_directive(d);
}

// Right-nested conjunction spine; left-nested groups stay as one goal so
// printing does not change the term.
std::vector<Term> conjunct_spine(Term body) {
    std::vector<Term> out;
    while (body.is_compound(",", 2)) {
        out.push_back(body.arg(0));
        body = body.arg(1);
    }
    out.push_back(body);
    return out;
}

}  // namespace

TransformResult transform(const Program& p, const TransformSpec& spec) {
    switch (spec.approach) {
    case Approach::A1: return transform_approach1(p, spec.targets);
    case Approach::A1a: return transform_approach1a(p, spec.targets);
    case Approach::A2: return transform_approach2(p);
    }
    return transform_approach1(p, spec.targets);
}

TransformResult transform_approach1(const Program& p, const std::set<PredKey>& targets) {
    check_targets(p, targets);
    reject_transformed(p, targets);
    FreshVars fresh(p);
    TransformResult r;
    for (std::size_t i = 0; i < p.clauses().size(); ++i) {
        const Clause& c = p.clauses()[i];
        if (!targets.contains(c.key())) {
            reject_marker(c, i + 1, kMyIdMarker, "outside a target predicate");
            r.program.add_clause({c.head, backjumps_to_throws(c.body)});
            continue;
        }
        auto [stripped, v] = take_identifier(c, i + 1);
        if (!v) warn_unmarked(r.warnings, c, i + 1);
        Term id = v ? *v : fresh("Id");
        Term body = Term::compound(",", {Term::compound("btid", {head_tuple(c.head), id}),
                                         catch_fail(backjumps_to_throws(stripped.body), id)});
        r.program.add_clause({c.head, body});
    }
    copy_directives(p, r.program);
    return r;
}

TransformResult transform_approach1a(const Program& p, const std::set<PredKey>& targets) {
    check_targets(p, targets);
    reject_transformed(p, targets);
    FreshVars fresh(p);
    TransformResult r;
    std::set<PredKey> done;
    for (std::size_t i = 0; i < p.clauses().size(); ++i) {
        const Clause& c = p.clauses()[i];
        PredKey key = c.key();
        if (!targets.contains(key)) {
            reject_marker(c, i + 1, kMyIdMarker, "outside a target predicate");
            r.program.add_clause({c.head, backjumps_to_throws(c.body)});
            continue;
        }
        if (!done.insert(key).second) continue;
        std::vector<std::pair<Clause, std::size_t>> procedure;
        for (auto pos : p.index().at(key)) procedure.emplace_back(p.clauses()[pos], pos + 1);
        r.program.add_clause(merge_procedure(procedure, fresh, r.warnings));
    }
    copy_directives(p, r.program);
    return r;
}

TransformResult transform_approach2(const Program& p) {
    FreshVars fresh(p);
    TransformResult r;
    bool any = false;
    for (std::size_t i = 0; i < p.clauses().size(); ++i) {
        const Clause& c = p.clauses()[i];
        const std::size_t pos = i + 1;
        reject_marker(c, pos, kMyIdMarker, "is not used by approach 2");
        auto marked = [](const Term& g) { return is_marker(g, kCatchRestMarker); };
        std::size_t total = count_goals(c.body, marked);
        if (total == 0) {
            r.program.add_clause(c);
            continue;
        }
        std::vector<Term> goals = conjunct_spine(c.body);
        std::size_t top = 0, at = 0;
        for (std::size_t j = 0; j < goals.size(); ++j)
            if (marked(goals[j])) {
                ++top;
                at = j;
            }
        if (top != total)
            throw TransformError(pos, "marker '$catch_rest'/1 must be a top-level conjunct, not nested in a control construct");
        if (top > 1) throw TransformError(pos, "marker '$catch_rest'/1 appears more than once");
        any = true;

        std::vector<Term> out(goals.begin(), goals.begin() + static_cast<std::ptrdiff_t>(at));
        Term rest = make_conjunction({goals.begin() + static_cast<std::ptrdiff_t>(at) + 1, goals.end()});
        Term id = goals[at].arg(0);
        if (id.is_atom("fresh")) {
            id = fresh("Id");
            out.push_back(Term::compound("btid", {head_tuple(c.head), id}));
        }
        out.push_back(catch_fail(rest, id));
        r.program.add_clause({c.head, make_conjunction(out)});
    }
    if (!any) throw TransformError(0, "approach 2 needs at least one '$catch_rest'/1 marker");
    copy_directives(p, r.program);
    return r;
}

Program lower_native(const Program& p) {
    Program out;
    for (const auto& c : p.clauses()) {
        Term body = map_goals(c.body, [](const Term& g) -> std::optional<Term> {
            if (is_marker(g, kMyIdMarker)) return Term::compound("parent_choice", {g.arg(0)});
            if (is_marker(g, kCatchRestMarker)) return std::nullopt;
            return g;
        });
        out.add_clause({c.head, body});
    }
    copy_directives(p, out);
    return out;
}

std::string pretty_print(const Program& p) {
    std::ostringstream out;
    for (const auto& d : p.directives()) out << ":- " << write_term(d, 1199) << ".\n";
    if (!p.directives().empty()) out << '\n';
    std::optional<PredKey> last;
    for (const auto& c : p.clauses()) {
        if (last && *last != c.key()) out << '\n';
        last = c.key();
        auto names = readable_names({c.head, c.body});
        VarNamer namer = [&](const Term& v) { return names.at(v.var_id()); };
        out << write_term(c.head, 1199, namer);
        if (!c.is_fact()) {
            out << " :-";
            auto goals = conjunct_spine(c.body);
            for (std::size_t i = 0; i < goals.size(); ++i)
                out << "\n    " << write_term(goals[i], 999, namer) << (i + 1 < goals.size() ? "," : "");
        }
        out << ".\n";
    }
    return out.str();
}

}  // namespace ldbj
