#include "binary_queries.hpp"

#include <algorithm>
#include <map>
#include <random>

#include "catch_cases.hpp"
#include "ldbj/reader.hpp"
#include "ldbj/satlab.hpp"
#include "ldbj/writer.hpp"

namespace ldbj::testing {

namespace {

// Portable bounded draw; the standard distributions vary by library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}
    int range(int lo, int hi) {  // inclusive
        auto n = static_cast<std::uint64_t>(hi - lo + 1);
        std::uint64_t limit = UINT64_MAX - UINT64_MAX % n, r;
        do r = gen_();
        while (r >= limit);
        return lo + static_cast<int>(r % n);
    }
    bool coin() { return range(0, 1) == 1; }

private:
    std::mt19937_64 gen_;
};

Term ints(const std::vector<int>& xs) {
    std::vector<Term> items;
    for (int x : xs) items.push_back(Term::integer(x));
    return make_list(items);
}

Term sat_query(Rng& rng) {
    int vars = rng.range(2, 6);
    CnfInstance c = gen_cnf(vars, rng.range(2, 9), rng.range(1, std::min(3, vars)), static_cast<std::uint64_t>(rng.range(0, 1 << 30)));
    return to_query(c, CorpusProgram::P1Binary);
}

Term colouring_query(Rng& rng) {
    int n = rng.range(2, 7), k = rng.range(2, 3);
    std::vector<Term> colours, vertices;
    for (int i = 0; i < n; ++i) {
        std::vector<Term> earlier;
        for (int j = 0; j < i; ++j)
            if (rng.range(0, 99) < 55) earlier.push_back(colours[j]);
        colours.push_back(Term::var(i + 1, "C" + std::to_string(i + 1)));
        vertices.push_back(Term::compound("v", {colours.back(), make_list(earlier)}));
    }
    std::vector<int> palette;
    for (int c = 1; c <= k; ++c) palette.push_back(c);
    return Term::compound("colour", {make_list(vertices), ints(palette), Term::integer(0)});
}

Term subset_sum_query(Rng& rng) {
    std::vector<int> xs(rng.range(2, 7));
    for (auto& x : xs) x = rng.range(1, 9);
    std::sort(xs.begin(), xs.end());
    return Term::compound("pick", {ints(xs), Term::integer(0), Term::integer(rng.range(1, 20)), Term::atom("none"),
                                   Term::var(1, "Taken")});
}

Term tree_jump_query(Rng& rng) {
    int depth = rng.range(1, 4);
    std::vector<Term> table;
    for (int i = 0; i < (1 << depth); ++i) {
        int roll = rng.range(0, 9);
        if (roll < 2)
            table.push_back(Term::atom("ok"));
        else if (roll < 5)
            table.push_back(Term::atom("stop"));
        else
            table.push_back(Term::compound("jump", {Term::integer(rng.range(0, depth - 1))}));
    }
    return Term::compound("node", {Term::integer(depth), Term::integer(0), Term::atom("[]"), make_list(table),
                                   Term::var(1, "Leaf")});
}

}  // namespace

std::vector<std::string> binary_program_names() {
    std::vector<std::string> out{"p1-binary"};
    for (const auto& b : binary_test_programs()) out.push_back(b.name);
    return out;
}

const Program& annotated_binary(const std::string& name) {
    static const std::map<std::string, Program> programs = [] {
        std::map<std::string, Program> m;
        m.emplace("p1-binary", corpus_program(CorpusProgram::P1Binary));
        for (const auto& b : binary_test_programs()) m.emplace(b.name, parse_program(binary_test_source(b.name)));
        return m;
    }();
    return programs.at(name);
}

PredKey binary_target(const std::string& name) {
    if (name == "p1-binary") return kP1BinaryTarget;
    for (const auto& b : binary_test_programs())
        if (b.name == name) return b.target;
    throw std::invalid_argument("no binary program " + name);
}

std::vector<BinaryCase> random_binary_cases(std::uint64_t seed, std::size_t per_program) {
    Rng rng(seed);
    std::vector<BinaryCase> out;
    for (const auto& name : binary_program_names()) {
        for (std::size_t i = 0; i < per_program; ++i) {
            Term q = name == "p1-binary"    ? sat_query(rng)
                     : name == "colouring"  ? colouring_query(rng)
                     : name == "subset_sum" ? subset_sum_query(rng)
                                            : tree_jump_query(rng);
            out.push_back({name, &annotated_binary(name), binary_target(name), q});
        }
    }
    return out;
}

Term erase_identifiers(const Term& t) {
    if (!t.is_compound()) return t;
    if (t.is_compound("$bj", 2)) return Term::atom("id");
    std::vector<Term> args;
    for (const auto& a : t.args()) args.push_back(erase_identifiers(a));
    // (K, Id, Pol) values of p1-binary and c(P, K, Id) values of colouring.
    if (t.is_compound(",", 2) && args[1].is_compound(",", 2) && args[1].arg(1).is_atom() && args[0].is_int())
        args[1] = Term::compound(",", {Term::atom("id"), args[1].arg(1)});
    if (t.is_compound("c", 3)) args[2] = Term::atom("id");
    return Term::compound(t.name(), args);
}

Recorded run_recorded(const Program& p, const Term& query, EngineMode mode, const std::set<PredKey>& drop,
                      std::uint64_t max_steps) {
    SolveOptions opts;
    opts.mode = mode;
    opts.limits.max_steps = max_steps;
    VectorSink sink;
    SolveResult r = solve(p, query, opts, &sink);
    Recorded out;
    out.status = r.status;
    for (auto& a : r.answers) {
        for (auto& [name, value] : a.bindings) value = erase_identifiers(value);
        out.answers.push_back(render_answer(a));
    }
    if (r.status == ExitStatus::Error || r.status == ExitStatus::UncaughtException)
        out.answers.push_back("<" + std::string(to_string(r.status)) + (r.ball ? " " + write_term(*r.ball) : "") + ">");
    out.tries = clause_tries_only(project_user(sink.events(), drop));
    out.trace_text = format_trace(sink.events());
    return out;
}

std::string compare_recorded(const Recorded& a, const Recorded& b) {
    if (a.status != b.status)
        return "status " + std::string(to_string(a.status)) + " vs " + std::string(to_string(b.status));
    if (a.answers != b.answers) {
        for (std::size_t i = 0; i < std::max(a.answers.size(), b.answers.size()); ++i) {
            std::string x = i < a.answers.size() ? a.answers[i] : "<none>";
            std::string y = i < b.answers.size() ? b.answers[i] : "<none>";
            if (x != y) return "answer " + std::to_string(i + 1) + ": " + x + " vs " + y;
        }
    }
    if (auto d = compare(a.tries, b.tries))
        return "ClauseTry divergence at position " + std::to_string(d->index) + " (steps " + std::to_string(d->step_a) +
               " / " + std::to_string(d->step_b) + ")";
    return {};
}

}  // namespace ldbj::testing
