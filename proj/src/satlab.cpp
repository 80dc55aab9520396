#include "ldbj/satlab.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <chrono>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "ldbj/reader.hpp"
#include "ldbj/transform.hpp"

namespace ldbj {

namespace detail {
const std::map<std::string, std::string>& corpus_sources();
}

namespace {

std::string corpus_key(CorpusProgram p) {
    switch (p) {
    case CorpusProgram::P1: return "p1";
    case CorpusProgram::P2: return "p2";
    case CorpusProgram::P3: return "p3";
    case CorpusProgram::P1Binary: return "p1_binary";
    case CorpusProgram::P2Annotated: return "p2_annotated";
    }
    return "p1";
}

std::string var_name(int v) { return "X" + std::to_string(v); }

}  // namespace

std::string_view to_string(CorpusProgram p) {
    switch (p) {
    case CorpusProgram::P1: return "p1";
    case CorpusProgram::P2: return "p2";
    case CorpusProgram::P3: return "p3";
    case CorpusProgram::P1Binary: return "p1-binary";
    case CorpusProgram::P2Annotated: return "p2-annotated";
    }
    return "p1";
}

std::optional<CorpusProgram> parse_corpus_program(std::string_view name) {
    std::string s;
    for (char c : name) s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    std::replace(s.begin(), s.end(), '_', '-');
    for (auto p : {CorpusProgram::P1, CorpusProgram::P2, CorpusProgram::P3, CorpusProgram::P1Binary, CorpusProgram::P2Annotated})
        if (to_string(p) == s) return p;
    return std::nullopt;
}

const std::string& corpus_source(CorpusProgram p) { return detail::corpus_sources().at(corpus_key(p)); }

const Program& corpus_program(CorpusProgram p) {
    static const std::map<CorpusProgram, Program> programs = [] {
        std::map<CorpusProgram, Program> m;
        for (auto q : {CorpusProgram::P1, CorpusProgram::P2, CorpusProgram::P3, CorpusProgram::P1Binary, CorpusProgram::P2Annotated})
            m.emplace(q, parse_program(corpus_source(q)));
        return m;
    }();
    return programs.at(p);
}

const std::vector<BinaryTestProgram>& binary_test_programs() {
    static const std::vector<BinaryTestProgram> programs{
        {"colouring", {"try", 6}},
        {"subset_sum", {"pick", 5}},
        {"tree_jump", {"node", 5}},
    };
    return programs;
}

const std::string& binary_test_source(std::string_view name) {
    return detail::corpus_sources().at("binary/" + std::string(name));
}

const Program& runnable_program(CorpusProgram p, EngineMode mode) {
    static std::mutex mu;
    static std::map<std::pair<CorpusProgram, EngineMode>, Program> cache;
    std::lock_guard lock(mu);
    auto key = std::make_pair(p, mode);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    Program out;
    switch (p) {
    case CorpusProgram::P1Binary:
        out = mode == EngineMode::NativeBackjump ? lower_native(corpus_program(p))
                                                 : transform_approach1(corpus_program(p), {kP1BinaryTarget}).program;
        break;
    case CorpusProgram::P2Annotated:
        out = transform_approach2(corpus_program(p)).program;
        break;
    default:
        out = corpus_program(p);
    }
    return cache.emplace(key, std::move(out)).first->second;
}

Term cnf_term(const CnfInstance& c, std::int64_t first_var_id) {
    std::vector<Term> vars;
    for (int v = 1; v <= c.num_vars; ++v) vars.push_back(Term::var(first_var_id + v - 1, var_name(v)));
    std::vector<Term> clauses;
    for (const auto& cl : c.clauses) {
        std::vector<Term> pairs;
        for (const auto& lit : cl)
            pairs.push_back(Term::compound("-", {Term::atom(lit.positive ? "true" : "false"), vars.at(lit.var - 1)}));
        clauses.push_back(make_list(pairs));
    }
    return make_list(clauses);
}

Term to_query(const CnfInstance& c, CorpusProgram p, std::int64_t first_var_id) {
    Term sat = cnf_term(c, first_var_id);
    if (p == CorpusProgram::P1) return Term::compound("sat_cnf", {sat});
    return Term::compound("sat_cnf", {sat, Term::integer(0)});
}

OracleResult brute_force(const CnfInstance& c) {
    const int n = c.num_vars;
    if (n > kOracleMaxVars) throw std::invalid_argument("brute_force refuses more than 26 variables");
    // Bit i-1 of an assignment is set when variable i is false.
    std::vector<std::pair<std::uint32_t, std::uint32_t>> masks;  // (true-literal vars, false-literal vars)
    for (const auto& cl : c.clauses) {
        std::uint32_t pos = 0, neg = 0;
        for (const auto& lit : cl) (lit.positive ? pos : neg) |= 1u << (lit.var - 1);
        masks.emplace_back(pos, neg);
    }
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t k = 0; k < total; ++k) {
        // Lexicographic over x1..xn with x1 most significant.
        std::uint32_t falses = 0;
        for (int i = 1; i <= n; ++i)
            if ((k >> (n - i)) & 1) falses |= 1u << (i - 1);
        bool ok = true;
        for (const auto& [pos, neg] : masks)
            if (!((pos & ~falses) | (neg & falses))) {
                ok = false;
                break;
            }
        if (!ok) continue;
        OracleResult r;
        r.sat = true;
        r.model.assign(n + 1, false);
        for (int i = 1; i <= n; ++i) r.model[i] = !((falses >> (i - 1)) & 1);
        return r;
    }
    return {};
}

CnfInstance gen_cnf(int num_vars, int num_clauses, int clause_len, std::uint64_t seed) {
    if (clause_len > num_vars || clause_len < 0 || num_clauses < 0)
        throw std::invalid_argument("gen_cnf needs 0 <= clause_len <= num_vars");
    std::mt19937_64 rng(seed);
    // Unbiased draw in [0, n); the standard distributions are not portable.
    auto below = [&](std::uint64_t n) {
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t r;
        do r = rng();
        while (r >= limit);
        return r % n;
    };
    CnfInstance c;
    c.num_vars = num_vars;
    std::vector<int> pool(num_vars);
    for (int i = 0; i < num_clauses; ++i) {
        for (int v = 0; v < num_vars; ++v) pool[v] = v + 1;
        std::vector<Literal> clause;
        for (int j = 0; j < clause_len; ++j) {
            auto pick = j + static_cast<int>(below(static_cast<std::uint64_t>(num_vars - j)));
            std::swap(pool[j], pool[pick]);
            clause.push_back({below(2) == 0, pool[j]});
        }
        c.clauses.push_back(std::move(clause));
    }
    return c;
}

CnfInstance dimacs_import(std::string_view text) {
    CnfInstance c;
    bool header = false;
    long declared = 0;
    std::vector<Literal> pending;
    bool open = false;
    int line_no = 0;
    int open_line = 0;  // where the unterminated clause last had a literal
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        std::istringstream in{std::string(line)};
        std::string first;
        if (!(in >> first)) continue;
        if (first == "c") continue;
        if (first == "%") break;
        if (first == "p") {
            std::string fmt, extra;
            long v = -1, n = -1;
            if (header) throw DimacsError(line_no, "duplicate problem line");
            if (!(in >> fmt >> v >> n) || fmt != "cnf" || v < 0 || n < 0 || (in >> extra))
                throw DimacsError(line_no, "malformed problem line, expected 'p cnf <vars> <clauses>'");
            if (v > 1'000'000) throw DimacsError(line_no, "too many variables");
            header = true;
            c.num_vars = static_cast<int>(v);
            declared = n;
            continue;
        }
        if (!header) throw DimacsError(line_no, "clause before the problem line");
        std::string tok = first;
        do {
            long lit = 0;
            auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), lit);
            if (ec != std::errc() || ptr != tok.data() + tok.size())
                throw DimacsError(line_no, "expected an integer literal, got '" + tok + "'");
            if (lit == 0) {
                c.clauses.push_back(std::move(pending));
                pending.clear();
                open = false;
                continue;
            }
            long var = lit < 0 ? -lit : lit;
            if (var > c.num_vars)
                throw DimacsError(line_no, "literal " + tok + " out of range 1.." + std::to_string(c.num_vars));
            pending.push_back({lit > 0, static_cast<int>(var)});
            open = true;
            open_line = line_no;
        } while (in >> tok);
    }
    if (!header) throw DimacsError(line_no, "missing problem line");
    if (open) throw DimacsError(open_line, "last clause is missing its 0 terminator");
    if (static_cast<long>(c.clauses.size()) != declared)
        throw DimacsError(line_no, "problem line declares " + std::to_string(declared) + " clauses, found " +
                                       std::to_string(c.clauses.size()));
    return c;
}

std::string dimacs_export(const CnfInstance& c) {
    std::ostringstream out;
    out << "p cnf " << c.num_vars << ' ' << c.clauses.size() << '\n';
    for (const auto& cl : c.clauses) {
        for (const auto& lit : cl) out << (lit.positive ? "" : "-") << lit.var << ' ';
        out << "0\n";
    }
    return out.str();
}

std::optional<bool> answer_value(const Answer& a, int var) {
    const Term* t = a.find(var_name(var));
    if (!t || t->is_var()) return std::nullopt;
    Term pol = *t;
    while (pol.is_compound(",", 2)) pol = pol.arg(1);
    if (pol.is_atom("true")) return true;
    if (pol.is_atom("false")) return false;
    return std::nullopt;
}

bool satisfies(const CnfInstance& c, const Answer& a) {
    for (const auto& cl : c.clauses) {
        bool ok = std::any_of(cl.begin(), cl.end(), [&](const Literal& lit) {
            auto v = answer_value(a, lit.var);
            return v && *v == lit.positive;
        });
        if (!ok) return false;
    }
    return true;
}

namespace {

// The query's clause list with the answer substituted in.
std::vector<std::vector<Term>> instantiate(const CnfInstance& c, const Answer& a) {
    std::vector<std::vector<Term>> out;
    for (const auto& cl : c.clauses) {
        std::vector<Term> pairs;
        for (const auto& lit : cl) {
            const Term* v = a.find(var_name(lit.var));
            Term value = v ? *v : Term::var(-lit.var, var_name(lit.var));
            pairs.push_back(Term::compound("-", {Term::atom(lit.positive ? "true" : "false"), value}));
        }
        out.push_back(std::move(pairs));
    }
    return out;
}

}  // namespace

bool valid_plain_model(const CnfInstance& c, const Answer& a) {
    for (const auto& pairs : instantiate(c, a))
        if (std::none_of(pairs.begin(), pairs.end(), [](const Term& p) { return p.arg(0) == p.arg(1); })) return false;
    return true;
}

bool valid_numbered_model(const CnfInstance& c, const Answer& a, std::string* why) {
    auto fail = [&](std::string msg) {
        if (why) *why = std::move(msg);
        return false;
    };
    for (std::size_t i = 0; i < c.clauses.size(); ++i) {
        auto pairs = instantiate(c, a)[i];
        bool ok = std::any_of(pairs.begin(), pairs.end(), [](const Term& p) {
            const Term& v = p.arg(1);
            return v.is_compound(",", 2) && v.arg(0).is_int() && v.arg(1) == p.arg(0);
        });
        if (!ok) return fail("clause " + std::to_string(i + 1) + " has no pair lv-(n,lv)");
    }
    std::vector<std::int64_t> numbers;
    for (int v = 1; v <= c.num_vars; ++v) {
        const Term* t = a.find(var_name(v));
        if (!t || t->is_var()) continue;
        if (!t->is_compound(",", 2) || !t->arg(0).is_int()) return fail(var_name(v) + " is not bound to (n,lv)");
        numbers.push_back(t->arg(0).int_value());
    }
    std::sort(numbers.begin(), numbers.end());
    for (std::size_t i = 0; i < numbers.size(); ++i)
        if (numbers[i] != static_cast<std::int64_t>(i + 1))
            return fail("variable numbers are not exactly 1.." + std::to_string(numbers.size()));
    return true;
}

std::string_view to_string(SatVerdict v) {
    switch (v) {
    case SatVerdict::Sat: return "SAT";
    case SatVerdict::Unsat: return "UNSAT";
    case SatVerdict::Limit: return "LIMIT";
    case SatVerdict::Error: return "ERROR";
    }
    return "ERROR";
}

SatRun run_sat(const CnfInstance& c, CorpusProgram p, const SolveOptions& options, TraceSink* sink) {
    const Program& program = runnable_program(p, options.mode);
    SolveOptions opts = options;
    opts.limits.max_answers = 1;
    SatRun run;
    run.result = solve(program, to_query(c, p, program.max_var_id() + 1), opts, sink);
    if (!run.result.answers.empty())
        run.verdict = SatVerdict::Sat;
    else if (run.result.status == ExitStatus::Exhausted)
        run.verdict = SatVerdict::Unsat;
    else if (run.result.status == ExitStatus::StepLimit)
        run.verdict = SatVerdict::Limit;
    else
        run.verdict = SatVerdict::Error;
    return run;
}

std::vector<BenchRow> bench(const std::vector<CnfInstance>& instances, const std::vector<CorpusProgram>& programs,
                            const BenchOptions& options) {
    std::vector<BenchRow> rows(instances.size() * programs.size());
    SolveOptions solve_opts;
    solve_opts.mode = options.mode;
    solve_opts.limits.max_steps = options.max_steps;
    for (auto p : programs) runnable_program(p, options.mode);  // build outside the workers

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i; (i = next++) < instances.size();) {
            const auto& inst = instances[i];
            std::optional<OracleResult> oracle;
            if (options.oracle && inst.num_vars <= kOracleMaxVars) oracle = brute_force(inst);
            for (std::size_t j = 0; j < programs.size(); ++j) {
                auto t0 = std::chrono::steady_clock::now();
                SatRun run = run_sat(inst, programs[j], solve_opts);
                auto t1 = std::chrono::steady_clock::now();
                BenchRow& row = rows[i * programs.size() + j];
                row.instance = i + 1;
                row.program = programs[j];
                row.verdict = run.verdict;
                row.clause_tries = run.result.stats.clause_tries;
                row.backjumps = run.result.stats.backjumps + run.result.stats.catches;
                row.steps = run.result.steps;
                if (options.record_time)
                    row.micros = static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::microseconds>(t1 - t0).count());
                if (oracle && (run.verdict == SatVerdict::Sat || run.verdict == SatVerdict::Unsat)) {
                    bool sat = run.verdict == SatVerdict::Sat;
                    row.oracle_mismatch = sat != oracle->sat || (sat && !satisfies(inst, run.result.answers.front()));
                }
            }
        }
    };
    unsigned n = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(instances.size())));
    if (n == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < n; ++t) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
    std::ostringstream out;
    out << kBenchHeader << '\n';
    for (const auto& r : rows)
        out << r.instance << ',' << to_string(r.program) << ',' << to_string(r.verdict) << ',' << r.clause_tries << ','
            << r.backjumps << ',' << r.steps << ',' << r.micros << '\n';
    return out.str();
}

}  // namespace ldbj
