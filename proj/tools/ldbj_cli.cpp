// ldbj: run programs, apply the backjump transformations, and drive the
// SAT lab. Data goes to stdout, diagnostics to stderr.
//
// Exit codes: 0 answers found (or sat verdict printed), 1 no answers,
// 2 error / uncaught exception / limit, 3 oracle disagreement.

#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "ldbj/builtins.hpp"
#include "ldbj/engine.hpp"
#include "ldbj/reader.hpp"
#include "ldbj/satlab.hpp"
#include "ldbj/trace.hpp"
#include "ldbj/transform.hpp"
#include "ldbj/writer.hpp"

namespace {

using namespace ldbj;

constexpr int kExitAnswers = 0;
constexpr int kExitNone = 1;
constexpr int kExitError = 2;
constexpr int kExitOracle = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Program load_program(const std::string& path) {
    std::string text = read_file(path);
    try {
        return parse_program(text);
    } catch (const SyntaxError& e) {
        throw UsageError(path + ":" + e.what());
    }
}

std::set<PredKey> parse_targets(const std::vector<std::string>& texts) {
    std::set<PredKey> out;
    for (const auto& t : texts) {
        try {
            out.insert(parse_pred_key(t));
        } catch (const std::invalid_argument&) {
            throw UsageError("bad --target '" + t + "', expected name/arity");
        }
    }
    return out;
}

std::optional<Approach> parse_approach(const std::string& s) {
    if (s == "a1") return Approach::A1;
    if (s == "a1a") return Approach::A1a;
    if (s == "a2") return Approach::A2;
    return std::nullopt;
}

Program apply_transform(const Program& p, const std::string& name, const std::vector<std::string>& targets) {
    auto approach = parse_approach(name);
    if (!approach) throw UsageError("unknown --transform '" + name + "' (none, a1, a1a, a2)");
    TransformSpec spec{*approach, parse_targets(targets)};
    if (*approach != Approach::A2 && spec.targets.empty())
        throw UsageError("--transform " + name + " needs at least one --target");
    auto r = transform(p, spec);
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
    return r.program;
}

bool calls_backjump(const Program& p) {
    for (const auto& c : p.clauses())
        if (contains_functor(c.body, "backjump")) return true;
    return false;
}

EngineMode parse_mode(const std::string& s) {
    if (s == "plain") return EngineMode::Plain;
    if (s == "backjump") return EngineMode::NativeBackjump;
    throw UsageError("unknown --mode '" + s + "' (plain, backjump)");
}

struct RunConfig {
    std::string program;
    std::string query;
    std::string mode = "plain";
    std::string transform = "none";
    std::vector<std::string> targets;
    std::string trace;
    std::uint64_t max_steps = Limits{}.max_steps;
    std::uint64_t max_answers = 0;
    bool all = false;
    bool occurs_check = false;
};

void print_answer(const Answer& a) {
    if (a.bindings.empty()) {
        std::cout << "true\n";
        return;
    }
    for (const auto& [name, value] : a.bindings) std::cout << name << " = " << write_term(value) << '\n';
}

int cmd_run(const RunConfig& cfg) {
    Program program = load_program(cfg.program);
    EngineMode mode = parse_mode(cfg.mode);
    if (cfg.transform != "none") program = apply_transform(program, cfg.transform, cfg.targets);
    if (mode == EngineMode::NativeBackjump)
        program = lower_native(program);
    else if (calls_backjump(program))
        throw UsageError("program calls backjump/1; use --mode backjump or a transformation");
    if (cfg.query.empty()) throw UsageError("--query is required");

    Term query;
    try {
        query = parse_term(cfg.query, program.max_var_id() + 1);
    } catch (const SyntaxError& e) {
        throw UsageError(std::string("query:") + e.what());
    }

    SolveOptions opts;
    opts.mode = mode;
    opts.occurs_check = cfg.occurs_check;
    opts.limits.max_steps = cfg.max_steps;
    opts.limits.max_answers = cfg.max_answers ? cfg.max_answers : (cfg.all ? UINT64_MAX : 1);

    std::ofstream trace_out;
    std::optional<StreamSink> sink;
    if (!cfg.trace.empty()) {
        trace_out.open(cfg.trace, std::ios::binary);
        if (!trace_out) throw UsageError("cannot write " + cfg.trace);
        sink.emplace(trace_out);
    }
    SolveResult r = solve(program, query, opts, sink ? &*sink : nullptr);

    for (std::size_t i = 0; i < r.answers.size(); ++i) {
        if (i) std::cout << ";\n";
        print_answer(r.answers[i]);
    }
    std::cout << "status: " << to_string(r.status);
    if (r.ball) std::cout << ' ' << write_term(*r.ball);
    std::cout << '\n';
    if (!r.message.empty()) std::cerr << "error: " << r.message << '\n';

    bool failed = r.status == ExitStatus::Error || r.status == ExitStatus::UncaughtException;
    if (failed) return kExitError;
    if (!r.answers.empty()) return kExitAnswers;
    return r.status == ExitStatus::StepLimit ? kExitError : kExitNone;
}

int cmd_transform(const std::string& path, const std::string& approach, const std::vector<std::string>& targets,
                  const std::string& out_path) {
    if (approach == "none") throw UsageError("--transform is required (a1, a1a, a2)");
    Program p = apply_transform(load_program(path), approach, targets);
    std::string text = pretty_print(p);
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!(out << text)) throw UsageError("cannot write " + out_path);
    }
    return 0;
}

struct SatConfig {
    std::vector<std::string> files;
    std::vector<std::string> programs;
    std::string mode = "plain";
    std::uint64_t max_steps = Limits{}.max_steps;
    std::uint64_t seed = 1;
    int vars = 20;
    int clauses = 85;
    int len = 3;
    int count = 1;
    std::string out;
    bool no_oracle = false;
};

CorpusProgram parse_program_name(const std::string& s) {
    auto p = parse_corpus_program(s);
    if (!p || *p == CorpusProgram::P2Annotated) throw UsageError("unknown --program '" + s + "' (p1, p2, p3, p1-binary)");
    return *p;
}

std::vector<CnfInstance> sat_instances(const SatConfig& cfg) {
    std::vector<CnfInstance> out;
    for (const auto& f : cfg.files) {
        try {
            out.push_back(dimacs_import(read_file(f)));
        } catch (const DimacsError& e) {
            throw UsageError(f + ": " + e.what());
        }
    }
    if (cfg.files.empty()) {
        if (cfg.len > cfg.vars || cfg.len < 1) throw UsageError("--len must be between 1 and --vars");
        for (int i = 0; i < cfg.count; ++i)
            out.push_back(gen_cnf(cfg.vars, cfg.clauses, cfg.len, cfg.seed + static_cast<std::uint64_t>(i)));
    }
    return out;
}

int cmd_sat_solve(const SatConfig& cfg) {
    auto instances = sat_instances(cfg);
    CorpusProgram program = parse_program_name(cfg.programs.empty() ? "p3" : cfg.programs.front());
    SolveOptions opts;
    opts.mode = parse_mode(cfg.mode);
    opts.limits.max_steps = cfg.max_steps;
    int code = 0;
    for (const auto& inst : instances) {
        SatRun run = run_sat(inst, program, opts);
        std::cout << to_string(run.verdict) << '\n';
        if (run.verdict == SatVerdict::Sat) {
            std::cout << 'v';
            for (int v = 1; v <= inst.num_vars; ++v)
                if (auto val = answer_value(run.result.answers.front(), v)) std::cout << ' ' << (*val ? "" : "-") << v;
            std::cout << " 0\n";
        }
        if (run.verdict == SatVerdict::Limit || run.verdict == SatVerdict::Error) {
            if (!run.result.message.empty()) std::cerr << "error: " << run.result.message << '\n';
            code = std::max(code, kExitError);
            continue;
        }
        if (!cfg.no_oracle && inst.num_vars <= kOracleMaxVars) {
            bool sat = run.verdict == SatVerdict::Sat;
            auto oracle = brute_force(inst);
            if (sat != oracle.sat || (sat && !satisfies(inst, run.result.answers.front()))) {
                std::cerr << "oracle disagreement: engine says " << to_string(run.verdict) << ", brute force says "
                          << (oracle.sat ? "SAT" : "UNSAT") << '\n';
                code = kExitOracle;
            }
        }
    }
    return code;
}

int cmd_sat_bench(const SatConfig& cfg) {
    auto instances = sat_instances(cfg);
    std::vector<CorpusProgram> programs;
    for (const auto& p : cfg.programs.empty() ? std::vector<std::string>{"p2", "p3"} : cfg.programs)
        programs.push_back(parse_program_name(p));
    BenchOptions opts;
    opts.mode = parse_mode(cfg.mode);
    opts.max_steps = cfg.max_steps;
    opts.oracle = !cfg.no_oracle;
    opts.threads = std::max(1u, std::thread::hardware_concurrency());
    auto rows = bench(instances, programs, opts);
    std::string csv = bench_csv(rows);
    if (cfg.out.empty()) {
        std::cout << csv;
    } else {
        std::ofstream out(cfg.out, std::ios::binary);
        if (!(out << csv)) throw UsageError("cannot write " + cfg.out);
    }
    int code = 0;
    for (const auto& r : rows) {
        if (r.oracle_mismatch) {
            std::cerr << "oracle disagreement: instance " << r.instance << " program " << to_string(r.program) << '\n';
            code = kExitOracle;
        } else if (r.verdict == SatVerdict::Limit || r.verdict == SatVerdict::Error) {
            std::cerr << "instance " << r.instance << " program " << to_string(r.program) << ": " << to_string(r.verdict)
                      << '\n';
        }
    }
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Definite-clause engine with catch/throw and native backjumping"};
    app.require_subcommand(1);

    RunConfig run;
    auto* run_cmd = app.add_subcommand("run", "Solve a query against a program");
    run_cmd->add_option("program", run.program, "Program file")->required();
    run_cmd->add_option("--query,-q", run.query, "Query term")->required();
    run_cmd->add_option("--mode", run.mode, "plain or backjump")->capture_default_str();
    run_cmd->add_option("--transform", run.transform, "none, a1, a1a or a2")->capture_default_str();
    run_cmd->add_option("--target", run.targets, "Target predicate name/arity (repeatable)");
    run_cmd->add_option("--trace", run.trace, "Write an ldtrace file");
    run_cmd->add_option("--max-steps", run.max_steps, "Step limit")->capture_default_str();
    run_cmd->add_option("--max-answers", run.max_answers, "Answer limit");
    run_cmd->add_flag("--all", run.all, "Enumerate all answers");
    run_cmd->add_flag("--occurs-check", run.occurs_check, "Unify with occurs check");

    std::string tr_program, tr_approach = "none", tr_out;
    std::vector<std::string> tr_targets;
    auto* tr_cmd = app.add_subcommand("transform", "Print a transformed program");
    tr_cmd->add_option("program", tr_program, "Program file")->required();
    tr_cmd->add_option("--transform", tr_approach, "a1, a1a or a2")->required();
    tr_cmd->add_option("--target", tr_targets, "Target predicate name/arity (repeatable)");
    tr_cmd->add_option("--out", tr_out, "Output file instead of stdout");

    SatConfig sat;
    auto* sat_cmd = app.add_subcommand("sat", "SAT lab");
    sat_cmd->require_subcommand(1);
    auto add_sat_options = [&](CLI::App* cmd) {
        cmd->add_option("files", sat.files, "DIMACS CNF files; generated instances when absent");
        cmd->add_option("--program", sat.programs, "p1, p2, p3 or p1-binary (repeatable for bench)");
        cmd->add_option("--mode", sat.mode, "plain or backjump")->capture_default_str();
        cmd->add_option("--max-steps", sat.max_steps, "Step limit per run")->capture_default_str();
        cmd->add_option("--seed", sat.seed, "Generator seed")->capture_default_str();
        cmd->add_option("--vars", sat.vars, "Generated variables")->capture_default_str();
        cmd->add_option("--clauses", sat.clauses, "Generated clauses")->capture_default_str();
        cmd->add_option("--len", sat.len, "Generated clause length")->capture_default_str();
        cmd->add_option("--count", sat.count, "Generated instances (seeds seed, seed+1, ...)")->capture_default_str();
        cmd->add_flag("--no-oracle", sat.no_oracle, "Skip the brute-force cross-check");
    };
    auto* solve_cmd = sat_cmd->add_subcommand("solve", "Solve instances and print verdicts");
    add_sat_options(solve_cmd);
    auto* bench_cmd = sat_cmd->add_subcommand("bench", "Write a CSV of search statistics");
    add_sat_options(bench_cmd);
    bench_cmd->add_option("--out", sat.out, "CSV file instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitError;
    }

    try {
        if (*run_cmd) return cmd_run(run);
        if (*tr_cmd) return cmd_transform(tr_program, tr_approach, tr_targets, tr_out);
        if (*solve_cmd) return cmd_sat_solve(sat);
        if (*bench_cmd) return cmd_sat_bench(sat);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
    } catch (const TransformError& e) {
        std::cerr << "transform error: " << e.what() << '\n';
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
    }
    return kExitError;
}
