#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "ldbj/engine.hpp"
#include "ldbj/reader.hpp"
#include "ldbj/satlab.hpp"
#include "ldbj/transform.hpp"
#include "ldbj/writer.hpp"

namespace py = pybind11;
using namespace ldbj;

namespace {

// CNF instances cross the boundary as (num_vars, [[DIMACS literal, ...], ...]).
using PyCnf = std::pair<int, std::vector<std::vector<int>>>;

CnfInstance from_py(const PyCnf& c) {
    CnfInstance out;
    out.num_vars = c.first;
    for (const auto& cl : c.second) {
        std::vector<Literal> lits;
        for (int l : cl) {
            if (l == 0 || std::abs(l) > c.first) throw py::value_error("literal out of range: " + std::to_string(l));
            lits.push_back({l > 0, std::abs(l)});
        }
        out.clauses.push_back(std::move(lits));
    }
    return out;
}

PyCnf to_py(const CnfInstance& c) {
    PyCnf out{c.num_vars, {}};
    for (const auto& cl : c.clauses) {
        std::vector<int> lits;
        for (const auto& l : cl) lits.push_back(l.positive ? l.var : -l.var);
        out.second.push_back(std::move(lits));
    }
    return out;
}

EngineMode parse_mode(const std::string& m) {
    if (m == "plain") return EngineMode::Plain;
    if (m == "backjump") return EngineMode::NativeBackjump;
    throw py::value_error("mode must be 'plain' or 'backjump'");
}

CorpusProgram parse_program_name(const std::string& name) {
    auto p = parse_corpus_program(name);
    if (!p) throw py::value_error("unknown corpus program: " + name);
    return *p;
}

py::dict stats_dict(const TraceStats& s) {
    py::dict d;
    d["calls"] = s.calls;
    d["exits"] = s.exits;
    d["redos"] = s.redos;
    d["fails"] = s.fails;
    d["clause_tries"] = s.clause_tries;
    d["throws"] = s.throws;
    d["catches"] = s.catches;
    d["backjumps"] = s.backjumps;
    d["max_depth"] = s.max_depth;
    return d;
}

py::dict result_dict(const SolveResult& r, const std::string* trace) {
    py::list answers;
    for (const auto& a : r.answers) {
        py::dict d;
        for (const auto& [name, value] : a.bindings) d[py::str(name)] = write_term(value);
        answers.append(d);
    }
    py::dict d;
    d["answers"] = answers;
    d["status"] = std::string(to_string(r.status));
    d["ball"] = r.ball ? py::object(py::str(write_term(*r.ball))) : py::object(py::none());
    d["message"] = r.message;
    d["steps"] = r.steps;
    d["stats"] = stats_dict(r.stats);
    d["trace"] = trace ? py::object(py::str(*trace)) : py::object(py::none());
    return d;
}

py::dict solve_text(const std::string& program, const std::string& query, const std::string& mode,
                    std::uint64_t max_steps, std::optional<std::uint64_t> max_answers, bool trace) {
    Program p = parse_program(program);
    SolveOptions o;
    o.mode = parse_mode(mode);
    if (o.mode == EngineMode::NativeBackjump) p = lower_native(p);
    o.limits.max_steps = max_steps;
    if (max_answers) o.limits.max_answers = *max_answers;
    VectorSink sink;
    SolveResult r;
    {
        py::gil_scoped_release release;
        r = solve(p, query, o, trace ? &sink : nullptr);
    }
    std::string text = format_trace(sink.events());
    return result_dict(r, trace ? &text : nullptr);
}

std::string transform_text(const std::string& program, const std::string& approach,
                           const std::vector<std::string>& targets) {
    TransformSpec spec;
    if (approach == "a1") spec.approach = Approach::A1;
    else if (approach == "a1a") spec.approach = Approach::A1a;
    else if (approach == "a2") spec.approach = Approach::A2;
    else throw py::value_error("approach must be a1, a1a or a2");
    for (const auto& t : targets) spec.targets.insert(parse_pred_key(t));
    return pretty_print(transform(parse_program(program), spec).program);
}

}  // namespace

PYBIND11_MODULE(_ldbj, m) {
    m.doc() = "Definite-clause engine with catch/throw and backjumping";

    py::register_exception<SyntaxError>(m, "SyntaxError", PyExc_ValueError);
    py::register_exception<TransformError>(m, "TransformError", PyExc_ValueError);
    py::register_exception<DimacsError>(m, "DimacsError", PyExc_ValueError);

    m.def("solve", &solve_text, py::arg("program"), py::arg("query"), py::arg("mode") = "plain",
          py::arg("max_steps") = 10'000'000, py::arg("max_answers") = py::none(), py::arg("trace") = false,
          "Run a query; returns answers (written terms), status, ball, steps, stats and optionally the trace text.");
    m.def("transform", &transform_text, py::arg("program"), py::arg("approach"),
          py::arg("targets") = std::vector<std::string>{}, "Apply A1, A1a or A2 and return the program text.");
    m.def("lower_native", [](const std::string& p) { return pretty_print(lower_native(parse_program(p))); });
    m.def("corpus_source", [](const std::string& name) { return corpus_source(parse_program_name(name)); });

    m.def("gen_cnf", [](int v, int c, int len, std::uint64_t seed) { return to_py(gen_cnf(v, c, len, seed)); },
          py::arg("num_vars"), py::arg("num_clauses"), py::arg("clause_len") = 3, py::arg("seed") = 0);
    m.def("dimacs_import", [](const std::string& text) { return to_py(dimacs_import(text)); });
    m.def("dimacs_export", [](const PyCnf& c) { return dimacs_export(from_py(c)); });
    m.def("brute_force", [](const PyCnf& c) -> py::object {
        OracleResult r = brute_force(from_py(c));
        if (!r.sat) return py::none();
        std::vector<int> model;
        for (std::size_t v = 1; v < r.model.size(); ++v) model.push_back(r.model[v] ? int(v) : -int(v));
        return py::cast(model);
    }, "A model as signed variables, or None when unsatisfiable.");
    m.def("run_sat", [](const PyCnf& c, const std::string& program, const std::string& mode, std::uint64_t max_steps) {
        SolveOptions o;
        o.mode = parse_mode(mode);
        o.limits.max_steps = max_steps;
        CnfInstance inst = from_py(c);
        SatRun r;
        {
            py::gil_scoped_release release;
            r = run_sat(inst, parse_program_name(program), o);
        }
        py::dict d = result_dict(r.result, nullptr);
        d["verdict"] = std::string(to_string(r.verdict));
        return d;
    }, py::arg("cnf"), py::arg("program") = "p3", py::arg("mode") = "plain", py::arg("max_steps") = 10'000'000);
    m.def("bench", [](const std::vector<PyCnf>& instances, const std::vector<std::string>& programs,
                      std::uint64_t max_steps, bool record_time, unsigned threads) {
        std::vector<CnfInstance> inst;
        for (const auto& c : instances) inst.push_back(from_py(c));
        std::vector<CorpusProgram> progs;
        for (const auto& p : programs) progs.push_back(parse_program_name(p));
        BenchOptions o;
        o.max_steps = max_steps;
        o.record_time = record_time;
        o.threads = threads;
        std::vector<BenchRow> rows;
        {
            py::gil_scoped_release release;
            rows = bench(inst, progs, o);
        }
        return bench_csv(rows);
    }, py::arg("instances"), py::arg("programs") = std::vector<std::string>{"p2", "p3"},
          py::arg("max_steps") = 10'000'000, py::arg("record_time") = false, py::arg("threads") = 1,
          "CSV text, one row per instance and program.");
}
