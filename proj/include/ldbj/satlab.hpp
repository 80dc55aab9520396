#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ldbj/engine.hpp"
#include "ldbj/term.hpp"

namespace ldbj {

struct Literal {
    bool positive = true;
    int var = 1;  // 1-based

    friend bool operator==(const Literal&, const Literal&) = default;
};

struct CnfInstance {
    int num_vars = 0;
    std::vector<std::vector<Literal>> clauses;

    friend bool operator==(const CnfInstance&, const CnfInstance&) = default;
};

enum class CorpusProgram { P1, P2, P3, P1Binary, P2Annotated };

std::string_view to_string(CorpusProgram p);
// Accepts p1, p2, p3, p1-binary, p2-annotated (case-insensitive).
std::optional<CorpusProgram> parse_corpus_program(std::string_view name);

const std::string& corpus_source(CorpusProgram p);
const Program& corpus_program(CorpusProgram p);

// Extra annotated binary programs used to exercise approach 1.
struct BinaryTestProgram {
    std::string name;
    PredKey target;
};
const std::vector<BinaryTestProgram>& binary_test_programs();
const std::string& binary_test_source(std::string_view name);

// The program that actually runs for a corpus entry: P1-binary is lowered
// for the native engine and A1-transformed for the plain one.
const Program& runnable_program(CorpusProgram p, EngineMode mode);
inline const PredKey kP1BinaryTarget{"sat_cl", 4};

// Pair-list term with one variable per propositional variable, named
// X1..Xn. P1 gets sat_cnf(Sat), the others sat_cnf(Sat, 0).
Term cnf_term(const CnfInstance& c, std::int64_t first_var_id = 1);
Term to_query(const CnfInstance& c, CorpusProgram p, std::int64_t first_var_id = 1);

struct OracleResult {
    bool sat = false;
    std::vector<bool> model;  // index 0 unused
};

// Tries assignments in lexicographic order with true before false.
// Throws std::invalid_argument for more than 26 variables.
OracleResult brute_force(const CnfInstance& c);
inline constexpr int kOracleMaxVars = 26;

// Requires clause_len <= num_vars.
CnfInstance gen_cnf(int num_vars, int num_clauses, int clause_len, std::uint64_t seed);

class DimacsError : public std::runtime_error {
public:
    DimacsError(int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

CnfInstance dimacs_import(std::string_view text);
std::string dimacs_export(const CnfInstance& c);

// Truth value of a variable in an answer, nullopt if left unbound.
// Understands Pol, (N,Pol) and (K,Id,Pol) value forms.
std::optional<bool> answer_value(const Answer& a, int var);
// Every clause has a literal whose variable carries its polarity.
bool satisfies(const CnfInstance& c, const Answer& a);
// P1: every instantiated clause holds a pair Pol-Pol.
bool valid_plain_model(const CnfInstance& c, const Answer& a);
// P2/P3: every clause holds lv-(n,lv) and the numbers are exactly 1..k.
bool valid_numbered_model(const CnfInstance& c, const Answer& a, std::string* why = nullptr);

enum class SatVerdict { Sat, Unsat, Limit, Error };
std::string_view to_string(SatVerdict v);

struct SatRun {
    SatVerdict verdict = SatVerdict::Error;
    SolveResult result;
};

// First answer only.
SatRun run_sat(const CnfInstance& c, CorpusProgram p, const SolveOptions& options, TraceSink* sink = nullptr);

struct BenchOptions {
    EngineMode mode = EngineMode::Plain;
    std::uint64_t max_steps = 10'000'000;
    bool oracle = true;       // cross-check when num_vars <= 26
    bool record_time = true;  // false writes 0 micros, for reproducible output
    unsigned threads = 1;
};

struct BenchRow {
    std::size_t instance = 0;  // 1-based
    CorpusProgram program = CorpusProgram::P2;
    SatVerdict verdict = SatVerdict::Error;
    std::uint64_t clause_tries = 0;
    std::uint64_t backjumps = 0;  // Backjump plus Catch events
    std::uint64_t steps = 0;
    std::uint64_t micros = 0;
    bool oracle_mismatch = false;
};

inline constexpr std::string_view kBenchHeader = "instance,program,sat,clause_tries,backjumps,steps,micros";

// One row per (instance, program), ordered by instance then program.
std::vector<BenchRow> bench(const std::vector<CnfInstance>& instances, const std::vector<CorpusProgram>& programs,
                            const BenchOptions& options);
std::string bench_csv(const std::vector<BenchRow>& rows);

}  // namespace ldbj
