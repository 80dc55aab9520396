#pragma once

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "ldbj/term.hpp"

namespace ldbj {

enum class Approach { A1, A1a, A2 };

std::string_view to_string(Approach a);

struct TransformSpec {
    Approach approach = Approach::A1;
    std::set<PredKey> targets;  // A1 and A1a only
};

class TransformError : public std::runtime_error {
public:
    // clause is the 1-based position in the input program, 0 if none.
    TransformError(std::size_t clause, const std::string& what)
        : std::runtime_error(clause ? "clause " + std::to_string(clause) + ": " + what : what), clause_(clause) {}
    std::size_t clause() const { return clause_; }

private:
    std::size_t clause_;
};

struct TransformResult {
    Program program;
    std::vector<std::string> warnings;
};

// Annotation conventions:
//   '$my_id'(V)        in a target clause: V names that clause's identifier
//   backjump(T)        jump to identifier T
//   '$catch_rest'(T)   split point for A2; T = fresh asks for btid/2
//
// A1:  p(t) :- B   becomes   p(t) :- btid(t, Id), catch(B, Id, fail)
// A1a: the clauses of p become one clause with a nested catch chain
// A2:  H :- B0, '$catch_rest'(T), B1   becomes   H :- B0, catch(B1, T, fail)
//
// A1 and A1a also rewrite every backjump(T) into throw(T).
TransformResult transform(const Program& p, const TransformSpec& spec);
TransformResult transform_approach1(const Program& p, const std::set<PredKey>& targets);
TransformResult transform_approach1a(const Program& p, const std::set<PredKey>& targets);
TransformResult transform_approach2(const Program& p);

// For the native engine: '$my_id'(V) becomes parent_choice(V) and
// '$catch_rest' markers are dropped.
Program lower_native(const Program& p);

// Source text that parse_program reads back as an alpha-equivalent program.
std::string pretty_print(const Program& p);

}  // namespace ldbj
