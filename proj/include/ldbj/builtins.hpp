#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "ldbj/term.hpp"

namespace ldbj {

enum class Builtin : std::uint8_t {
    True,
    Fail,
    Conj,
    Disj,
    IfThen,
    Unify,
    Var,
    Nonvar,
    Is,
    Greater,
    Less,
    GreaterEq,
    LessEq,
    Btid,
    SortDesc,
    Catch,
    Throw,
    ParentChoice,
    Backjump,
    MyIdMarker,
    CatchRestMarker,
};

struct BuiltinInfo {
    std::string_view name;
    std::size_t arity;
    Builtin id;
    bool control;  // ','/2, ';'/2, '->'/2: no trace events of their own
};

// Predicates that user clauses may not define.
std::optional<BuiltinInfo> lookup_builtin(std::string_view name, std::size_t arity);
inline bool is_builtin(const PredKey& k) { return lookup_builtin(k.name, k.arity).has_value(); }

// Bookkeeping introduced by the transformations plus '$'-prefixed names.
bool is_bookkeeping(const PredKey& k);

inline constexpr std::string_view kMyIdMarker = "$my_id";
inline constexpr std::string_view kCatchRestMarker = "$catch_rest";
inline constexpr std::string_view kBacktrackIdFunctor = "$bj";

}  // namespace ldbj
