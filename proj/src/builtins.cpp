#include "ldbj/builtins.hpp"

#include <array>

namespace ldbj {

namespace {

constexpr std::array kTable{
    BuiltinInfo{"true", 0, Builtin::True, false},
    BuiltinInfo{"fail", 0, Builtin::Fail, false},
    BuiltinInfo{"false", 0, Builtin::Fail, false},
    BuiltinInfo{",", 2, Builtin::Conj, true},
    BuiltinInfo{";", 2, Builtin::Disj, true},
    BuiltinInfo{"->", 2, Builtin::IfThen, true},
    BuiltinInfo{"=", 2, Builtin::Unify, false},
    BuiltinInfo{"var", 1, Builtin::Var, false},
    BuiltinInfo{"nonvar", 1, Builtin::Nonvar, false},
    BuiltinInfo{"is", 2, Builtin::Is, false},
    BuiltinInfo{">", 2, Builtin::Greater, false},
    BuiltinInfo{"<", 2, Builtin::Less, false},
    BuiltinInfo{">=", 2, Builtin::GreaterEq, false},
    BuiltinInfo{"=<", 2, Builtin::LessEq, false},
    BuiltinInfo{"btid", 2, Builtin::Btid, false},
    BuiltinInfo{"sort_desc", 2, Builtin::SortDesc, false},
    BuiltinInfo{"catch", 3, Builtin::Catch, false},
    BuiltinInfo{"throw", 1, Builtin::Throw, false},
    BuiltinInfo{"parent_choice", 1, Builtin::ParentChoice, false},
    BuiltinInfo{"backjump", 1, Builtin::Backjump, false},
    BuiltinInfo{kMyIdMarker, 1, Builtin::MyIdMarker, false},
    BuiltinInfo{kCatchRestMarker, 1, Builtin::CatchRestMarker, false},
};

}  // namespace

std::optional<BuiltinInfo> lookup_builtin(std::string_view name, std::size_t arity) {
    for (const auto& b : kTable)
        if (b.arity == arity && b.name == name) return b;
    return std::nullopt;
}

bool is_bookkeeping(const PredKey& k) {
    return is_builtin(k) || (!k.name.empty() && k.name.front() == '$');
}

}  // namespace ldbj
