#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>

#include "ldbj/term.hpp"

namespace ldbj {

// Maps a variable to its printed name. The default prints "_<id>".
using VarNamer = std::function<std::string(const Term&)>;

std::string write_term(const Term& t, const VarNamer& namer = {});
// As above, parenthesizing operator terms above max_priority.
std::string write_term(const Term& t, int max_priority, const VarNamer& namer = {});

// Atom text, quoted when it would not read back as the same atom.
std::string format_atom(const std::string& name);

// Names variables after their source hints where unambiguous within the
// given terms, falling back to "_<hint><id>" style names otherwise.
std::map<std::int64_t, std::string> readable_names(const std::vector<Term>& terms);

}  // namespace ldbj
