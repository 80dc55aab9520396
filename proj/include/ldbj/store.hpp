#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ldbj/term.hpp"

namespace ldbj {

using Symbol = std::uint32_t;

// Interned atom and functor names. Addresses of names are stable.
class SymbolTable {
public:
    SymbolTable() = default;
    SymbolTable(const SymbolTable& other);
    SymbolTable& operator=(const SymbolTable& other);

    Symbol intern(std::string_view name);
    const std::string& name(Symbol s) const { return names_[s]; }
    std::size_t size() const { return names_.size(); }

private:
    std::deque<std::string> names_;
    std::unordered_map<std::string_view, Symbol> ids_;
};

enum class Tag : std::uint8_t { Ref, Atom, Int, Str, Fun };

// One heap word. Ref: index of the referenced cell (itself when unbound).
// Str: index of a Fun cell. Fun: functor symbol in value, arity in aux,
// arguments in the following aux cells.
struct Cell {
    Tag tag = Tag::Atom;
    std::uint32_t aux = 0;
    std::int64_t value = 0;

    static Cell ref(std::size_t index) { return {Tag::Ref, 0, static_cast<std::int64_t>(index)}; }
    static Cell atom(Symbol s) { return {Tag::Atom, 0, s}; }
    static Cell integer(std::int64_t v) { return {Tag::Int, 0, v}; }
    static Cell str(std::size_t fun_index) { return {Tag::Str, 0, static_cast<std::int64_t>(fun_index)}; }
    static Cell fun(Symbol s, std::size_t arity) { return {Tag::Fun, static_cast<std::uint32_t>(arity), s}; }

    std::size_t index() const { return static_cast<std::size_t>(value); }
    Symbol symbol() const { return static_cast<Symbol>(value); }
    friend bool operator==(const Cell&, const Cell&) = default;
};

struct TrailMark {
    std::size_t position = 0;
};

class CyclicTermError : public std::runtime_error {
public:
    CyclicTermError() : std::runtime_error("term exceeds the dereference depth cap (cyclic?)") {}
};

// Clause compiled to a relocatable cell block: variable cells first, then
// head cells, then body cells. Roots hold block-local indices.
struct ClauseTemplate {
    std::vector<Cell> cells;
    std::size_t head_end = 0;  // cells [0, head_end) hold the variables and head
    Cell head;
    Cell body;
    bool fact = false;
};

// Variable store: a heap of cells plus a binding trail.
//
// All bindings are trailed, so undo_to restores the store exactly to its
// state at the mark. Cells allocated after a heap top may be discarded
// with truncate once every binding into them has been undone.
class Bindings {
public:
    static constexpr std::size_t kDefaultDepthCap = 10'000;

    Bindings();
    explicit Bindings(SymbolTable symbols);

    SymbolTable& symbols() { return symbols_; }
    const SymbolTable& symbols() const { return symbols_; }
    Symbol intern(std::string_view name) { return symbols_.intern(name); }

    Cell new_var();
    Cell deref(Cell c) const;
    bool is_unbound(Cell c) const { return deref(c).tag == Tag::Ref; }
    const Cell& at(std::size_t i) const { return heap_[i]; }
    // Argument i (0-based) of a dereferenced Str cell.
    Cell arg(Cell str, std::size_t i) const { return heap_[str.index() + 1 + i]; }
    const Cell& functor(Cell str) const { return heap_[str.index()]; }

    Cell make_compound(Symbol functor, const std::vector<Cell>& args);
    Cell make_list(const std::vector<Cell>& items, Cell tail);

    bool unify(Cell a, Cell b, bool occurs_check = false);

    TrailMark mark() const { return {trail_.size()}; }
    void undo_to(TrailMark m);
    std::size_t heap_top() const { return heap_.size(); }
    void truncate(std::size_t top);
    std::size_t trail_size() const { return trail_.size(); }
    std::vector<std::size_t> bound_variables() const;
    std::vector<Cell> snapshot() const { return heap_; }

    // Builds a heap copy of t. Variables with the same id share one cell;
    // var_cells carries that mapping across calls.
    Cell put(const Term& t, std::map<std::int64_t, Cell>& var_cells);
    Cell put(const Term& t) {
        std::map<std::int64_t, Cell> vars;
        return put(t, vars);
    }

    // Reads a heap term back. Unbound variables become Var(cell index).
    // Throws CyclicTermError past depth_cap nested dereferences.
    Term resolve(Cell c, std::size_t depth_cap = kDefaultDepthCap) const;

    ClauseTemplate compile(const Clause& clause);
    // Copies the variable and head part of a template; returns the head.
    Cell rename_head(const ClauseTemplate& t, std::size_t& base);
    // Copies the body part; must directly follow rename_head.
    Cell rename_body(const ClauseTemplate& t, std::size_t base);

    // Standard rename: fresh variant of a whole clause.
    std::pair<Cell, Cell> rename_clause(const ClauseTemplate& t);

private:
    bool occurs(std::size_t var, Cell t) const;
    void bind(std::size_t var, Cell value);
    Cell relocate(Cell c, std::size_t base) const;

    SymbolTable symbols_;
    std::vector<Cell> heap_;
    std::vector<std::uint32_t> trail_;
    std::vector<std::pair<Cell, Cell>> unify_stack_;
};

// Unify two trees in a fresh store; convenience for tests and tools.
bool unifiable(const Term& a, const Term& b, bool occurs_check = false);

}  // namespace ldbj
