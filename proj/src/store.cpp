#include "ldbj/store.hpp"

#include <algorithm>
#include <cassert>
#include <cstdlib>
#include <iostream>

namespace ldbj {

Symbol SymbolTable::intern(std::string_view name) {
    if (auto it = ids_.find(name); it != ids_.end()) return it->second;
    names_.emplace_back(name);
    auto id = static_cast<Symbol>(names_.size() - 1);
    ids_.emplace(names_.back(), id);
    return id;
}

SymbolTable::SymbolTable(const SymbolTable& other) : names_(other.names_) {
    // The keys view into names_, so they are rebuilt rather than copied.
    for (std::size_t i = 0; i < names_.size(); ++i) ids_.emplace(names_[i], static_cast<Symbol>(i));
}

SymbolTable& SymbolTable::operator=(const SymbolTable& other) {
    if (this != &other) {
        SymbolTable copy(other);
        names_ = std::move(copy.names_);
        ids_ = std::move(copy.ids_);
    }
    return *this;
}

Bindings::Bindings(SymbolTable symbols) : Bindings() { symbols_ = std::move(symbols); }

Bindings::Bindings() {
    heap_.reserve(1 << 12);
    trail_.reserve(1 << 10);
}

Cell Bindings::new_var() {
    auto i = heap_.size();
    heap_.push_back(Cell::ref(i));
    return Cell::ref(i);
}

Cell Bindings::deref(Cell c) const {
    while (c.tag == Tag::Ref) {
        const Cell& n = heap_[c.index()];
        if (n.tag == Tag::Ref && n.index() == c.index()) return c;
        c = n;
    }
    return c;
}

Cell Bindings::make_compound(Symbol functor, const std::vector<Cell>& args) {
    if (args.empty()) return Cell::atom(functor);
    auto at = heap_.size();
    heap_.push_back(Cell::fun(functor, args.size()));
    heap_.insert(heap_.end(), args.begin(), args.end());
    return Cell::str(at);
}

Cell Bindings::make_list(const std::vector<Cell>& items, Cell tail) {
    Symbol dot = intern(".");
    Cell out = tail;
    for (auto it = items.rbegin(); it != items.rend(); ++it) out = make_compound(dot, {*it, out});
    return out;
}

void Bindings::bind(std::size_t var, Cell value) {
    heap_[var] = value;
    trail_.push_back(static_cast<std::uint32_t>(var));
}

bool Bindings::occurs(std::size_t var, Cell t) const {
    std::vector<Cell> todo{t};
    while (!todo.empty()) {
        Cell c = deref(todo.back());
        todo.pop_back();
        if (c.tag == Tag::Ref) {
            if (c.index() == var) return true;
        } else if (c.tag == Tag::Str) {
            const Cell& f = heap_[c.index()];
            for (std::size_t i = 0; i < f.aux; ++i) todo.push_back(heap_[c.index() + 1 + i]);
        }
    }
    return false;
}

bool Bindings::unify(Cell a, Cell b, bool occurs_check) {
    TrailMark m = mark();
    unify_stack_.clear();
    unify_stack_.emplace_back(a, b);
    while (!unify_stack_.empty()) {
        auto [x0, y0] = unify_stack_.back();
        unify_stack_.pop_back();
        Cell x = deref(x0);
        Cell y = deref(y0);
        if (x.tag == Tag::Ref && y.tag == Tag::Ref) {
            if (x.index() == y.index()) continue;
            // Younger variable points at the older one.
            if (x.index() < y.index()) std::swap(x, y);
            bind(x.index(), y);
            continue;
        }
        if (y.tag == Tag::Ref) std::swap(x, y);
        if (x.tag == Tag::Ref) {
            if (occurs_check && occurs(x.index(), y)) {
                undo_to(m);
                return false;
            }
            bind(x.index(), y);
            continue;
        }
        if (x.tag != y.tag) {
            undo_to(m);
            return false;
        }
        if (x.tag == Tag::Str) {
            if (x.index() == y.index()) continue;
            const Cell fx = heap_[x.index()];
            if (fx != heap_[y.index()]) {
                undo_to(m);
                return false;
            }
            for (std::size_t i = fx.aux; i-- > 0;)
                unify_stack_.emplace_back(heap_[x.index() + 1 + i], heap_[y.index() + 1 + i]);
            continue;
        }
        if (x.value != y.value) {
            undo_to(m);
            return false;
        }
    }
    return true;
}

void Bindings::undo_to(TrailMark m) {
    if (m.position > trail_.size()) {
        std::cerr << "internal error: stale trail mark " << m.position << " > " << trail_.size() << '\n';
        std::abort();
    }
    while (trail_.size() > m.position) {
        auto v = trail_.back();
        trail_.pop_back();
        heap_[v] = Cell::ref(v);
    }
}

void Bindings::truncate(std::size_t top) {
    assert(top <= heap_.size());
    heap_.resize(top);
}

std::vector<std::size_t> Bindings::bound_variables() const {
    std::vector<std::size_t> out(trail_.begin(), trail_.end());
    std::sort(out.begin(), out.end());
    return out;
}

Cell Bindings::put(const Term& t, std::map<std::int64_t, Cell>& var_cells) {
    switch (t.kind()) {
    case Term::Kind::Var: {
        auto it = var_cells.find(t.var_id());
        if (it != var_cells.end()) return it->second;
        Cell v = new_var();
        var_cells.emplace(t.var_id(), v);
        return v;
    }
    case Term::Kind::Atom:
        return Cell::atom(intern(t.name()));
    case Term::Kind::Int:
        return Cell::integer(t.int_value());
    case Term::Kind::Compound: {
        std::vector<Cell> args;
        args.reserve(t.arity());
        for (const auto& a : t.args()) args.push_back(put(a, var_cells));
        return make_compound(intern(t.name()), args);
    }
    }
    return Cell::atom(intern("[]"));
}

Term Bindings::resolve(Cell c, std::size_t depth_cap) const {
    if (depth_cap == 0) throw CyclicTermError();
    c = deref(c);
    switch (c.tag) {
    case Tag::Ref:
        return Term::var(static_cast<std::int64_t>(c.index()));
    case Tag::Atom:
        return Term::atom(symbols_.name(c.symbol()));
    case Tag::Int:
        return Term::integer(c.value);
    case Tag::Str: {
        const Cell& f = heap_[c.index()];
        std::vector<Term> args;
        args.reserve(f.aux);
        for (std::size_t i = 0; i < f.aux; ++i) args.push_back(resolve(heap_[c.index() + 1 + i], depth_cap - 1));
        return Term::compound(symbols_.name(f.symbol()), std::move(args));
    }
    case Tag::Fun:
        break;
    }
    throw std::logic_error("resolve: bare functor cell");
}

namespace {

struct TemplateBuilder {
    Bindings& store;
    std::vector<Cell>& cells;
    const std::map<std::int64_t, std::size_t>& slots;

    Cell build(const Term& t) {
        switch (t.kind()) {
        case Term::Kind::Var:
            return Cell::ref(slots.at(t.var_id()));
        case Term::Kind::Atom:
            return Cell::atom(store.intern(t.name()));
        case Term::Kind::Int:
            return Cell::integer(t.int_value());
        case Term::Kind::Compound: {
            auto at = cells.size();
            cells.push_back(Cell::fun(store.intern(t.name()), t.arity()));
            cells.resize(cells.size() + t.arity());
            for (std::size_t i = 0; i < t.arity(); ++i) {
                Cell a = build(t.arg(i));
                cells[at + 1 + i] = a;
            }
            return Cell::str(at);
        }
        }
        return Cell::atom(store.intern("[]"));
    }
};

}  // namespace

ClauseTemplate Bindings::compile(const Clause& clause) {
    ClauseTemplate t;
    std::map<std::int64_t, std::size_t> slots;
    for (const auto& v : term_variables(Term::compound(":-", {clause.head, clause.body}))) {
        slots.emplace(v.var_id(), t.cells.size());
        t.cells.push_back(Cell::ref(t.cells.size()));
    }
    TemplateBuilder b{*this, t.cells, slots};
    t.head = b.build(clause.head);
    t.head_end = t.cells.size();
    t.body = b.build(clause.body);
    t.fact = clause.is_fact();
    return t;
}

Cell Bindings::relocate(Cell c, std::size_t base) const {
    if (c.tag == Tag::Ref || c.tag == Tag::Str) c.value += static_cast<std::int64_t>(base);
    return c;
}

Cell Bindings::rename_head(const ClauseTemplate& t, std::size_t& base) {
    base = heap_.size();
    for (std::size_t i = 0; i < t.head_end; ++i) heap_.push_back(relocate(t.cells[i], base));
    return relocate(t.head, base);
}

Cell Bindings::rename_body(const ClauseTemplate& t, std::size_t base) {
    assert(heap_.size() == base + t.head_end);
    for (std::size_t i = t.head_end; i < t.cells.size(); ++i) heap_.push_back(relocate(t.cells[i], base));
    return relocate(t.body, base);
}

std::pair<Cell, Cell> Bindings::rename_clause(const ClauseTemplate& t) {
    std::size_t base = 0;
    Cell head = rename_head(t, base);
    Cell body = rename_body(t, base);
    return {head, body};
}

bool unifiable(const Term& a, const Term& b, bool occurs_check) {
    Bindings store;
    std::map<std::int64_t, Cell> vars;
    Cell x = store.put(a, vars);
    Cell y = store.put(b, vars);
    return store.unify(x, y, occurs_check);
}

}  // namespace ldbj
