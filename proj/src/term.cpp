#include "ldbj/term.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <set>
#include <unordered_set>
#include <stdexcept>

namespace ldbj {

struct Term::Node {
    Kind kind;
    std::int64_t number = 0;  // var id or integer value
    std::string name;         // atom, functor or var hint
    std::vector<Term> args;
};

namespace {

const std::shared_ptr<const Term::Node>& nil_node() {
    static const auto node = [] {
        auto n = std::make_shared<Term::Node>();
        n->kind = Term::Kind::Atom;
        n->name = "[]";
        return std::shared_ptr<const Term::Node>(std::move(n));
    }();
    return node;
}

const std::string kEmpty;

}  // namespace

Term::Term() : node_(nil_node()) {}

Term Term::var(std::int64_t id, std::string hint) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Var;
    n->number = id;
    n->name = std::move(hint);
    return Term(std::move(n));
}

Term Term::atom(std::string name) {
    if (name == "[]") return Term();
    auto n = std::make_shared<Node>();
    n->kind = Kind::Atom;
    n->name = std::move(name);
    return Term(std::move(n));
}

Term Term::integer(std::int64_t value) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Int;
    n->number = value;
    return Term(std::move(n));
}

Term Term::compound(std::string functor, std::vector<Term> args) {
    if (args.empty()) return atom(std::move(functor));
    auto n = std::make_shared<Node>();
    n->kind = Kind::Compound;
    n->name = std::move(functor);
    n->args = std::move(args);
    return Term(std::move(n));
}

Term::Kind Term::kind() const { return node_->kind; }

std::int64_t Term::var_id() const { return node_->number; }

const std::string& Term::hint() const { return is_var() ? node_->name : kEmpty; }

const std::string& Term::name() const { return is_var() ? kEmpty : node_->name; }

std::int64_t Term::int_value() const { return node_->number; }

std::size_t Term::arity() const { return node_->args.size(); }

std::span<const Term> Term::args() const { return node_->args; }

bool operator==(const Term& a, const Term& b) {
    if (a.node_ == b.node_) return true;
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
    case Term::Kind::Var:
    case Term::Kind::Int:
        return a.node_->number == b.node_->number;
    case Term::Kind::Atom:
        return a.node_->name == b.node_->name;
    case Term::Kind::Compound:
        return a.node_->name == b.node_->name && a.node_->args == b.node_->args;
    }
    return false;
}

Term make_list(const std::vector<Term>& items, Term tail) {
    Term out = std::move(tail);
    for (auto it = items.rbegin(); it != items.rend(); ++it)
        out = Term::compound(".", {*it, out});
    return out;
}

std::optional<std::vector<Term>> list_items(const Term& t) {
    std::vector<Term> out;
    Term cur = t;
    while (cur.is_compound(".", 2)) {
        out.push_back(cur.arg(0));
        cur = cur.arg(1);
    }
    if (!cur.is_atom("[]")) return std::nullopt;
    return out;
}

Term make_conjunction(const std::vector<Term>& goals) {
    if (goals.empty()) return Term::atom("true");
    Term out = goals.back();
    for (auto i = goals.size() - 1; i-- > 0;)
        out = Term::compound(",", {goals[i], out});
    return out;
}

std::vector<Term> flatten_conjunction(const Term& body) {
    std::vector<Term> out;
    Term cur = body;
    while (cur.is_compound(",", 2)) {
        auto left = flatten_conjunction(cur.arg(0));
        out.insert(out.end(), left.begin(), left.end());
        cur = cur.arg(1);
    }
    out.push_back(cur);
    return out;
}

Term make_tuple(const std::vector<Term>& items) {
    if (items.empty()) return Term::atom("[]");
    Term out = items.back();
    for (auto i = items.size() - 1; i-- > 0;)
        out = Term::compound(",", {items[i], out});
    return out;
}

namespace {

void collect_vars(const Term& t, std::unordered_set<std::int64_t>& seen, std::vector<Term>& out) {
    switch (t.kind()) {
    case Term::Kind::Var:
        if (seen.insert(t.var_id()).second) out.push_back(t);
        break;
    case Term::Kind::Compound:
        for (const auto& a : t.args()) collect_vars(a, seen, out);
        break;
    default:
        break;
    }
}

bool variant_walk(const Term& a, const Term& b,
                  std::map<std::int64_t, std::int64_t>& fwd,
                  std::map<std::int64_t, std::int64_t>& back) {
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
    case Term::Kind::Var: {
        auto [f, fnew] = fwd.try_emplace(a.var_id(), b.var_id());
        auto [r, rnew] = back.try_emplace(b.var_id(), a.var_id());
        return f->second == b.var_id() && r->second == a.var_id();
    }
    case Term::Kind::Atom:
        return a.name() == b.name();
    case Term::Kind::Int:
        return a.int_value() == b.int_value();
    case Term::Kind::Compound:
        if (a.name() != b.name() || a.arity() != b.arity()) return false;
        for (std::size_t i = 0; i < a.arity(); ++i)
            if (!variant_walk(a.arg(i), b.arg(i), fwd, back)) return false;
        return true;
    }
    return false;
}

}  // namespace

std::vector<Term> term_variables(const Term& t) {
    std::unordered_set<std::int64_t> seen;
    std::vector<Term> out;
    collect_vars(t, seen, out);
    return out;
}

bool contains_functor(const Term& t, std::string_view name) {
    if (t.is_atom()) return t.name() == name;
    if (!t.is_compound()) return false;
    if (t.name() == name) return true;
    return std::ranges::any_of(t.args(), [&](const Term& a) { return contains_functor(a, name); });
}

Term substitute(const Term& t, const std::map<std::int64_t, Term>& subst) {
    switch (t.kind()) {
    case Term::Kind::Var: {
        auto it = subst.find(t.var_id());
        return it == subst.end() ? t : it->second;
    }
    case Term::Kind::Compound: {
        std::vector<Term> args;
        args.reserve(t.arity());
        for (const auto& a : t.args()) args.push_back(substitute(a, subst));
        return Term::compound(t.name(), std::move(args));
    }
    default:
        return t;
    }
}

bool is_variant(const Term& a, const Term& b) {
    std::map<std::int64_t, std::int64_t> fwd, back;
    return variant_walk(a, b, fwd, back);
}

std::optional<PredKey> pred_key(const Term& t) {
    if (t.is_atom()) return PredKey{t.name(), 0};
    if (t.is_compound()) return PredKey{t.name(), t.arity()};
    return std::nullopt;
}

PredKey parse_pred_key(std::string_view text) {
    auto slash = text.rfind('/');
    if (slash == std::string_view::npos || slash == 0)
        throw std::invalid_argument("expected name/arity, got '" + std::string(text) + "'");
    PredKey k{std::string(text.substr(0, slash)), 0};
    auto digits = text.substr(slash + 1);
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k.arity);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || digits.empty())
        throw std::invalid_argument("bad arity in '" + std::string(text) + "'");
    return k;
}

std::uint64_t Program::next_serial() {
    static std::atomic<std::uint64_t> counter{0};
    return ++counter;
}

Program::Program(Program&& other) noexcept
    : clauses_(std::move(other.clauses_)),
      directives_(std::move(other.directives_)),
      index_(std::move(other.index_)),
      max_var_id_(other.max_var_id_),
      serial_(other.serial_) {
    other = Program();
}

Program& Program::operator=(Program&& other) noexcept {
    if (this != &other) {
        clauses_ = std::move(other.clauses_);
        directives_ = std::move(other.directives_);
        index_ = std::move(other.index_);
        max_var_id_ = other.max_var_id_;
        serial_ = other.serial_;
        other.clauses_.clear();
        other.directives_.clear();
        other.index_.clear();
        other.max_var_id_ = 0;
        other.serial_ = next_serial();
    }
    return *this;
}

void Program::add_clause(Clause c) {
    auto key = pred_key(c.head);
    if (!key) throw std::invalid_argument("clause head is not callable");
    serial_ = next_serial();
    index_[*key].push_back(clauses_.size());
    note_vars(c.head);
    note_vars(c.body);
    clauses_.push_back(std::move(c));
}

void Program::note_vars(const Term& t) {
    for (const auto& v : term_variables(t)) max_var_id_ = std::max(max_var_id_, v.var_id());
}

std::vector<Clause> Program::procedure(const PredKey& k) const {
    std::vector<Clause> out;
    if (auto it = index_.find(k); it != index_.end())
        for (auto pos : it->second) out.push_back(clauses_[pos]);
    return out;
}


bool alpha_equivalent(const Program& a, const Program& b) {
    if (a.clauses().size() != b.clauses().size()) return false;
    for (std::size_t i = 0; i < a.clauses().size(); ++i) {
        const auto& ca = a.clauses()[i];
        const auto& cb = b.clauses()[i];
        auto wrap = [](const Clause& c) { return Term::compound(":-", {c.head, c.body}); };
        if (!is_variant(wrap(ca), wrap(cb))) return false;
    }
    return true;
}

}  // namespace ldbj
