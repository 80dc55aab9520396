#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ldbj {

// Immutable logic term. Copies share structure.
//
// Lists are '.'/2 chains ending in the atom '[]'; a pair A-B is the
// compound '-'(A,B). A compound always has at least one argument; asking
// for a zero-arity compound yields an atom.
class Term {
public:
    enum class Kind : std::uint8_t { Var, Atom, Int, Compound };

    Term();  // the atom '[]'

    static Term var(std::int64_t id, std::string hint = {});
    static Term atom(std::string name);
    static Term integer(std::int64_t value);
    static Term compound(std::string functor, std::vector<Term> args);

    Kind kind() const;
    bool is_var() const { return kind() == Kind::Var; }
    bool is_atom() const { return kind() == Kind::Atom; }
    bool is_int() const { return kind() == Kind::Int; }
    bool is_compound() const { return kind() == Kind::Compound; }
    bool is_callable() const { return is_atom() || is_compound(); }
    bool is_atom(std::string_view name) const { return is_atom() && this->name() == name; }
    bool is_compound(std::string_view functor, std::size_t arity) const {
        return is_compound() && name() == functor && this->arity() == arity;
    }

    std::int64_t var_id() const;
    const std::string& hint() const;  // empty unless a Var
    const std::string& name() const;  // atom name or functor
    std::int64_t int_value() const;
    std::size_t arity() const;
    std::span<const Term> args() const;
    const Term& arg(std::size_t i) const { return args()[i]; }

    // Structural equality; variables compare by id only.
    friend bool operator==(const Term& a, const Term& b);

    struct Node;  // opaque

private:
    explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

Term make_list(const std::vector<Term>& items, Term tail = Term::atom("[]"));
// Elements of a proper list, or nullopt if t is not one.
std::optional<std::vector<Term>> list_items(const Term& t);
Term make_conjunction(const std::vector<Term>& goals);  // empty -> true
std::vector<Term> flatten_conjunction(const Term& body);
// (t1,...,tk) as a right-nested ','/2 chain; a single term stays as is.
Term make_tuple(const std::vector<Term>& items);

// Distinct variable ids of t in first-occurrence order.
std::vector<Term> term_variables(const Term& t);
bool contains_functor(const Term& t, std::string_view name);
// Apply a variable-id substitution (ids absent from the map stay).
Term substitute(const Term& t, const std::map<std::int64_t, Term>& subst);
// Variant check: equal up to a bijective renaming of variables.
bool is_variant(const Term& a, const Term& b);

struct PredKey {
    std::string name;
    std::size_t arity = 0;

    std::string str() const { return name + "/" + std::to_string(arity); }
    friend auto operator<=>(const PredKey&, const PredKey&) = default;
};

std::optional<PredKey> pred_key(const Term& t);
// Parses "name/arity"; throws std::invalid_argument.
PredKey parse_pred_key(std::string_view text);

struct Clause {
    Term head;
    Term body;  // 'true' for facts

    PredKey key() const { return *pred_key(head); }
    bool is_fact() const { return body.is_atom("true"); }
};

// Clauses in source order plus a per-predicate index of clause positions.
class Program {
public:
    Program() = default;
    Program(const Program&) = default;
    Program& operator=(const Program&) = default;
    Program(Program&& other) noexcept;
    Program& operator=(Program&& other) noexcept;

    void add_clause(Clause c);
    void add_directive(Term d) {
        serial_ = next_serial();
        note_vars(d);
        directives_.push_back(std::move(d));
    }

    const std::vector<Clause>& clauses() const { return clauses_; }
    const std::vector<Term>& directives() const { return directives_; }
    const std::map<PredKey, std::vector<std::size_t>>& index() const { return index_; }

    bool defines(const PredKey& k) const { return index_.contains(k); }
    std::vector<Clause> procedure(const PredKey& k) const;
    // Largest variable id used anywhere, for minting fresh ids.
    std::int64_t max_var_id() const { return max_var_id_; }
    // Changes whenever the clauses or directives do; copies share it.
    std::uint64_t serial() const { return serial_; }

private:
    void note_vars(const Term& t);

    std::vector<Clause> clauses_;
    std::vector<Term> directives_;
    std::map<PredKey, std::vector<std::size_t>> index_;
    std::int64_t max_var_id_ = 0;
    std::uint64_t serial_ = next_serial();

    static std::uint64_t next_serial();
};

// Same clause sequence with each clause a variant of its counterpart.
bool alpha_equivalent(const Program& a, const Program& b);

}  // namespace ldbj
