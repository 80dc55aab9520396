#include "ldbj/writer.hpp"

#include <cctype>
#include <set>
#include <string_view>

#include "ldbj/operators.hpp"

namespace ldbj {

namespace {

constexpr std::string_view kSymbolChars = "+-*/\\^<>=~:.?@#&$";

bool symbolic(char c) { return kSymbolChars.find(c) != std::string_view::npos; }

bool needs_quotes(const std::string& name) {
    if (name.empty()) return true;
    if (name == "[]" || name == ";" || name == "!") return false;
    auto uc = [](char c) { return static_cast<unsigned char>(c); };
    if (std::islower(uc(name[0]))) {
        for (char c : name)
            if (!std::isalnum(uc(c)) && c != '_') return true;
        return false;
    }
    for (char c : name)
        if (!symbolic(c)) return true;
    return name == ".";
}

class Writer {
public:
    explicit Writer(const VarNamer& namer) : namer_(namer) {}

    void write(const Term& t, int max_priority) {
        switch (t.kind()) {
        case Term::Kind::Var:
            out_ += namer_ ? namer_(t) : "_" + std::to_string(t.var_id());
            return;
        case Term::Kind::Int:
            out_ += std::to_string(t.int_value());
            return;
        case Term::Kind::Atom:
            if (infix_operator(t.name()) && max_priority < 1200) {
                out_ += "(" + format_atom(t.name()) + ")";
                return;
            }
            out_ += format_atom(t.name());
            return;
        case Term::Kind::Compound:
            break;
        }
        if (t.is_compound(".", 2)) {
            write_list(t);
            return;
        }
        if (t.arity() == 2) {
            if (auto op = infix_operator(t.name())) {
                write_infix(t, *op, max_priority);
                return;
            }
        }
        out_ += t.name() == "[]" ? "'[]'" : format_atom(t.name());
        out_ += '(';
        for (std::size_t i = 0; i < t.arity(); ++i) {
            if (i) out_ += ',';
            write(t.arg(i), 999);
        }
        out_ += ')';
    }

    std::string take() { return std::move(out_); }

private:
    void write_list(const Term& t) {
        out_ += '[';
        Term cur = t;
        bool first = true;
        while (cur.is_compound(".", 2)) {
            if (!first) out_ += ',';
            first = false;
            write(cur.arg(0), 999);
            cur = cur.arg(1);
        }
        if (!cur.is_atom("[]")) {
            out_ += '|';
            write(cur, 999);
        }
        out_ += ']';
    }

    void write_infix(const Term& t, const OperatorDef& op, int max_priority) {
        bool parens = op.priority > max_priority;
        if (parens) out_ += '(';
        int left_max = op.type == OpType::YFX ? op.priority : op.priority - 1;
        int right_max = op.type == OpType::XFY ? op.priority : op.priority - 1;
        write(t.arg(0), left_max);
        const std::string& name = t.name();
        bool alpha = std::isalpha(static_cast<unsigned char>(name[0]));
        if (alpha || name == ":-" || name == "->") {
            out_ += ' ' + name + ' ';
        } else {
            if (name != "," && !out_.empty() && symbolic(out_.back())) out_ += ' ';
            out_ += name;
        }
        std::size_t mark = out_.size();
        write(t.arg(1), right_max);
        if (!alpha && out_.size() > mark && symbolic(out_[mark]) && name != ",")
            out_.insert(mark, 1, ' ');
        if (parens) out_ += ')';
    }

    const VarNamer& namer_;
    std::string out_;
};

}  // namespace

std::string format_atom(const std::string& name) {
    if (!needs_quotes(name)) return name;
    std::string out = "'";
    for (char c : name) {
        switch (c) {
        case '\'': out += "\\'"; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        default: out += c;
        }
    }
    out += '\'';
    return out;
}

std::string write_term(const Term& t, const VarNamer& namer) { return write_term(t, 1200, namer); }

std::string write_term(const Term& t, int max_priority, const VarNamer& namer) {
    Writer w(namer);
    w.write(t, max_priority);
    return w.take();
}

std::map<std::int64_t, std::string> readable_names(const std::vector<Term>& terms) {
    std::vector<Term> vars;
    std::set<std::int64_t> seen;
    for (const auto& t : terms)
        for (const auto& v : term_variables(t))
            if (seen.insert(v.var_id()).second) vars.push_back(v);

    std::map<std::string, int> uses;
    for (const auto& v : vars)
        if (!v.hint().empty() && v.hint() != "_") ++uses[v.hint()];

    std::map<std::int64_t, std::string> names;
    std::set<std::string> taken;
    for (const auto& v : vars) {
        const auto& h = v.hint();
        if (!h.empty() && h != "_" && uses[h] == 1 && taken.insert(h).second) names[v.var_id()] = h;
    }
    for (const auto& v : vars) {
        if (names.contains(v.var_id())) continue;
        std::string base = v.hint().empty() || v.hint() == "_" ? "_G" : v.hint() + "_";
        std::string candidate = base + std::to_string(v.var_id());
        while (!taken.insert(candidate).second) candidate += "x";
        names[v.var_id()] = candidate;
    }
    return names;
}

}  // namespace ldbj
