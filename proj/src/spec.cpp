#include "disco/spec.hpp"

#include <set>

namespace disco::rel {

Spec::Spec(std::vector<SignatureDecl> sigs,
           std::vector<std::pair<std::string, FormulaPtr>> facts)
    : sigs_(std::move(sigs)), facts_(std::move(facts)) {
    for (std::size_t i = 0; i < sigs_.size(); ++i) {
        if (!sig_by_name_.emplace(sigs_[i].name, int(i)).second)
            throw SpecError("duplicate signature: " + sigs_[i].name);
    }
    children_.resize(sigs_.size());
    for (std::size_t i = 0; i < sigs_.size(); ++i) {
        const auto& s = sigs_[i];
        if (s.parent.empty()) {
            roots_.push_back(int(i));
            continue;
        }
        auto it = sig_by_name_.find(s.parent);
        if (it == sig_by_name_.end())
            throw SpecError("unknown parent '" + s.parent + "' of signature " + s.name);
        children_[it->second].push_back(int(i));
    }
    // parent links must form a forest
    for (std::size_t i = 0; i < sigs_.size(); ++i) {
        std::set<int> seen;
        int cur = int(i);
        while (!sigs_[cur].parent.empty()) {
            if (!seen.insert(cur).second)
                throw SpecError("signature hierarchy cycle at " + sigs_[i].name);
            cur = sig_by_name_.find(sigs_[cur].parent)->second;
        }
    }
    for (std::size_t i = 0; i < sigs_.size(); ++i) {
        for (const auto& fd : sigs_[i].fields) {
            if (fd.name.empty() || fd.owner != sigs_[i].name)
                throw SpecError("field '" + fd.name + "' declared under wrong owner");
            int tgt = sig_index(fd.target);
            if (tgt < 0)
                throw SpecError("field " + fd.qualified() + " has unknown target " + fd.target);
            int exc = -1;
            if (!fd.exclude.empty()) {
                exc = sig_index(fd.exclude);
                if (exc < 0)
                    throw SpecError("field " + fd.qualified() + " excludes unknown signature " + fd.exclude);
            }
            FieldInfo info{fd, int(i), tgt, exc};
            int idx = int(fields_.size());
            if (!field_by_qualified_.emplace(fd.qualified(), idx).second)
                throw SpecError("duplicate field: " + fd.qualified());
            auto [it, fresh] = field_by_bare_.emplace(fd.name, idx);
            if (!fresh) it->second = -2;
            fields_.push_back(std::move(info));
        }
    }
}

int Spec::sig_index(std::string_view name) const {
    auto it = sig_by_name_.find(name);
    return it == sig_by_name_.end() ? -1 : it->second;
}

int Spec::sig_index_checked(std::string_view name) const {
    int i = sig_index(name);
    if (i < 0) throw SpecError("unknown signature: " + std::string(name));
    return i;
}

bool Spec::conforms(int kind, int ancestor) const {
    for (int cur = kind; cur >= 0;) {
        if (cur == ancestor) return true;
        const auto& p = sigs_[cur].parent;
        cur = p.empty() ? -1 : sig_index(p);
    }
    return false;
}

bool Spec::conforms(std::string_view kind, std::string_view ancestor) const {
    return conforms(sig_index_checked(kind), sig_index_checked(ancestor));
}

int Spec::field_index(std::string_view name) const {
    if (auto it = field_by_qualified_.find(name); it != field_by_qualified_.end())
        return it->second;
    if (auto it = field_by_bare_.find(name); it != field_by_bare_.end())
        return it->second;  // may be -2 (ambiguous)
    return -1;
}

int Spec::field_index_checked(std::string_view name) const {
    int i = field_index(name);
    if (i == -1) throw SpecError("unknown field: " + std::string(name));
    if (i == -2) throw SpecError("ambiguous field name: " + std::string(name) + " (qualify with Owner.)");
    return i;
}

std::vector<long> own_counts(const Spec& spec, const Scope& scope) {
    for (const auto& [name, n] : scope.counts) {
        if (spec.sig_index(name) < 0)
            throw ScopeError("scope names unknown signature: " + name);
        if (n < 0)
            throw ScopeError("scope count for " + name + " is negative");
    }
    std::vector<long> own(spec.signatures().size(), 0);
    for (std::size_t i = 0; i < spec.signatures().size(); ++i) {
        const auto& s = spec.signature(int(i));
        long total = scope.get(s.name);
        long sub = 0;
        for (int c : spec.children(int(i))) sub += scope.get(spec.signature(c).name);
        long mine = total - sub;
        if (mine < 0)
            throw ScopeError("scope for " + s.name + " (" + std::to_string(total) +
                             ") is smaller than the sum of its subtypes (" + std::to_string(sub) + ")");
        if (s.is_abstract && mine != 0)
            throw ScopeError("abstract signature " + s.name + " has " + std::to_string(mine) +
                             " atoms of its own; its count must equal the sum of its subtypes");
        own[i] = mine;
    }
    return own;
}

namespace {

// arity computation doubles as name/binding validation
int expr_arity(const Spec& spec, const Expr& e, std::set<std::string>& bound) {
    switch (e.op) {
        case ExprOp::Sig:
            spec.sig_index_checked(e.name);
            return 1;
        case ExprOp::Field:
            spec.field_index_checked(e.name);
            return 2;
        case ExprOp::Var:
            if (!bound.count(e.name))
                throw SpecError("unbound variable: " + e.name);
            return 1;
        case ExprOp::Atoms: {
            int a = e.atoms_arity;
            for (const auto& t : e.tuples)
                if (int(t.size()) != a)
                    throw SpecError("atom tuple arity mismatch in constant relation");
            if (a < 1) throw SpecError("constant relation arity must be positive");
            return a;
        }
        case ExprOp::None:
            return 1;  // joins with None are checked dynamically
        case ExprOp::Join: {
            int l = expr_arity(spec, *e.lhs, bound);
            int r = expr_arity(spec, *e.rhs, bound);
            if (l + r - 2 < 1)
                throw SpecError("join of two unary expressions has arity 0");
            return l + r - 2;
        }
        case ExprOp::Union:
        case ExprOp::Intersect:
        case ExprOp::Diff: {
            int l = expr_arity(spec, *e.lhs, bound);
            int r = expr_arity(spec, *e.rhs, bound);
            if (l != r)
                throw SpecError("arity mismatch: " + to_string(*e.lhs) + " vs " + to_string(*e.rhs));
            return l;
        }
        case ExprOp::Product:
            return expr_arity(spec, *e.lhs, bound) + expr_arity(spec, *e.rhs, bound);
        case ExprOp::Transpose:
        case ExprOp::Closure: {
            int l = expr_arity(spec, *e.lhs, bound);
            if (l != 2)
                throw SpecError("transpose/closure requires a binary expression, got arity " +
                                std::to_string(l));
            return 2;
        }
    }
    throw SpecError("unhandled expression");
}

void check_formula(const Spec& spec, const Formula& f, std::set<std::string>& bound) {
    switch (f.op) {
        case FormulaOp::True:
            return;
        case FormulaOp::In:
        case FormulaOp::Equal: {
            int l = expr_arity(spec, *f.a, bound);
            int r = expr_arity(spec, *f.b, bound);
            if (l != r)
                throw SpecError("arity mismatch in comparison: " + std::to_string(l) + " vs " +
                                std::to_string(r));
            return;
        }
        case FormulaOp::Card:
            expr_arity(spec, *f.a, bound);
            if (f.bound < 0) throw SpecError("negative cardinality bound");
            return;
        case FormulaOp::Not:
            check_formula(spec, *f.f, bound);
            return;
        case FormulaOp::And:
        case FormulaOp::Or:
        case FormulaOp::Implies:
            check_formula(spec, *f.f, bound);
            check_formula(spec, *f.g, bound);
            return;
        case FormulaOp::Quant: {
            if (expr_arity(spec, *f.a, bound) != 1)
                throw SpecError("quantifier bound must be unary");
            bool fresh = bound.insert(f.var).second;
            check_formula(spec, *f.f, bound);
            if (fresh) bound.erase(f.var);
            return;
        }
        case FormulaOp::Acyclic:
            if (expr_arity(spec, *f.a, bound) != 2)
                throw SpecError("acyclic requires a binary expression");
            return;
    }
}

} // namespace

void validate_formula(const Spec& spec, const Formula& f) {
    std::set<std::string> bound;
    check_formula(spec, f, bound);
}

} // namespace disco::rel
