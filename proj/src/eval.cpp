#include "disco/eval.hpp"

#include <algorithm>

namespace disco::rel {

namespace {

// Internal evaluation value. Representation is picked by arity: unary sets
// and binary relations get bitset forms (the common case in facts), higher
// arities fall back to sorted tuple lists. Arity 0 marks the polymorphic
// empty relation produced by None.
struct Value {
    int arity = 0;
    Bitset set;                // arity 1
    std::vector<Bitset> rows;  // arity 2, indexed by first atom
    std::vector<Tuple> tuples; // arity >= 3, sorted unique
};

Value make_none() { return Value{}; }

Value make_unary(Bitset s) {
    Value v;
    v.arity = 1;
    v.set = std::move(s);
    return v;
}

Value make_binary(std::vector<Bitset> rows) {
    Value v;
    v.arity = 2;
    v.rows = std::move(rows);
    return v;
}

std::vector<Bitset> empty_rows(int n) {
    return std::vector<Bitset>(std::size_t(n), Bitset(std::size_t(n)));
}

std::vector<Tuple> value_tuples(const Value& v) {
    if (v.arity == 0) return {};
    std::vector<Tuple> out;
    if (v.arity == 1) {
        v.set.for_each([&](std::size_t a) { out.push_back({int(a)}); });
    } else if (v.arity == 2) {
        for (std::size_t a = 0; a < v.rows.size(); ++a)
            v.rows[a].for_each([&](std::size_t b) { out.push_back({int(a), int(b)}); });
    } else {
        out = v.tuples;
    }
    return out;
}

Value from_tuples(int arity, std::vector<Tuple> tuples, int n) {
    std::sort(tuples.begin(), tuples.end());
    tuples.erase(std::unique(tuples.begin(), tuples.end()), tuples.end());
    if (arity == 1) {
        Bitset s{std::size_t(n)};
        for (const auto& t : tuples) s.set(std::size_t(t[0]));
        return make_unary(std::move(s));
    }
    if (arity == 2) {
        auto rows = empty_rows(n);
        for (const auto& t : tuples) rows[std::size_t(t[0])].set(std::size_t(t[1]));
        return make_binary(std::move(rows));
    }
    Value v;
    v.arity = arity;
    v.tuples = std::move(tuples);
    return v;
}

long value_count(const Value& v) {
    if (v.arity == 0) return 0;
    if (v.arity == 1) return long(v.set.count());
    if (v.arity == 2) {
        long n = 0;
        for (const auto& r : v.rows) n += long(r.count());
        return n;
    }
    return long(v.tuples.size());
}

[[noreturn]] void fail(const std::string& msg) { throw EvalError(msg); }

Value eval(const Expr& e, const Instance& inst, Env& env);

Value eval_union(Value l, const Value& r, int n) {
    if (l.arity == 0) return r;
    if (r.arity == 0) return l;
    if (l.arity != r.arity) fail("arity mismatch in union");
    if (l.arity == 1) {
        l.set |= r.set;
        return l;
    }
    if (l.arity == 2) {
        for (std::size_t a = 0; a < l.rows.size(); ++a) l.rows[a] |= r.rows[a];
        return l;
    }
    auto t = l.tuples;
    t.insert(t.end(), r.tuples.begin(), r.tuples.end());
    return from_tuples(l.arity, std::move(t), n);
}

Value eval_intersect(Value l, const Value& r) {
    if (l.arity == 0) return l;
    if (r.arity == 0) return make_none();
    if (l.arity != r.arity) fail("arity mismatch in intersection");
    if (l.arity == 1) {
        l.set &= r.set;
        return l;
    }
    if (l.arity == 2) {
        for (std::size_t a = 0; a < l.rows.size(); ++a) l.rows[a] &= r.rows[a];
        return l;
    }
    std::vector<Tuple> t;
    std::set_intersection(l.tuples.begin(), l.tuples.end(), r.tuples.begin(), r.tuples.end(),
                          std::back_inserter(t));
    l.tuples = std::move(t);
    return l;
}

Value eval_diff(Value l, const Value& r) {
    if (l.arity == 0) return l;
    if (r.arity == 0) return l;
    if (l.arity != r.arity) fail("arity mismatch in difference");
    if (l.arity == 1) {
        l.set.and_not(r.set);
        return l;
    }
    if (l.arity == 2) {
        for (std::size_t a = 0; a < l.rows.size(); ++a) l.rows[a].and_not(r.rows[a]);
        return l;
    }
    std::vector<Tuple> t;
    std::set_difference(l.tuples.begin(), l.tuples.end(), r.tuples.begin(), r.tuples.end(),
                        std::back_inserter(t));
    l.tuples = std::move(t);
    return l;
}

Value eval_join(const Value& l, const Value& r, int n) {
    if (l.arity == 0 || r.arity == 0) return make_none();
    int arity = l.arity + r.arity - 2;
    if (arity < 1) fail("join of two unary values has arity 0");
    if (l.arity == 1 && r.arity == 2) {
        Bitset out{std::size_t(n)};
        l.set.for_each([&](std::size_t a) { out |= r.rows[a]; });
        return make_unary(std::move(out));
    }
    if (l.arity == 2 && r.arity == 1) {
        Bitset out{std::size_t(n)};
        for (std::size_t a = 0; a < l.rows.size(); ++a)
            if (l.rows[a].intersects(r.set)) out.set(a);
        return make_unary(std::move(out));
    }
    if (l.arity == 2 && r.arity == 2) {
        auto rows = empty_rows(n);
        for (std::size_t a = 0; a < l.rows.size(); ++a)
            l.rows[a].for_each([&](std::size_t b) { rows[a] |= r.rows[b]; });
        return make_binary(std::move(rows));
    }
    // general case through tuple lists
    auto lt = value_tuples(l), rt = value_tuples(r);
    std::vector<Tuple> out;
    for (const auto& a : lt)
        for (const auto& b : rt) {
            if (a.back() != b.front()) continue;
            Tuple t(a.begin(), a.end() - 1);
            t.insert(t.end(), b.begin() + 1, b.end());
            out.push_back(std::move(t));
        }
    return from_tuples(arity, std::move(out), n);
}

Value eval_product(const Value& l, const Value& r, int n) {
    if (l.arity == 0 || r.arity == 0) return make_none();
    if (l.arity == 1 && r.arity == 1) {
        auto rows = empty_rows(n);
        l.set.for_each([&](std::size_t a) { rows[a] = r.set; });
        return make_binary(std::move(rows));
    }
    auto lt = value_tuples(l), rt = value_tuples(r);
    std::vector<Tuple> out;
    for (const auto& a : lt)
        for (const auto& b : rt) {
            Tuple t = a;
            t.insert(t.end(), b.begin(), b.end());
            out.push_back(std::move(t));
        }
    return from_tuples(l.arity + r.arity, std::move(out), n);
}

std::vector<Bitset> to_rows(const Value& v, int n) {
    if (v.arity == 0) return empty_rows(n);
    if (v.arity == 1) fail("expected a binary value, got unary");
    if (v.arity == 2) return v.rows;
    fail("expected a binary value, got arity " + std::to_string(v.arity));
}

std::vector<Bitset> closure_rows(std::vector<Bitset> reach) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t a = 0; a < reach.size(); ++a) {
            Bitset next = reach[a];
            reach[a].for_each([&](std::size_t b) { next |= reach[b]; });
            if (!(next == reach[a])) {
                reach[a] = std::move(next);
                changed = true;
            }
        }
    }
    return reach;
}

Value eval(const Expr& e, const Instance& inst, Env& env) {
    const Universe& u = *inst.universe;
    int n = u.n_atoms();
    switch (e.op) {
        case ExprOp::Sig: {
            int s = u.sig_of(e.name);
            if (s < 0) fail("unknown signature: " + e.name);
            return make_unary(u.extents[s]);
        }
        case ExprOp::Field: {
            int f = u.field_of(e.name);
            if (f == -2) fail("ambiguous field name: " + e.name);
            if (f < 0) fail("unknown field: " + e.name);
            return make_binary(inst.rows[f]);
        }
        case ExprOp::Var: {
            int a = env.lookup(e.name);
            if (a < 0) fail("unbound variable: " + e.name);
            Bitset s{std::size_t(n)};
            s.set(std::size_t(a));
            return make_unary(std::move(s));
        }
        case ExprOp::Atoms: {
            std::vector<Tuple> tuples;
            for (const auto& row : e.tuples) {
                Tuple t;
                for (const auto& name : row) {
                    auto it = u.atom_by_name.find(name);
                    if (it == u.atom_by_name.end()) fail("unknown atom: " + name);
                    t.push_back(it->second);
                }
                tuples.push_back(std::move(t));
            }
            return from_tuples(e.atoms_arity, std::move(tuples), n);
        }
        case ExprOp::None:
            return make_none();
        case ExprOp::Join:
            return eval_join(eval(*e.lhs, inst, env), eval(*e.rhs, inst, env), n);
        case ExprOp::Union:
            return eval_union(eval(*e.lhs, inst, env), eval(*e.rhs, inst, env), n);
        case ExprOp::Intersect:
            return eval_intersect(eval(*e.lhs, inst, env), eval(*e.rhs, inst, env));
        case ExprOp::Diff:
            return eval_diff(eval(*e.lhs, inst, env), eval(*e.rhs, inst, env));
        case ExprOp::Product:
            return eval_product(eval(*e.lhs, inst, env), eval(*e.rhs, inst, env), n);
        case ExprOp::Transpose: {
            auto v = to_rows(eval(*e.lhs, inst, env), n);
            auto rows = empty_rows(n);
            for (std::size_t a = 0; a < v.size(); ++a)
                v[a].for_each([&](std::size_t b) { rows[b].set(a); });
            return make_binary(std::move(rows));
        }
        case ExprOp::Closure:
            return make_binary(closure_rows(to_rows(eval(*e.lhs, inst, env), n)));
    }
    fail("unhandled expression");
}

bool subset(const Value& l, const Value& r) {
    if (l.arity == 0) return true;
    if (r.arity == 0) return value_count(l) == 0;
    if (l.arity != r.arity) fail("arity mismatch in 'in'");
    if (l.arity == 1) return l.set.is_subset_of(r.set);
    if (l.arity == 2) {
        for (std::size_t a = 0; a < l.rows.size(); ++a)
            if (!l.rows[a].is_subset_of(r.rows[a])) return false;
        return true;
    }
    return std::includes(r.tuples.begin(), r.tuples.end(), l.tuples.begin(), l.tuples.end());
}

bool equal_values(const Value& l, const Value& r) { return subset(l, r) && subset(r, l); }

bool eval_f(const Formula& f, const Instance& inst, Env& env);

bool eval_quant(const Formula& f, const Instance& inst, Env& env) {
    Value bound = eval(*f.a, inst, env);
    if (bound.arity > 1) fail("quantifier bound must be unary");
    long hits = 0;
    bool all_hold = true;
    if (bound.arity == 1) {
        std::vector<std::size_t> atoms;
        bound.set.for_each([&](std::size_t a) { atoms.push_back(a); });
        for (std::size_t a : atoms) {
            env.vars.emplace_back(f.var, int(a));
            bool ok = eval_f(*f.f, inst, env);
            env.vars.pop_back();
            if (ok) ++hits; else all_hold = false;
            // All/No can short-circuit; Some/One need counts only up to 2
            if (f.quant == QuantKind::All && !all_hold) return false;
            if (f.quant == QuantKind::No && hits) return false;
            if (f.quant == QuantKind::Some && hits) return true;
            if (f.quant == QuantKind::One && hits > 1) return false;
        }
    }
    switch (f.quant) {
        case QuantKind::All: return all_hold;
        case QuantKind::Some: return hits > 0;
        case QuantKind::No: return hits == 0;
        case QuantKind::One: return hits == 1;
    }
    return false;
}

bool eval_f(const Formula& f, const Instance& inst, Env& env) {
    switch (f.op) {
        case FormulaOp::True:
            return true;
        case FormulaOp::In:
            return subset(eval(*f.a, inst, env), eval(*f.b, inst, env));
        case FormulaOp::Equal:
            return equal_values(eval(*f.a, inst, env), eval(*f.b, inst, env));
        case FormulaOp::Card: {
            long n = value_count(eval(*f.a, inst, env));
            switch (f.cmp) {
                case CardOp::Eq: return n == f.bound;
                case CardOp::Le: return n <= f.bound;
                case CardOp::Ge: return n >= f.bound;
            }
            return false;
        }
        case FormulaOp::Not:
            return !eval_f(*f.f, inst, env);
        case FormulaOp::And:
            return eval_f(*f.f, inst, env) && eval_f(*f.g, inst, env);
        case FormulaOp::Or:
            return eval_f(*f.f, inst, env) || eval_f(*f.g, inst, env);
        case FormulaOp::Implies:
            return !eval_f(*f.f, inst, env) || eval_f(*f.g, inst, env);
        case FormulaOp::Quant:
            return eval_quant(f, inst, env);
        case FormulaOp::Acyclic: {
            auto rows = closure_rows(to_rows(eval(*f.a, inst, env), inst.universe->n_atoms()));
            for (std::size_t a = 0; a < rows.size(); ++a)
                if (rows[a].test(a)) return false;
            return true;
        }
    }
    fail("unhandled formula");
}

} // namespace

TupleSet eval_expr(const Expr& e, const Instance& inst, const Env& env) {
    Env scratch = env;
    Value v = eval(e, inst, scratch);
    TupleSet out;
    out.arity = v.arity == 0 ? 1 : v.arity;
    out.tuples = value_tuples(v);
    return out;
}

bool eval_formula(const Formula& f, const Instance& inst, const Env& env) {
    Env scratch = env;
    return eval_f(f, inst, scratch);
}

bool is_acyclic(const TupleSet& binary) {
    if (binary.tuples.empty()) return true;
    if (binary.arity != 2) throw EvalError("is_acyclic requires binary tuples");
    int n = 0;
    for (const auto& t : binary.tuples) n = std::max({n, t[0] + 1, t[1] + 1});
    auto rows = empty_rows(n);
    for (const auto& t : binary.tuples) rows[std::size_t(t[0])].set(std::size_t(t[1]));
    auto reach = closure_rows(std::move(rows));
    for (std::size_t a = 0; a < reach.size(); ++a)
        if (reach[a].test(a)) return false;
    return true;
}

} // namespace disco::rel
