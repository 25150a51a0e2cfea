#include "disco/solve.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace disco::rel {

namespace {

struct Cell {
    int field;
    int owner;
    std::vector<int> candidates;  // ascending atom indices, exclude already applied
    Mult mult;
};

struct Ground {
    const Formula* formula;
    Env env;
    int trigger;  // cell position after which the formula is fully determined
};

// true when the expression's value cannot change during search: no field
// references, all variables bound by the environment
bool is_static(const Expr& e, const Env& env) {
    switch (e.op) {
        case ExprOp::Field:
            return false;
        case ExprOp::Var:
            return env.lookup(e.name) >= 0;
        case ExprOp::Sig:
        case ExprOp::Atoms:
        case ExprOp::None:
            return true;
        case ExprOp::Transpose:
        case ExprOp::Closure:
            return is_static(*e.lhs, env);
        default:
            return is_static(*e.lhs, env) && is_static(*e.rhs, env);
    }
}

class Search {
public:
    Search(const Spec& spec, const FormulaPtr& goal, const Scope& scope, const SearchOptions& opts)
        : opts_(opts) {
        validate_formula(spec, *goal);
        for (const auto& [id, f] : spec.facts()) validate_formula(spec, *f);
        universe_ = make_universe(spec, scope);
        inst_ = Instance::empty_of(universe_);
        build_cells();
        for (const auto& [id, f] : spec.facts()) decompose(f.get(), Env{});
        decompose(goal.get(), Env{});
        attach_triggers();
    }

    // enumerate satisfying instances in canonical order, stopping at limit
    EnumResult run(std::size_t limit) {
        EnumResult result;
        if (limit == 0) throw std::invalid_argument("enumeration limit must be positive");
        limit_ = limit;
        result_ = &result;
        bool statics_ok = true;
        for (const auto& g : grounds_)
            if (g.trigger < 0 && !eval_ground(g)) statics_ok = false;
        bool completed = true;
        if (statics_ok) completed = descend(0);
        result.nodes = nodes_;
        result.exhausted = completed && !budget_hit_;
        result.status = budget_hit_               ? SearchStatus::Budget
                        : result.instances.empty() ? SearchStatus::Unsat
                                                   : SearchStatus::Sat;
        return result;
    }

private:
    void build_cells() {
        std::vector<int> order;
        std::set<int> used;
        for (const auto& name : opts_.field_order) {
            int f = universe_->field_of(name);
            if (f == -2) throw SpecError("ambiguous field in field_order: " + name);
            if (f < 0) throw SpecError("unknown field in field_order: " + name);
            if (used.insert(f).second) order.push_back(f);
        }
        for (std::size_t f = 0; f < universe_->fields.size(); ++f)
            if (!used.count(int(f))) order.push_back(int(f));

        for (int f : order) {
            const auto& fd = universe_->fields[f];
            std::vector<int> cands;
            fd.targets.for_each([&](std::size_t b) { cands.push_back(int(b)); });
            if (fd.decl.mult == Mult::Set && cands.size() > 62)
                throw ScopeError("set field " + fd.decl.qualified() +
                                 " has too many candidate targets for exhaustive search");
            for (int owner : fd.owners) {
                cell_pos_[{f, owner}] = int(cells_.size());
                cells_.push_back({f, owner, cands, fd.decl.mult});
            }
        }
    }

    // Flatten conjunctions and unroll universal quantifiers whose bound is
    // fixed by the universe alone. The residue becomes ground constraints
    // checked as soon as their last supporting cell is assigned.
    void decompose(const Formula* f, Env env) {
        switch (f->op) {
            case FormulaOp::True:
                return;
            case FormulaOp::And:
                decompose(f->f.get(), env);
                decompose(f->g.get(), env);
                return;
            case FormulaOp::Quant: {
                if (f->quant != QuantKind::All || !is_static(*f->a, env)) break;
                TupleSet bound = eval_expr(*f->a, inst_, env);
                for (const auto& t : bound.tuples) {
                    Env inner = env;
                    inner.vars.emplace_back(f->var, t[0]);
                    decompose(f->f.get(), inner);
                }
                return;
            }
            default:
                break;
        }
        grounds_.push_back({f, std::move(env), -1});
    }

    // the atom a join through (v . field) resolves to, or -1
    int singleton_atom(const Expr& e, const Env& env) const {
        if (e.op == ExprOp::Var) return env.lookup(e.name);
        if (e.op == ExprOp::Atoms && e.tuples.size() == 1 && e.tuples[0].size() == 1) {
            auto it = universe_->atom_by_name.find(e.tuples[0][0]);
            return it == universe_->atom_by_name.end() ? -1 : it->second;
        }
        return -1;
    }

    void add_field_cells(int f, std::set<int>& support) const {
        for (int owner : universe_->fields[f].owners) {
            auto it = cell_pos_.find({f, owner});
            if (it != cell_pos_.end()) support.insert(it->second);
        }
    }

    void expr_support(const Expr& e, const Env& env, std::set<int>& support) const {
        switch (e.op) {
            case ExprOp::Sig:
            case ExprOp::Var:
            case ExprOp::Atoms:
            case ExprOp::None:
                return;
            case ExprOp::Field: {
                int f = universe_->field_of(e.name);
                if (f >= 0) add_field_cells(f, support);
                return;
            }
            case ExprOp::Join: {
                // v.field touches a single row; everything else is whole-field
                int a = singleton_atom(*e.lhs, env);
                if (a >= 0 && e.rhs->op == ExprOp::Field) {
                    int f = universe_->field_of(e.rhs->name);
                    if (f >= 0) {
                        auto it = cell_pos_.find({f, a});
                        if (it != cell_pos_.end()) support.insert(it->second);
                        return;
                    }
                }
                expr_support(*e.lhs, env, support);
                expr_support(*e.rhs, env, support);
                return;
            }
            case ExprOp::Transpose:
            case ExprOp::Closure:
                expr_support(*e.lhs, env, support);
                return;
            default:
                expr_support(*e.lhs, env, support);
                expr_support(*e.rhs, env, support);
                return;
        }
    }

    void formula_support(const Formula& f, const Env& env, std::set<int>& support) const {
        switch (f.op) {
            case FormulaOp::True:
                return;
            case FormulaOp::In:
            case FormulaOp::Equal:
                expr_support(*f.a, env, support);
                expr_support(*f.b, env, support);
                return;
            case FormulaOp::Card:
            case FormulaOp::Acyclic:
                expr_support(*f.a, env, support);
                return;
            case FormulaOp::Not:
                formula_support(*f.f, env, support);
                return;
            case FormulaOp::And:
            case FormulaOp::Or:
            case FormulaOp::Implies:
                formula_support(*f.f, env, support);
                formula_support(*f.g, env, support);
                return;
            case FormulaOp::Quant:
                expr_support(*f.a, env, support);
                formula_support(*f.f, env, support);  // quant var unbound: joins fall back to whole-field
                return;
        }
    }

    void attach_triggers() {
        triggered_.assign(cells_.size(), {});
        for (auto& g : grounds_) {
            std::set<int> support;
            formula_support(*g.formula, g.env, support);
            g.trigger = support.empty() ? -1 : *support.rbegin();
            if (g.trigger >= 0) triggered_[std::size_t(g.trigger)].push_back(&g);
        }
    }

    bool eval_ground(const Ground& g) {
        Env env = g.env;
        return eval_formula(*g.formula, inst_, env);
    }

    bool row_choices_ok(std::size_t pos) {
        for (const Ground* g : triggered_[pos])
            if (!eval_ground(*g)) return false;
        return true;
    }

    // returns false when the search stopped early (limit or budget)
    bool descend(std::size_t pos) {
        if (pos == cells_.size()) return emit();
        const Cell& cell = cells_[pos];
        Bitset& row = inst_.rows[std::size_t(cell.field)][std::size_t(cell.owner)];

        auto try_row = [&]() -> int {
            // 0 = keep iterating choices, 1 = stop search
            ++nodes_;
            if (nodes_ > opts_.budget) {
                budget_hit_ = true;
                return 1;
            }
            if (row_choices_ok(pos) && !descend(pos + 1)) return 1;
            return 0;
        };

        bool stop = false;
        if (cell.mult == Mult::One) {
            for (int c : cell.candidates) {
                row.clear();
                row.set(std::size_t(c));
                if (try_row()) { stop = true; break; }
            }
        } else if (cell.mult == Mult::Lone) {
            row.clear();
            if (try_row()) stop = true;
            if (!stop)
                for (int c : cell.candidates) {
                    row.clear();
                    row.set(std::size_t(c));
                    if (try_row()) { stop = true; break; }
                }
        } else {
            std::uint64_t masks = std::uint64_t{1} << cell.candidates.size();
            for (std::uint64_t m = 0; m < masks; ++m) {
                row.clear();
                for (std::size_t i = 0; i < cell.candidates.size(); ++i)
                    if ((m >> i) & 1) row.set(std::size_t(cell.candidates[i]));
                if (try_row()) { stop = true; break; }
            }
        }
        row.clear();
        return !stop;
    }

    bool emit() {
        if (opts_.symmetry_break && !canonical()) return true;
        result_->instances.push_back(inst_);
        return result_->instances.size() < limit_;
    }

    // lexicographically least under single same-signature atom swaps
    bool canonical() const {
        int n = universe_->n_atoms();
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b) {
                if (universe_->atoms[a].sig != universe_->atoms[b].sig) continue;
                if (swapped_rows(a, b) < inst_.rows) return false;
            }
        return true;
    }

    std::vector<std::vector<Bitset>> swapped_rows(int a, int b) const {
        int n = universe_->n_atoms();
        auto perm = [&](int x) { return x == a ? b : x == b ? a : x; };
        std::vector<std::vector<Bitset>> out(inst_.rows.size(),
                                             std::vector<Bitset>(std::size_t(n), Bitset(std::size_t(n))));
        for (std::size_t f = 0; f < inst_.rows.size(); ++f)
            for (int x = 0; x < n; ++x)
                inst_.rows[f][std::size_t(x)].for_each([&](std::size_t y) {
                    out[f][std::size_t(perm(x))].set(std::size_t(perm(int(y))));
                });
        return out;
    }

    SearchOptions opts_;
    std::shared_ptr<const Universe> universe_;
    Instance inst_;
    std::vector<Cell> cells_;
    std::map<std::pair<int, int>, int> cell_pos_;
    std::vector<Ground> grounds_;
    std::vector<std::vector<const Ground*>> triggered_;
    std::uint64_t nodes_ = 0;
    bool budget_hit_ = false;
    std::size_t limit_ = 1;
    EnumResult* result_ = nullptr;
};

} // namespace

EnumResult enumerate_instances(const Spec& spec, const FormulaPtr& goal, const Scope& scope,
                               std::size_t limit, const SearchOptions& opts) {
    Search s(spec, goal, scope, opts);
    return s.run(limit);
}

FindResult find_instance(const Spec& spec, const FormulaPtr& goal, const Scope& scope,
                         const SearchOptions& opts) {
    auto e = enumerate_instances(spec, goal, scope, 1, opts);
    FindResult r;
    r.nodes = e.nodes;
    r.status = e.status;
    if (!e.instances.empty()) r.instance = std::move(e.instances.front());
    return r;
}

AssertionCheck check_assertion(const Spec& spec, const FormulaPtr& assertion, const Scope& scope,
                               const SearchOptions& opts) {
    auto f = find_instance(spec, negate(assertion), scope, opts);
    AssertionCheck c;
    c.status = f.status;
    c.nodes = f.nodes;
    c.counterexample = std::move(f.instance);
    return c;
}

} // namespace disco::rel
