#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

// Relational logic AST: expressions denote tuple sets over a finite universe,
// formulas denote truth values. Shared immutable nodes; builders below.

namespace disco::rel {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class ExprOp {
    Sig,       // extent of a signature (unary)
    Field,     // a declared field's tuple set (binary)
    Var,       // quantified variable (unary singleton)
    Atoms,     // constant relation over named atoms
    None,      // empty set, any arity
    Join,      // relational dot join
    Union,
    Intersect,
    Diff,
    Product,
    Transpose, // binary only
    Closure,   // transitive closure, binary only
};

struct Expr {
    ExprOp op;
    std::string name;                                 // Sig, Field, Var
    std::vector<std::vector<std::string>> tuples;     // Atoms, rows of atom names
    int atoms_arity = 1;                              // Atoms with no rows still has an arity
    ExprPtr lhs, rhs;
};

inline ExprPtr sig(std::string name) {
    return std::make_shared<Expr>(Expr{ExprOp::Sig, std::move(name), {}, 1, nullptr, nullptr});
}
inline ExprPtr field(std::string name) {
    return std::make_shared<Expr>(Expr{ExprOp::Field, std::move(name), {}, 2, nullptr, nullptr});
}
inline ExprPtr var(std::string name) {
    return std::make_shared<Expr>(Expr{ExprOp::Var, std::move(name), {}, 1, nullptr, nullptr});
}
inline ExprPtr atoms(std::vector<std::vector<std::string>> tuples, int arity) {
    return std::make_shared<Expr>(Expr{ExprOp::Atoms, {}, std::move(tuples), arity, nullptr, nullptr});
}
inline ExprPtr atom(std::string name) { return atoms({{std::move(name)}}, 1); }
inline ExprPtr none() {
    return std::make_shared<Expr>(Expr{ExprOp::None, {}, {}, 1, nullptr, nullptr});
}
inline ExprPtr binary(ExprOp op, ExprPtr a, ExprPtr b) {
    return std::make_shared<Expr>(Expr{op, {}, {}, 1, std::move(a), std::move(b)});
}
inline ExprPtr join(ExprPtr a, ExprPtr b) { return binary(ExprOp::Join, std::move(a), std::move(b)); }
inline ExprPtr unite(ExprPtr a, ExprPtr b) { return binary(ExprOp::Union, std::move(a), std::move(b)); }
inline ExprPtr intersect(ExprPtr a, ExprPtr b) { return binary(ExprOp::Intersect, std::move(a), std::move(b)); }
inline ExprPtr diff(ExprPtr a, ExprPtr b) { return binary(ExprOp::Diff, std::move(a), std::move(b)); }
inline ExprPtr product(ExprPtr a, ExprPtr b) { return binary(ExprOp::Product, std::move(a), std::move(b)); }
inline ExprPtr transpose(ExprPtr a) { return binary(ExprOp::Transpose, std::move(a), nullptr); }
inline ExprPtr closure(ExprPtr a) { return binary(ExprOp::Closure, std::move(a), nullptr); }

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

enum class FormulaOp { True, In, Equal, Card, Not, And, Or, Implies, Quant, Acyclic };
enum class QuantKind { All, Some, No, One };
enum class CardOp { Eq, Le, Ge };

struct Formula {
    FormulaOp op;
    ExprPtr a, b;          // In, Equal, Card (a), Acyclic (a), Quant bound (a)
    CardOp cmp = CardOp::Eq;
    long bound = 0;        // Card
    FormulaPtr f, g;       // Not (f), And/Or/Implies, Quant body (f)
    QuantKind quant = QuantKind::All;
    std::string var;       // Quant
};

inline FormulaPtr truth() { return std::make_shared<Formula>(Formula{FormulaOp::True, nullptr, nullptr, CardOp::Eq, 0, nullptr, nullptr, QuantKind::All, {}}); }
inline FormulaPtr in(ExprPtr a, ExprPtr b) {
    return std::make_shared<Formula>(Formula{FormulaOp::In, std::move(a), std::move(b), CardOp::Eq, 0, nullptr, nullptr, QuantKind::All, {}});
}
inline FormulaPtr equal(ExprPtr a, ExprPtr b) {
    return std::make_shared<Formula>(Formula{FormulaOp::Equal, std::move(a), std::move(b), CardOp::Eq, 0, nullptr, nullptr, QuantKind::All, {}});
}
inline FormulaPtr card(ExprPtr a, CardOp cmp, long bound) {
    return std::make_shared<Formula>(Formula{FormulaOp::Card, std::move(a), nullptr, cmp, bound, nullptr, nullptr, QuantKind::All, {}});
}
inline FormulaPtr negate(FormulaPtr f) {
    return std::make_shared<Formula>(Formula{FormulaOp::Not, nullptr, nullptr, CardOp::Eq, 0, std::move(f), nullptr, QuantKind::All, {}});
}
inline FormulaPtr conj(FormulaPtr f, FormulaPtr g) {
    return std::make_shared<Formula>(Formula{FormulaOp::And, nullptr, nullptr, CardOp::Eq, 0, std::move(f), std::move(g), QuantKind::All, {}});
}
inline FormulaPtr disj(FormulaPtr f, FormulaPtr g) {
    return std::make_shared<Formula>(Formula{FormulaOp::Or, nullptr, nullptr, CardOp::Eq, 0, std::move(f), std::move(g), QuantKind::All, {}});
}
inline FormulaPtr implies(FormulaPtr f, FormulaPtr g) {
    return std::make_shared<Formula>(Formula{FormulaOp::Implies, nullptr, nullptr, CardOp::Eq, 0, std::move(f), std::move(g), QuantKind::All, {}});
}
inline FormulaPtr quant(QuantKind k, std::string v, ExprPtr bound, FormulaPtr body) {
    return std::make_shared<Formula>(Formula{FormulaOp::Quant, std::move(bound), nullptr, CardOp::Eq, 0, std::move(body), nullptr, k, std::move(v)});
}
inline FormulaPtr all(std::string v, ExprPtr bound, FormulaPtr body) { return quant(QuantKind::All, std::move(v), std::move(bound), std::move(body)); }
inline FormulaPtr some(std::string v, ExprPtr bound, FormulaPtr body) { return quant(QuantKind::Some, std::move(v), std::move(bound), std::move(body)); }
inline FormulaPtr no(std::string v, ExprPtr bound, FormulaPtr body) { return quant(QuantKind::No, std::move(v), std::move(bound), std::move(body)); }
inline FormulaPtr one(std::string v, ExprPtr bound, FormulaPtr body) { return quant(QuantKind::One, std::move(v), std::move(bound), std::move(body)); }
inline FormulaPtr acyclic(ExprPtr a) {
    return std::make_shared<Formula>(Formula{FormulaOp::Acyclic, std::move(a), nullptr, CardOp::Eq, 0, nullptr, nullptr, QuantKind::All, {}});
}

// right-folded conjunction; empty list is True
FormulaPtr conj_all(const std::vector<FormulaPtr>& fs);

std::string to_string(const Expr& e);
std::string to_string(const Formula& f);

} // namespace disco::rel
