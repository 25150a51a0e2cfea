#include "disco/ast.hpp"

#include <sstream>

namespace disco::rel {

FormulaPtr conj_all(const std::vector<FormulaPtr>& fs) {
    if (fs.empty()) return truth();
    FormulaPtr acc = fs.back();
    for (auto it = fs.rbegin() + 1; it != fs.rend(); ++it) acc = conj(*it, acc);
    return acc;
}

static const char* expr_op_name(ExprOp op) {
    switch (op) {
        case ExprOp::Join: return ".";
        case ExprOp::Union: return "+";
        case ExprOp::Intersect: return "&";
        case ExprOp::Diff: return "-";
        case ExprOp::Product: return "->";
        default: return "?";
    }
}

std::string to_string(const Expr& e) {
    std::ostringstream os;
    switch (e.op) {
        case ExprOp::Sig:
        case ExprOp::Field:
        case ExprOp::Var:
            os << e.name;
            break;
        case ExprOp::None:
            os << "none";
            break;
        case ExprOp::Atoms: {
            os << "{";
            for (std::size_t i = 0; i < e.tuples.size(); ++i) {
                if (i) os << ", ";
                for (std::size_t j = 0; j < e.tuples[i].size(); ++j) {
                    if (j) os << "->";
                    os << e.tuples[i][j];
                }
            }
            os << "}";
            break;
        }
        case ExprOp::Transpose:
            os << "~(" << to_string(*e.lhs) << ")";
            break;
        case ExprOp::Closure:
            os << "^(" << to_string(*e.lhs) << ")";
            break;
        default:
            os << "(" << to_string(*e.lhs) << " " << expr_op_name(e.op) << " "
               << to_string(*e.rhs) << ")";
            break;
    }
    return os.str();
}

static const char* quant_name(QuantKind q) {
    switch (q) {
        case QuantKind::All: return "all";
        case QuantKind::Some: return "some";
        case QuantKind::No: return "no";
        case QuantKind::One: return "one";
    }
    return "?";
}

std::string to_string(const Formula& f) {
    std::ostringstream os;
    switch (f.op) {
        case FormulaOp::True:
            os << "true";
            break;
        case FormulaOp::In:
            os << to_string(*f.a) << " in " << to_string(*f.b);
            break;
        case FormulaOp::Equal:
            os << to_string(*f.a) << " = " << to_string(*f.b);
            break;
        case FormulaOp::Card: {
            const char* cmp = f.cmp == CardOp::Eq ? "=" : f.cmp == CardOp::Le ? "<=" : ">=";
            os << "#(" << to_string(*f.a) << ") " << cmp << " " << f.bound;
            break;
        }
        case FormulaOp::Not:
            os << "!(" << to_string(*f.f) << ")";
            break;
        case FormulaOp::And:
            os << "(" << to_string(*f.f) << " && " << to_string(*f.g) << ")";
            break;
        case FormulaOp::Or:
            os << "(" << to_string(*f.f) << " || " << to_string(*f.g) << ")";
            break;
        case FormulaOp::Implies:
            os << "(" << to_string(*f.f) << " => " << to_string(*f.g) << ")";
            break;
        case FormulaOp::Quant:
            os << quant_name(f.quant) << " " << f.var << ": " << to_string(*f.a) << " | "
               << to_string(*f.f);
            break;
        case FormulaOp::Acyclic:
            os << "acyclic(" << to_string(*f.a) << ")";
            break;
    }
    return os.str();
}

} // namespace disco::rel
