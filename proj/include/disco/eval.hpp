#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "disco/ast.hpp"
#include "disco/instance.hpp"

namespace disco::rel {

struct EvalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// quantifier bindings, innermost last
struct Env {
    std::vector<std::pair<std::string, int>> vars;

    int lookup(std::string_view name) const {
        for (auto it = vars.rbegin(); it != vars.rend(); ++it)
            if (it->first == name) return it->second;
        return -1;
    }
};

using Tuple = std::vector<int>;

// evaluation result at the API boundary: sorted, duplicate-free tuples
struct TupleSet {
    int arity = 1;
    std::vector<Tuple> tuples;
};

TupleSet eval_expr(const Expr& e, const Instance& inst, const Env& env = {});
bool eval_formula(const Formula& f, const Instance& inst, const Env& env = {});

// no atom related to itself under the transitive closure
bool is_acyclic(const TupleSet& binary);

} // namespace disco::rel
