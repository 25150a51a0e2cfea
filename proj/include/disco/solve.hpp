#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "disco/eval.hpp"
#include "disco/instance.hpp"

namespace disco::rel {

struct SearchOptions {
    std::uint64_t budget = 10'000'000;    // search nodes before giving up
    std::vector<std::string> field_order; // qualified names first, rest follow declaration order
    bool symmetry_break = false;          // keep only lex-least among same-sig atom swaps
};

enum class SearchStatus {
    Sat,       // at least one instance found
    Unsat,     // search space exhausted, none exists
    Budget,    // node budget exceeded before an answer
};

struct FindResult {
    SearchStatus status;
    std::optional<Instance> instance;
    std::uint64_t nodes = 0;
};

struct EnumResult {
    SearchStatus status;  // Sat once limit reached, Unsat when exhausted (instances may be nonempty)
    std::vector<Instance> instances;
    std::uint64_t nodes = 0;
    bool exhausted = false;  // true when the whole space was covered
};

// Search for instances satisfying all spec facts plus the goal, at exactly
// the scoped atom counts. Deterministic: identical inputs enumerate identical
// instances in identical order. Throws ScopeError / SpecError / EvalError on
// malformed inputs; budget exhaustion is a result, not an error.
FindResult find_instance(const Spec& spec, const FormulaPtr& goal, const Scope& scope,
                         const SearchOptions& opts = {});

EnumResult enumerate_instances(const Spec& spec, const FormulaPtr& goal, const Scope& scope,
                               std::size_t limit, const SearchOptions& opts = {});

struct AssertionCheck {
    SearchStatus status;  // Sat = counterexample found, Unsat = assertion holds at scope
    std::optional<Instance> counterexample;
    std::uint64_t nodes = 0;
};

// Refutation: searches for an instance of facts + Not(assertion).
AssertionCheck check_assertion(const Spec& spec, const FormulaPtr& assertion, const Scope& scope,
                               const SearchOptions& opts = {});

} // namespace disco::rel
