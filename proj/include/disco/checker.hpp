#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "disco/metamodel.hpp"
#include "disco/solve.hpp"
#include "disco/workspace.hpp"

namespace disco::check {

struct Finding {
    std::string rule;                   // F1..F8 or EXPECT / SHARED / SOLVER / INTERNAL
    std::string message;
    std::vector<std::string> elements;  // offending element names, first is the main subject
    std::optional<Span> span;
};

enum class CheckVerdict { Valid, Invalid, BudgetExceeded };

struct CheckOptions {
    bool enable_f5 = true;
    bool enable_f8 = true;
    // evaluate the model-scoped facts F3/F4/F5 over a lone diagram too
    bool degenerate_diagram_rules = true;
    std::uint64_t budget = 10'000'000;
};

struct MergedElement {
    std::string kind;
    std::string name;
    std::vector<std::string> diagrams;  // member diagrams declaring it, ascending
    Span span;                          // first declaration
};

struct MergedRelationship {
    std::string diagram;  // declaring member diagram
    Relationship rel;
};

// A model's diagrams unified on (kind, name); a lone diagram is wrapped as a
// degenerate merged model with no model identity.
struct MergedModel {
    std::string model_kind;  // empty for a bare diagram
    std::string name;
    std::vector<Diagram> member_diagrams;          // declaration order
    std::vector<MergedElement> elements;           // sorted by (kind, name)
    std::vector<MergedRelationship> relationships; // member order, then declaration order
    std::vector<SharedExpectation> shared_expect;

    const MergedElement* find_element(const ElementRef& ref) const;
};

struct Report {
    std::string level;  // diagram | model | system
    std::string subject;
    CheckVerdict verdict = CheckVerdict::Valid;
    std::vector<Finding> findings;
    std::optional<rel::Scope> scope;  // present when the solver ran
    double timing_ms = 0;
    std::vector<Report> children;                     // member models of a system
    std::shared_ptr<const MergedModel> structure;     // for tree/dot rendering
};

MergedModel merge_diagram(const Diagram& d);
// Throws std::invalid_argument when a member is missing or of the wrong kind
// (resolve rejects such models before they get here).
MergedModel merge_model(const ModelRef& m, const Workspace& ws,
                        const meta::MetamodelCatalog& cat);

Report check_diagram(const Diagram& d, const meta::MetamodelCatalog& cat,
                     const CheckOptions& opts = {});
Report check_model(const MergedModel& mm, const meta::MetamodelCatalog& cat,
                   const CheckOptions& opts = {});
Report check_system(const SystemRef& s, const Workspace& ws, const meta::MetamodelCatalog& cat,
                    const CheckOptions& opts = {});

// Exact per-signature counts for the merged model: its elements and
// relationships by kind, one count per member diagram, one for the model
// itself, ancestors rolled up, everything else zero.
rel::Scope compute_scope(const MergedModel& mm, const meta::MetamodelCatalog& cat);

// inclusive scope from exact concrete counts (ancestors get the sums)
rel::Scope scope_from_exact_counts(const meta::MetamodelCatalog& cat,
                                   const std::vector<std::pair<std::string, long>>& exact);

struct Encoding {
    rel::FormulaPtr goal;
    rel::Scope scope;
    // canonical atom name -> declared element/relationship/diagram name
    std::vector<std::pair<std::string, std::string>> pinning;
};

// Pin every named entity to a canonical atom and assert each field tuple of
// the merged model, so solving degenerates to verifying the one instance.
Encoding encode_instance(const MergedModel& mm, const meta::MetamodelCatalog& cat);

enum class SolverOutcome { UniqueInstance, NoInstance, MultipleInstances, BudgetExceeded };

struct Verdict {
    SolverOutcome outcome = SolverOutcome::NoInstance;
    int count = 0;  // instances found, capped at 2
    std::vector<rel::Instance> instances;
    Encoding encoding;
    double timing_ms = 0;
};

Verdict validate_via_solver(const MergedModel& mm, const meta::MetamodelCatalog& cat,
                            const CheckOptions& opts = {});

// Solver-backed report: valid when the pinned encoding admits exactly one
// instance. NoInstance yields a synthetic SOLVER finding, MultipleInstances an
// INTERNAL one (the encoding failed to pin the data), budget exhaustion sets
// the verdict alone.
Report check_with_solver(const MergedModel& mm, const std::string& level,
                         const meta::MetamodelCatalog& cat, const CheckOptions& opts = {});

struct AssertionResult {
    std::string id;
    bool holds = true;
    std::optional<rel::Instance> counterexample;
    std::optional<rel::Scope> counterexample_scope;
    bool budget_exceeded = false;
};

// Refutation sweep for A1 (no composition cycle), A2 (no doubly-owned part),
// A3 (no mixed-kind aggregation) over every scope in each assertion's
// signature family with counts up to max_scope, plus the A1 regression run
// with F3 disabled that must produce a counterexample.
std::vector<AssertionResult> builtin_assertion_suite(const meta::MetamodelCatalog& cat,
                                                     int max_scope,
                                                     const CheckOptions& opts = {});

} // namespace disco::check
