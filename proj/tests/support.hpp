#pragma once

#include <random>
#include <string>
#include <vector>

#include "disco/checker.hpp"
#include "disco/metamodel.hpp"
#include "disco/parse.hpp"
#include "disco/resolve.hpp"
#include "disco/solve.hpp"

// Fixtures and randomized generators shared by the unit tests and the
// acceptance runner.

namespace testsup {

// the circulation library workspace, same content as data/circulation.disco
extern const char* const kCirculation;
// two data diagrams owning the same part, same content as data/shared_part.disco
extern const char* const kSharedPart;

// parse + resolve or throw with the collected diagnostics
disco::Workspace must_resolve(const std::string& text, const disco::meta::MetamodelCatalog& cat);

// Every instance at the scope, found by enumerating all 2^n subsets of the
// candidate field tuples and filtering by field multiplicities, the declared
// facts and (when non-null) the goal. Deliberately ignorant of the solver's
// search machinery; throws when the tuple space exceeds 2^22.
std::vector<disco::rel::Instance> brute_force_instances(const disco::rel::Spec& spec,
                                                        const disco::rel::Scope& scope,
                                                        const disco::rel::FormulaPtr& goal);

struct MiniCase {
    disco::rel::Spec spec;
    disco::rel::Scope scope;
    disco::rel::FormulaPtr goal;  // extra formula solved on top of the facts
};

// tiny random spec: up to two flat signatures, two binary fields, three atoms
// per signature, a couple of random facts and one random goal formula
MiniCase random_mini_case(std::mt19937& rng);

struct SweepResult {
    bool ok = true;
    int cases_run = 0;
    int invalid_cases = 0;        // backend sweep only
    long instances_compared = 0;  // minispec sweep only, guards against degenerate draws
    std::string detail;           // first failure, with enough text to reproduce
};

// solver enumeration vs brute-force oracle over `cases` random mini specs
SweepResult run_minispec_equivalence(int cases, unsigned seed);

// random workspace source that parses and resolves cleanly: one model, up to
// three diagrams, six nodes and four relationships, violations included
std::string random_workspace_text(std::mt19937& rng);

// Evaluator vs solver agreement on `cases` random workspaces, at model level
// and at diagram level (degenerate rules off); the pinned encoding must never
// admit a second instance.
SweepResult run_backend_agreement(int cases, unsigned seed);

} // namespace testsup
