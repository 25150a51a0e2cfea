#pragma once

#include <vector>

#include "disco/metamodel.hpp"
#include "disco/parse.hpp"
#include "disco/workspace.hpp"

namespace disco::dsl {

struct ResolveResult {
    Workspace workspace;
    std::vector<Diagnostic> errors;
};

// Bind names and kinds against the metamodel: diagram kinds to DiagramView
// signatures, entry keywords to diagram fields, endpoint names to elements of
// the declaring diagram, model members to diagrams of the matching kind.
// Semantic rules (F1..F8) are not evaluated here; only binding can fail.
ResolveResult resolve(const std::vector<SourceDocument>& docs, const meta::MetamodelCatalog& cat);
ResolveResult resolve(const SourceDocument& doc, const meta::MetamodelCatalog& cat);

} // namespace disco::dsl
