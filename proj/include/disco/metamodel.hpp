#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "disco/spec.hpp"

namespace disco::meta {

struct MetamodelError : std::runtime_error {
    std::string code;
    MetamodelError(std::string c, const std::string& msg)
        : std::runtime_error(msg), code(std::move(c)) {}
};

// The notation's abstract syntax: a signature forest (no common root), the
// diagram/model/system containers, and the well-formedness facts F1..F8.
struct MetamodelCatalog {
    rel::Spec spec;
    std::vector<std::pair<std::string, std::string>> rule_index;  // F1..F8 -> description

    const std::string& rule_text(const std::string& id) const;
};

// Deterministic: two calls build structurally identical catalogs. The
// constructor self-checks the forest shape and validates every fact formula.
MetamodelCatalog declare_metamodel();

// reflexive-transitive subtype test over the catalog forest
bool conforms(const std::string& kind, const std::string& ancestor, const MetamodelCatalog& cat);

// the element/relationship fields of a concrete diagram kind, declaration order
std::vector<rel::FieldDecl> diagram_fields(const std::string& diagram_kind,
                                           const MetamodelCatalog& cat);

// Derived lookups (shared by the resolver and the checker): which diagram
// field stores elements or relationships of the given kind. Empty when the
// kind has no place in that diagram.
std::optional<rel::FieldDecl> element_field(const MetamodelCatalog& cat,
                                            const std::string& diagram_kind,
                                            const std::string& element_kind);
std::optional<rel::FieldDecl> relationship_field(const MetamodelCatalog& cat,
                                                 const std::string& diagram_kind,
                                                 const std::string& relationship_kind);

// model kind <-> diagram kind pairing via the model's member field
std::string diagram_kind_for_model(const MetamodelCatalog& cat, const std::string& model_kind);
std::string model_kind_for_diagram(const MetamodelCatalog& cat, const std::string& diagram_kind);
rel::FieldDecl model_member_field(const MetamodelCatalog& cat, const std::string& model_kind);

// endpoint fields of a relationship kind, e.g. Participation -> {tact, user}
std::vector<rel::FieldDecl> endpoint_fields(const MetamodelCatalog& cat,
                                            const std::string& relationship_kind);

} // namespace disco::meta
