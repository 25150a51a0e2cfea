#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "disco/source.hpp"

// Concrete-syntax declarations as parsed, names unresolved. The resolver
// turns these into a typed Workspace.

namespace disco::dsl {

struct NameRef {
    std::string name;
    Span span;
};

struct NodeEntry {
    std::string keyword;  // task | goal | actor | object | assocclass | state
    std::vector<NameRef> names;
    Span span;
};

struct FieldAssign {
    std::string field;             // head | tail | tact | user | source | target | expect
    std::vector<NameRef> values;   // endpoint names (empty for expect)
    long number = 0;               // expect only
    Span span;
};

struct RelEntry {
    std::string keyword;  // gen | real | agg | comp | parti | trans
    NameRef name;
    std::vector<FieldAssign> fields;
    Span span;
};

struct DiagramDecl {
    std::string kindword;  // taskstructure | data | taskflow | state | collab
    NameRef name;
    std::vector<NodeEntry> nodes;
    std::vector<RelEntry> rels;
    Span span;
};

struct SharedDecl {
    std::string keyword;  // a nodekw
    std::vector<NameRef> names;
    Span span;
};

struct ModelDecl {
    std::string kindword;
    NameRef name;
    std::vector<NameRef> diagrams;
    std::vector<SharedDecl> shared;
    Span span;
};

struct SystemDecl {
    NameRef name;
    std::vector<NameRef> models;
    Span span;
};

struct SourceDocument {
    std::string filename;
    std::vector<DiagramDecl> diagrams;
    std::vector<ModelDecl> models;
    std::vector<SystemDecl> systems;
};

struct ParseResult {
    SourceDocument doc;
    std::vector<Diagnostic> errors;
};

// Total: never throws on user input; malformed constructs are skipped with
// diagnostics and parsing continues at the next ';' or '}'.
ParseResult parse_source(std::string_view text, std::string filename = "<input>");

} // namespace disco::dsl
