#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "disco/source.hpp"

// Resolved, typed view of a parsed workspace. Everything is identified by
// (signature kind, name); spans point back at the declaring source.

namespace disco {

struct ElementRef {
    std::string kind;  // concrete node signature, e.g. Task
    std::string name;
};

inline bool operator==(const ElementRef& a, const ElementRef& b) {
    return a.kind == b.kind && a.name == b.name;
}
inline bool operator<(const ElementRef& a, const ElementRef& b) {
    return a.kind != b.kind ? a.kind < b.kind : a.name < b.name;
}

struct Element {
    std::string kind;
    std::string name;
    Span span;
};

struct Relationship {
    std::string kind;  // concrete relationship signature, e.g. Composition
    std::string name;
    std::optional<ElementRef> head;    // structure kinds
    std::vector<ElementRef> tail;
    std::optional<ElementRef> tact;    // participation
    std::optional<ElementRef> user;
    std::optional<ElementRef> source;  // transition
    std::optional<ElementRef> target;
    std::optional<long> expect_tail;
    Span span;
};

struct Diagram {
    std::string kind;  // concrete DiagramView signature
    std::string name;
    std::vector<Element> elements;
    std::vector<Relationship> relationships;
    Span span;

    const Element* find_element(std::string_view kind_, std::string_view name_) const;
};

struct SharedExpectation {
    std::string kind;  // concrete node signature
    std::vector<std::string> names;
    Span span;
};

struct ModelRef {
    std::string kind;  // concrete Model signature
    std::string name;
    std::vector<std::string> diagrams;  // member diagram names, declaration order, deduplicated
    std::vector<SharedExpectation> shared;
    Span span;
};

struct SystemRef {
    std::string name;
    std::vector<std::string> models;  // deduplicated
    Span span;
};

struct Workspace {
    std::vector<Diagram> diagrams;
    std::vector<ModelRef> models;
    std::vector<SystemRef> systems;

    const Diagram* find_diagram(std::string_view name) const;
    const ModelRef* find_model(std::string_view name) const;
    const SystemRef* find_system(std::string_view name) const;
};

// structural equality ignoring spans, used by the round-trip property
bool structurally_equal(const Workspace& a, const Workspace& b);

// Render a workspace back to DSL text; parsing and resolving the output
// yields a structurally equal workspace.
std::string print_workspace(const Workspace& ws);

} // namespace disco
