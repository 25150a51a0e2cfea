#include "disco/resolve.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace disco::dsl {

namespace {

const std::map<std::string, std::string> diagram_kind_of = {
    {"taskstructure", "TaskStDiagramView"}, {"data", "DataDiagramView"},
    {"taskflow", "TaskFlowDiagramView"},    {"state", "StateDiagramView"},
    {"collab", "CollabDiagramView"}};

const std::map<std::string, std::string> model_kind_of = {
    {"taskstructure", "TaskStModel"}, {"data", "DataModel"}, {"taskflow", "TaskFlowModel"},
    {"state", "StateModel"},          {"collab", "CollabModel"}};

const std::map<std::string, std::string> element_kind_of = {
    {"task", "Task"},     {"goal", "Goal"},        {"actor", "Actor"},
    {"object", "Object"}, {"assocclass", "AssociationClass"}, {"state", "State"}};

const std::map<std::string, std::string> rel_kind_of = {
    {"gen", "Generalisation"}, {"real", "Realisation"}, {"agg", "Aggregation"},
    {"comp", "Composition"},   {"parti", "Participation"}, {"trans", "Transition"}};

struct Resolver {
    const meta::MetamodelCatalog& cat;
    std::vector<Diagnostic> errors;

    void error(std::string code, std::string msg, Span span) {
        errors.push_back({std::move(code), std::move(msg), std::move(span)});
    }

    // endpoint fields whose names a relationship keyword may assign
    bool structure_kind(const std::string& rel_kind) {
        return cat.spec.conforms(rel_kind, "Structure");
    }
    bool whole_part_kind(const std::string& rel_kind) {
        return cat.spec.conforms(rel_kind, "Aggregation");
    }

    // Find the diagram element an endpoint name denotes. Whole-part
    // relationships require Task- or Object-family endpoints; other fields
    // take their expected kind from the metamodel field target.
    std::optional<ElementRef> resolve_endpoint(const Diagram& d, const Relationship& rel,
                                               const std::string& field_name,
                                               const std::string& expected,
                                               bool task_or_object, const NameRef& ref) {
        std::vector<const Element*> hits;
        bool name_seen = false;
        for (const auto& el : d.elements) {
            if (el.name != ref.name) continue;
            name_seen = true;
            bool ok = task_or_object
                          ? (cat.spec.conforms(el.kind, "Task") || cat.spec.conforms(el.kind, "Object"))
                          : cat.spec.conforms(el.kind, expected);
            if (ok) hits.push_back(&el);
        }
        if (hits.size() == 1) return ElementRef{hits.front()->kind, hits.front()->name};
        if (hits.size() > 1) {
            error("ambiguous-name",
                  "'" + ref.name + "' names more than one element usable as " + field_name +
                      " of " + rel.name,
                  ref.span);
            return std::nullopt;
        }
        if (name_seen) {
            std::string want = task_or_object ? "Task or Object" : expected;
            error("kind-mismatch",
                  "field '" + field_name + "' of " + rel.name + " expects " + want + "; '" +
                      ref.name + "' is not of that kind",
                  ref.span);
        } else {
            error("unknown-name",
                  "'" + ref.name + "' is not an element of diagram " + d.name, ref.span);
        }
        return std::nullopt;
    }

    void resolve_relationship(Diagram& d, const RelEntry& entry) {
        const std::string& kind = rel_kind_of.at(entry.keyword);
        auto fieldp = meta::relationship_field(cat, d.kind, kind);
        if (!fieldp) {
            error("kind-mismatch",
                  "diagram kind " + d.kind + " does not hold " + entry.keyword + " relationships",
                  entry.span);
            return;
        }
        Relationship rel;
        rel.kind = kind;
        rel.name = entry.name.name;
        rel.span = entry.name.span;

        auto endpoints = meta::endpoint_fields(cat, kind);
        auto endpoint = [&](const std::string& n) -> const rel::FieldDecl* {
            for (const auto& f : endpoints)
                if (f.name == n) return &f;
            return nullptr;
        };
        bool wp = whole_part_kind(kind);

        for (const auto& assign : entry.fields) {
            if (assign.field == "expect") {
                if (!structure_kind(kind)) {
                    error("kind-mismatch", "expect tail applies only to structure relationships",
                          assign.span);
                    continue;
                }
                rel.expect_tail = assign.number;
                continue;
            }
            const rel::FieldDecl* fd = endpoint(assign.field);
            if (!fd) {
                error("kind-mismatch",
                      "field '" + assign.field + "' does not apply to " + entry.keyword +
                          " relationships",
                      assign.span);
                continue;
            }
            if (assign.field == "tail") {
                for (const auto& v : assign.values)
                    if (auto r = resolve_endpoint(d, rel, "tail", fd->target, wp, v))
                        rel.tail.push_back(std::move(*r));
                continue;
            }
            auto r = resolve_endpoint(d, rel, assign.field, fd->target, wp && assign.field == "head",
                                      assign.values.front());
            if (!r) continue;
            if (assign.field == "head") rel.head = std::move(*r);
            else if (assign.field == "tact") rel.tact = std::move(*r);
            else if (assign.field == "user") rel.user = std::move(*r);
            else if (assign.field == "source") rel.source = std::move(*r);
            else if (assign.field == "target") rel.target = std::move(*r);
        }

        // multiplicity-one endpoints must be present
        for (const auto& f : endpoints) {
            if (f.mult != rel::Mult::One) continue;
            bool present = (f.name == "head" && rel.head) || (f.name == "tact" && rel.tact) ||
                           (f.name == "user" && rel.user) || (f.name == "source" && rel.source) ||
                           (f.name == "target" && rel.target);
            if (!present) {
                bool assigned = std::any_of(entry.fields.begin(), entry.fields.end(),
                                            [&](const FieldAssign& a) { return a.field == f.name; });
                if (!assigned)
                    error("missing-field",
                          entry.keyword + " " + rel.name + " is missing field '" + f.name + "'",
                          entry.span);
                return;  // unresolved endpoint already reported
            }
        }
        d.relationships.push_back(std::move(rel));
    }

    Diagram resolve_diagram(const DiagramDecl& decl) {
        Diagram d;
        d.kind = diagram_kind_of.at(decl.kindword);
        d.name = decl.name.name;
        d.span = decl.name.span;
        for (const auto& entry : decl.nodes) {
            const std::string& kind = element_kind_of.at(entry.keyword);
            if (!meta::element_field(cat, d.kind, kind)) {
                error("kind-mismatch",
                      "diagram kind " + d.kind + " does not hold " + entry.keyword + " elements",
                      entry.span);
                continue;
            }
            for (const auto& n : entry.names) d.elements.push_back({kind, n.name, n.span});
        }
        for (const auto& entry : decl.rels) resolve_relationship(d, entry);
        return d;
    }

    ModelRef resolve_model(const ModelDecl& decl, const Workspace& ws) {
        ModelRef m;
        m.kind = model_kind_of.at(decl.kindword);
        m.name = decl.name.name;
        m.span = decl.name.span;
        std::string want_kind = meta::diagram_kind_for_model(cat, m.kind);
        std::set<std::string> seen;
        for (const auto& ref : decl.diagrams) {
            const Diagram* d = ws.find_diagram(ref.name);
            if (!d) {
                error("unknown-name", "model " + m.name + " references missing diagram '" +
                                          ref.name + "'",
                      ref.span);
                continue;
            }
            if (d->kind != want_kind) {
                error("wrong-diagram-kind-in-model",
                      "model " + m.name + " is " + m.kind + " but diagram " + ref.name + " is " +
                          d->kind,
                      ref.span);
                continue;
            }
            if (seen.insert(ref.name).second) m.diagrams.push_back(ref.name);
        }
        for (const auto& s : decl.shared) {
            const std::string& kind = element_kind_of.at(s.keyword);
            if (!meta::element_field(cat, want_kind, kind)) {
                error("kind-mismatch",
                      "shared " + s.keyword + " does not apply to " + decl.kindword + " models",
                      s.span);
                continue;
            }
            SharedExpectation exp;
            exp.kind = kind;
            exp.span = s.span;
            for (const auto& n : s.names) exp.names.push_back(n.name);
            std::sort(exp.names.begin(), exp.names.end());
            exp.names.erase(std::unique(exp.names.begin(), exp.names.end()), exp.names.end());
            m.shared.push_back(std::move(exp));
        }
        return m;
    }

    SystemRef resolve_system(const SystemDecl& decl, const Workspace& ws) {
        SystemRef s;
        s.name = decl.name.name;
        s.span = decl.name.span;
        std::set<std::string> seen;
        for (const auto& ref : decl.models) {
            if (!ws.find_model(ref.name)) {
                error("unknown-name", "system " + s.name + " references missing model '" +
                                          ref.name + "'",
                      ref.span);
                continue;
            }
            if (seen.insert(ref.name).second) s.models.push_back(ref.name);
        }
        return s;
    }
};

} // namespace

ResolveResult resolve(const std::vector<SourceDocument>& docs, const meta::MetamodelCatalog& cat) {
    Resolver r{cat, {}};
    ResolveResult result;

    // cross-document name collisions (the parser checks within one document)
    std::set<std::string> seen;
    auto check_name = [&](const NameRef& n, const std::string& filename) {
        if (!seen.insert(n.name).second) {
            Span s = n.span;
            if (s.file.empty()) s.file = filename;
            r.error("duplicate-name", "duplicate top-level name '" + n.name + "'", s);
            return false;
        }
        return true;
    };

    for (const auto& doc : docs)
        for (const auto& d : doc.diagrams)
            if (check_name(d.name, doc.filename))
                result.workspace.diagrams.push_back(r.resolve_diagram(d));
    for (const auto& doc : docs)
        for (const auto& m : doc.models)
            if (check_name(m.name, doc.filename))
                result.workspace.models.push_back(r.resolve_model(m, result.workspace));
    for (const auto& doc : docs)
        for (const auto& s : doc.systems)
            if (check_name(s.name, doc.filename))
                result.workspace.systems.push_back(r.resolve_system(s, result.workspace));

    result.errors = std::move(r.errors);
    return result;
}

ResolveResult resolve(const SourceDocument& doc, const meta::MetamodelCatalog& cat) {
    return resolve(std::vector<SourceDocument>{doc}, cat);
}

} // namespace disco::dsl
