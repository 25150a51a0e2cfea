#include "disco/metamodel.hpp"

namespace disco::meta {

using namespace rel;

namespace {

SignatureDecl sig_decl(std::string name, bool abstract, std::string parent,
                       std::vector<FieldDecl> fields = {}) {
    return SignatureDecl{std::move(name), abstract, std::move(parent), std::move(fields)};
}

FieldDecl fd(std::string owner, std::string name, std::string target, Mult m,
             std::string exclude = {}) {
    return FieldDecl{std::move(name), std::move(owner), std::move(target), m, std::move(exclude)};
}

// node endpoints of a structure relationship expression
ExprPtr endpoints(ExprPtr s) {
    // build each side separately: argument evaluation order is unspecified,
    // so moving s inside one argument of a single call would race the copy
    ExprPtr heads = join(s, field("Structure.head"));
    ExprPtr tails = join(std::move(s), field("Structure.tail"));
    return unite(std::move(heads), std::move(tails));
}

// all composition relationships reachable from model m through its member
// diagrams (only task-structure and data diagrams carry structure fields)
ExprPtr model_comps(ExprPtr m) {
    return unite(join(join(m, field("TaskStModel.tm")), field("TaskStDiagramView.comp")),
                 join(join(m, field("DataModel.dm")), field("DataDiagramView.comp")));
}

ExprPtr model_gens(ExprPtr m) {
    return unite(join(join(m, field("TaskStModel.tm")), field("TaskStDiagramView.gen")),
                 join(join(m, field("DataModel.dm")), field("DataDiagramView.gen")));
}

// head/tail restricted to the structure set c, then composed into the
// whole-to-part relation over nodes
ExprPtr whole_part(ExprPtr structures) {
    ExprPtr restrict_dom = product(std::move(structures), sig("Node"));
    ExprPtr h = intersect(field("Structure.head"), restrict_dom);
    ExprPtr t = intersect(field("Structure.tail"), restrict_dom);
    return join(transpose(std::move(h)), std::move(t));
}

std::vector<std::pair<std::string, FormulaPtr>> build_facts() {
    std::vector<std::pair<std::string, FormulaPtr>> facts;

    // F1 aggregation homogeneity: endpoints are all tasks or all objects
    facts.emplace_back("F1", all("a", sig("Aggregation"),
                                 disj(in(endpoints(var("a")), sig("Task")),
                                      in(endpoints(var("a")), sig("Object")))));

    // F2 no self-part
    facts.emplace_back("F2", all("s", sig("Structure"),
                                 card(intersect(join(var("s"), field("Structure.head")),
                                                join(var("s"), field("Structure.tail"))),
                                      CardOp::Eq, 0)));

    // F3 composition acyclicity per model
    facts.emplace_back("F3", all("m", sig("Model"), acyclic(whole_part(model_comps(var("m"))))));

    // F4 unique ownership: no node in the tail of two distinct compositions
    // of the same model
    facts.emplace_back(
        "F4", all("m", sig("Model"),
                  all("c", model_comps(var("m")),
                      all("d", model_comps(var("m")),
                          implies(negate(equal(var("c"), var("d"))),
                                  card(intersect(join(var("c"), field("Structure.tail")),
                                                 join(var("d"), field("Structure.tail"))),
                                       CardOp::Eq, 0))))));

    // F5 generalisation acyclicity per model
    facts.emplace_back("F5", all("m", sig("Model"), acyclic(whole_part(model_gens(var("m"))))));

    // F6 diagram containment: relationship endpoints live in the declaring
    // diagram's element sets
    ExprPtr ts_nodes = unite(unite(join(var("v"), field("TaskStDiagramView.task")),
                                   join(var("v"), field("TaskStDiagramView.goal"))),
                             unite(join(var("v"), field("TaskStDiagramView.actor")),
                                   join(var("v"), field("TaskStDiagramView.obj"))));
    ExprPtr ts_structs = unite(unite(join(var("v"), field("TaskStDiagramView.gen")),
                                     join(var("v"), field("TaskStDiagramView.real"))),
                               unite(join(var("v"), field("TaskStDiagramView.agg")),
                                     join(var("v"), field("TaskStDiagramView.comp"))));
    FormulaPtr f6_ts = all(
        "v", sig("TaskStDiagramView"),
        conj(all("r", ts_structs, in(endpoints(var("r")), ts_nodes)),
             all("p", join(var("v"), field("TaskStDiagramView.parti")),
                 in(unite(join(var("p"), field("Participation.tact")),
                          join(var("p"), field("Participation.user"))),
                    ts_nodes))));
    ExprPtr data_structs = unite(unite(join(var("v"), field("DataDiagramView.gen")),
                                       join(var("v"), field("DataDiagramView.real"))),
                                 unite(join(var("v"), field("DataDiagramView.agg")),
                                       join(var("v"), field("DataDiagramView.comp"))));
    FormulaPtr f6_data = all("v", sig("DataDiagramView"),
                             all("r", data_structs,
                                 in(endpoints(var("r")), join(var("v"), field("DataDiagramView.cls")))));
    facts.emplace_back("F6", conj(f6_ts, f6_data));

    // F7 at most one model of each kind per system
    std::vector<FormulaPtr> per_kind;
    for (const char* kind : {"TaskStModel", "DataModel", "TaskFlowModel", "StateModel", "CollabModel"})
        per_kind.push_back(card(intersect(join(var("s"), field("System.models")), sig(kind)),
                                CardOp::Le, 1));
    facts.emplace_back("F7", all("s", sig("System"), conj_all(per_kind)));

    // F8 non-empty tail
    facts.emplace_back("F8", all("s", sig("Structure"),
                                 card(join(var("s"), field("Structure.tail")), CardOp::Ge, 1)));

    return facts;
}

Spec build_spec() {
    std::vector<SignatureDecl> sigs;

    sigs.push_back(sig_decl("Node", true, ""));
    sigs.push_back(sig_decl("StateAndTask", true, "Node"));
    sigs.push_back(sig_decl("State", false, "StateAndTask"));
    sigs.push_back(sig_decl("TaskActivity", true, "StateAndTask"));
    sigs.push_back(sig_decl("Task", false, "TaskActivity"));
    sigs.push_back(sig_decl("Actor", false, "Node"));
    sigs.push_back(sig_decl("Goal", false, "Node"));
    sigs.push_back(sig_decl("Object", false, "Node"));
    sigs.push_back(sig_decl("AssociationClass", false, "Object"));

    sigs.push_back(sig_decl("Relationship", true, ""));
    sigs.push_back(sig_decl("Structure", true, "Relationship",
                            {fd("Structure", "head", "Node", Mult::One),
                             fd("Structure", "tail", "Node", Mult::Set)}));
    sigs.push_back(sig_decl("Generalisation", false, "Structure"));
    sigs.push_back(sig_decl("Realisation", false, "Structure"));
    sigs.push_back(sig_decl("Aggregation", false, "Structure"));
    sigs.push_back(sig_decl("Composition", false, "Aggregation"));
    sigs.push_back(sig_decl("Participation", false, "Relationship",
                            {fd("Participation", "tact", "Task", Mult::One),
                             fd("Participation", "user", "Actor", Mult::One)}));
    sigs.push_back(sig_decl("Transition", false, "Relationship",
                            {fd("Transition", "source", "StateAndTask", Mult::One),
                             fd("Transition", "target", "StateAndTask", Mult::One)}));

    // skeleton roots for the out-of-scope diagram families
    sigs.push_back(sig_decl("TaskFlowElement", true, ""));
    sigs.push_back(sig_decl("Member", false, ""));

    sigs.push_back(sig_decl("DiagramView", true, ""));
    sigs.push_back(sig_decl(
        "TaskStDiagramView", false, "DiagramView",
        {fd("TaskStDiagramView", "task", "Task", Mult::Set),
         fd("TaskStDiagramView", "goal", "Goal", Mult::Set),
         fd("TaskStDiagramView", "gen", "Generalisation", Mult::Set),
         fd("TaskStDiagramView", "real", "Realisation", Mult::Set),
         fd("TaskStDiagramView", "agg", "Aggregation", Mult::Set, "Composition"),
         fd("TaskStDiagramView", "comp", "Composition", Mult::Set),
         fd("TaskStDiagramView", "actor", "Actor", Mult::Set),
         fd("TaskStDiagramView", "obj", "Object", Mult::Set, "AssociationClass"),
         fd("TaskStDiagramView", "parti", "Participation", Mult::Set)}));
    sigs.push_back(sig_decl(
        "DataDiagramView", false, "DiagramView",
        {fd("DataDiagramView", "cls", "Object", Mult::Set),
         fd("DataDiagramView", "gen", "Generalisation", Mult::Set),
         fd("DataDiagramView", "real", "Realisation", Mult::Set),
         fd("DataDiagramView", "agg", "Aggregation", Mult::Set, "Composition"),
         fd("DataDiagramView", "comp", "Composition", Mult::Set)}));
    sigs.push_back(sig_decl("TaskFlowDiagramView", false, "DiagramView"));
    sigs.push_back(sig_decl("StateDiagramView", false, "DiagramView"));
    sigs.push_back(sig_decl("CollabDiagramView", false, "DiagramView"));

    sigs.push_back(sig_decl("Model", true, ""));
    sigs.push_back(sig_decl("TaskStModel", false, "Model",
                            {fd("TaskStModel", "tm", "TaskStDiagramView", Mult::Set)}));
    sigs.push_back(sig_decl("DataModel", false, "Model",
                            {fd("DataModel", "dm", "DataDiagramView", Mult::Set)}));
    sigs.push_back(sig_decl("TaskFlowModel", false, "Model",
                            {fd("TaskFlowModel", "fm", "TaskFlowDiagramView", Mult::Set)}));
    sigs.push_back(sig_decl("StateModel", false, "Model",
                            {fd("StateModel", "sm", "StateDiagramView", Mult::Set)}));
    sigs.push_back(sig_decl("CollabModel", false, "Model",
                            {fd("CollabModel", "cm", "CollabDiagramView", Mult::Set)}));

    sigs.push_back(sig_decl("System", false, "",
                            {fd("System", "models", "Model", Mult::Set)}));

    return Spec(std::move(sigs), build_facts());
}

void self_check(const MetamodelCatalog& cat) {
    auto expect = [](bool ok, const char* what) {
        if (!ok) throw MetamodelError("internal", std::string("metamodel self-check failed: ") + what);
    };
    expect(cat.spec.roots().size() == 7, "seven forest roots");
    for (const auto& [id, f] : cat.spec.facts()) validate_formula(cat.spec, *f);
    expect(cat.spec.facts().size() == 8 && cat.rule_index.size() == 8, "facts F1..F8 present");
    expect(cat.spec.conforms("Composition", "Aggregation"), "Composition under Aggregation");
    expect(cat.spec.conforms("Task", "Node") && !cat.spec.conforms("Task", "Relationship"),
           "Task placement");
    expect(cat.spec.conforms("AssociationClass", "Object"), "AssociationClass under Object");
    expect(cat.spec.signature(cat.spec.sig_index_checked("Node")).parent.empty(), "Node is a root");
}

} // namespace

const std::string& MetamodelCatalog::rule_text(const std::string& id) const {
    for (const auto& [rid, text] : rule_index)
        if (rid == id) return text;
    throw MetamodelError("unknown-rule", "unknown rule id: " + id);
}

MetamodelCatalog declare_metamodel() {
    MetamodelCatalog cat;
    cat.spec = build_spec();
    cat.rule_index = {
        {"F1", "aggregation homogeneity: an aggregation relates only tasks or only objects"},
        {"F2", "no self-part: a structure never lists its head among its tail"},
        {"F3", "composition acyclicity: a model's whole-to-part composition relation has no cycle"},
        {"F4", "unique ownership: no element is a composition part of two wholes in one model"},
        {"F5", "generalisation acyclicity: a model's generalisation relation has no cycle"},
        {"F6", "diagram containment: relationship endpoints belong to the declaring diagram"},
        {"F7", "model multiplicity: a system holds at most one model of each kind"},
        {"F8", "non-empty tail: every structure relates at least one dependent element"},
    };
    self_check(cat);
    return cat;
}

bool conforms(const std::string& kind, const std::string& ancestor, const MetamodelCatalog& cat) {
    if (cat.spec.sig_index(kind) < 0)
        throw MetamodelError("unknown-signature", "unknown signature: " + kind);
    if (cat.spec.sig_index(ancestor) < 0)
        throw MetamodelError("unknown-signature", "unknown signature: " + ancestor);
    return cat.spec.conforms(kind, ancestor);
}

std::vector<rel::FieldDecl> diagram_fields(const std::string& diagram_kind,
                                           const MetamodelCatalog& cat) {
    int s = cat.spec.sig_index(diagram_kind);
    if (s < 0)
        throw MetamodelError("unknown-signature", "unknown signature: " + diagram_kind);
    const auto& decl = cat.spec.signature(s);
    if (decl.is_abstract || !cat.spec.conforms(diagram_kind, "DiagramView"))
        throw MetamodelError("not-a-diagram-kind",
                             diagram_kind + " is not a concrete diagram kind");
    return decl.fields;
}

namespace {

std::optional<rel::FieldDecl> field_accepting(const MetamodelCatalog& cat,
                                              const std::string& diagram_kind,
                                              const std::string& kind,
                                              const std::string& family) {
    if (!conforms(kind, family, cat)) return std::nullopt;
    for (const auto& f : diagram_fields(diagram_kind, cat)) {
        if (!cat.spec.conforms(f.target, family)) continue;
        if (!cat.spec.conforms(kind, f.target)) continue;
        if (!f.exclude.empty() && cat.spec.conforms(kind, f.exclude)) continue;
        return f;
    }
    return std::nullopt;
}

} // namespace

std::optional<rel::FieldDecl> element_field(const MetamodelCatalog& cat,
                                            const std::string& diagram_kind,
                                            const std::string& element_kind) {
    return field_accepting(cat, diagram_kind, element_kind, "Node");
}

std::optional<rel::FieldDecl> relationship_field(const MetamodelCatalog& cat,
                                                 const std::string& diagram_kind,
                                                 const std::string& relationship_kind) {
    return field_accepting(cat, diagram_kind, relationship_kind, "Relationship");
}

rel::FieldDecl model_member_field(const MetamodelCatalog& cat, const std::string& model_kind) {
    int s = cat.spec.sig_index(model_kind);
    if (s < 0) throw MetamodelError("unknown-signature", "unknown signature: " + model_kind);
    const auto& decl = cat.spec.signature(s);
    if (decl.is_abstract || !cat.spec.conforms(model_kind, "Model") || decl.fields.size() != 1)
        throw MetamodelError("not-a-model-kind", model_kind + " is not a concrete model kind");
    return decl.fields.front();
}

std::string diagram_kind_for_model(const MetamodelCatalog& cat, const std::string& model_kind) {
    return model_member_field(cat, model_kind).target;
}

std::string model_kind_for_diagram(const MetamodelCatalog& cat, const std::string& diagram_kind) {
    for (const auto& s : cat.spec.signatures()) {
        if (s.is_abstract || !cat.spec.conforms(s.name, "Model")) continue;
        if (s.fields.size() == 1 && s.fields.front().target == diagram_kind) return s.name;
    }
    throw MetamodelError("not-a-diagram-kind", diagram_kind + " has no owning model kind");
}

std::vector<rel::FieldDecl> endpoint_fields(const MetamodelCatalog& cat,
                                            const std::string& relationship_kind) {
    if (!conforms(relationship_kind, "Relationship", cat))
        throw MetamodelError("unknown-signature",
                             relationship_kind + " is not a relationship kind");
    std::vector<rel::FieldDecl> out;
    int s = cat.spec.sig_index_checked(relationship_kind);
    // walk up the parent chain collecting inherited endpoint fields
    for (int cur = s; cur >= 0;) {
        const auto& decl = cat.spec.signature(cur);
        out.insert(out.begin(), decl.fields.begin(), decl.fields.end());
        cur = decl.parent.empty() ? -1 : cat.spec.sig_index(decl.parent);
    }
    return out;
}

} // namespace disco::meta
