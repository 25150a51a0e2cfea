#include "disco/workspace.hpp"

#include <map>
#include <sstream>

namespace disco {

const Element* Diagram::find_element(std::string_view kind_, std::string_view name_) const {
    for (const auto& el : elements)
        if (el.kind == kind_ && el.name == name_) return &el;
    return nullptr;
}

const Diagram* Workspace::find_diagram(std::string_view name) const {
    for (const auto& d : diagrams)
        if (d.name == name) return &d;
    return nullptr;
}

const ModelRef* Workspace::find_model(std::string_view name) const {
    for (const auto& m : models)
        if (m.name == name) return &m;
    return nullptr;
}

const SystemRef* Workspace::find_system(std::string_view name) const {
    for (const auto& s : systems)
        if (s.name == name) return &s;
    return nullptr;
}

namespace {

bool eq(const std::optional<ElementRef>& a, const std::optional<ElementRef>& b) {
    if (a.has_value() != b.has_value()) return false;
    return !a || *a == *b;
}

bool eq(const Relationship& a, const Relationship& b) {
    return a.kind == b.kind && a.name == b.name && eq(a.head, b.head) && a.tail == b.tail &&
           eq(a.tact, b.tact) && eq(a.user, b.user) && eq(a.source, b.source) &&
           eq(a.target, b.target) && a.expect_tail == b.expect_tail;
}

bool eq(const Diagram& a, const Diagram& b) {
    if (a.kind != b.kind || a.name != b.name) return false;
    if (a.elements.size() != b.elements.size() || a.relationships.size() != b.relationships.size())
        return false;
    for (std::size_t i = 0; i < a.elements.size(); ++i)
        if (a.elements[i].kind != b.elements[i].kind || a.elements[i].name != b.elements[i].name)
            return false;
    for (std::size_t i = 0; i < a.relationships.size(); ++i)
        if (!eq(a.relationships[i], b.relationships[i])) return false;
    return true;
}

bool eq(const ModelRef& a, const ModelRef& b) {
    if (a.kind != b.kind || a.name != b.name || a.diagrams != b.diagrams) return false;
    if (a.shared.size() != b.shared.size()) return false;
    for (std::size_t i = 0; i < a.shared.size(); ++i)
        if (a.shared[i].kind != b.shared[i].kind || a.shared[i].names != b.shared[i].names)
            return false;
    return true;
}

} // namespace

bool structurally_equal(const Workspace& a, const Workspace& b) {
    if (a.diagrams.size() != b.diagrams.size() || a.models.size() != b.models.size() ||
        a.systems.size() != b.systems.size())
        return false;
    for (std::size_t i = 0; i < a.diagrams.size(); ++i)
        if (!eq(a.diagrams[i], b.diagrams[i])) return false;
    for (std::size_t i = 0; i < a.models.size(); ++i)
        if (!eq(a.models[i], b.models[i])) return false;
    for (std::size_t i = 0; i < a.systems.size(); ++i)
        if (a.systems[i].name != b.systems[i].name || a.systems[i].models != b.systems[i].models)
            return false;
    return true;
}

namespace {

const std::map<std::string, std::string> kindword_of_diagram = {
    {"TaskStDiagramView", "taskstructure"}, {"DataDiagramView", "data"},
    {"TaskFlowDiagramView", "taskflow"},    {"StateDiagramView", "state"},
    {"CollabDiagramView", "collab"}};

const std::map<std::string, std::string> kindword_of_model = {
    {"TaskStModel", "taskstructure"}, {"DataModel", "data"}, {"TaskFlowModel", "taskflow"},
    {"StateModel", "state"},          {"CollabModel", "collab"}};

const std::map<std::string, std::string> keyword_of_element = {
    {"Task", "task"},     {"Goal", "goal"},                  {"Actor", "actor"},
    {"Object", "object"}, {"AssociationClass", "assocclass"}, {"State", "state"}};

const std::map<std::string, std::string> keyword_of_rel = {
    {"Generalisation", "gen"}, {"Realisation", "real"},     {"Aggregation", "agg"},
    {"Composition", "comp"},   {"Participation", "parti"},  {"Transition", "trans"}};

void print_names(std::ostringstream& os, const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < names.size(); ++i) os << (i ? ", " : "") << names[i];
}

} // namespace

std::string print_workspace(const Workspace& ws) {
    std::ostringstream os;
    for (const auto& d : ws.diagrams) {
        os << "diagram " << kindword_of_diagram.at(d.kind) << " " << d.name << " {\n";
        // consecutive same-kind elements share one entry line
        for (std::size_t i = 0; i < d.elements.size();) {
            std::size_t j = i;
            while (j < d.elements.size() && d.elements[j].kind == d.elements[i].kind) ++j;
            os << "  " << keyword_of_element.at(d.elements[i].kind) << " ";
            for (std::size_t k = i; k < j; ++k) os << (k > i ? ", " : "") << d.elements[k].name;
            os << ";\n";
            i = j;
        }
        for (const auto& r : d.relationships) {
            os << "  " << keyword_of_rel.at(r.kind) << " " << r.name << " {";
            if (r.head) os << " head " << r.head->name << ";";
            if (!r.tail.empty()) {
                os << " tail ";
                for (std::size_t i = 0; i < r.tail.size(); ++i)
                    os << (i ? ", " : "") << r.tail[i].name;
                os << ";";
            }
            if (r.tact) os << " tact " << r.tact->name << ";";
            if (r.user) os << " user " << r.user->name << ";";
            if (r.source) os << " source " << r.source->name << ";";
            if (r.target) os << " target " << r.target->name << ";";
            if (r.expect_tail) os << " expect tail = " << *r.expect_tail << ";";
            os << " }\n";
        }
        os << "}\n";
    }
    for (const auto& m : ws.models) {
        os << "model " << kindword_of_model.at(m.kind) << " " << m.name << " {\n";
        os << "  diagrams ";
        print_names(os, m.diagrams);
        os << ";\n";
        for (const auto& s : m.shared) {
            os << "  shared " << keyword_of_element.at(s.kind) << " ";
            print_names(os, s.names);
            os << ";\n";
        }
        os << "}\n";
    }
    for (const auto& s : ws.systems) {
        os << "system " << s.name << " {\n  models ";
        print_names(os, s.models);
        os << ";\n}\n";
    }
    return os.str();
}

} // namespace disco
