#include "disco/render.hpp"

#include <functional>
#include <sstream>

#include <json.hpp>

namespace disco::render {

using check::CheckVerdict;
using check::Finding;
using check::MergedModel;
using check::Report;
using nlohmann::json;

namespace {

std::string span_str(const Span& s) {
    return s.file + ":" + std::to_string(s.line) + ":" + std::to_string(s.col);
}

std::string join(const std::vector<std::string>& xs, const char* sep = ", ") {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += sep;
        out += xs[i];
    }
    return out;
}

std::string indent_block(const std::string& text, const std::string& pad) {
    std::istringstream in(text);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) out << pad << line << "\n";
    return out.str();
}

std::string rel_line(const Relationship& r) {
    std::vector<std::string> parts;
    if (r.head) parts.push_back("head " + r.head->name);
    if (!r.tail.empty()) {
        std::vector<std::string> t;
        for (const auto& e : r.tail) t.push_back(e.name);
        parts.push_back("tail {" + join(t) + "}");
    }
    if (r.tact) parts.push_back("tact " + r.tact->name);
    if (r.user) parts.push_back("user " + r.user->name);
    if (r.source) parts.push_back("source " + r.source->name);
    if (r.target) parts.push_back("target " + r.target->name);
    if (r.expect_tail) parts.push_back("expect " + std::to_string(*r.expect_tail));
    std::string s = r.kind + " " + r.name;
    if (!parts.empty()) s += ": " + join(parts);
    return s;
}

void emit_findings(std::ostringstream& out, const std::vector<Finding>& fs,
                   const std::string& pad) {
    if (fs.empty()) {
        out << pad << "findings: none\n";
        return;
    }
    out << pad << "findings:\n";
    for (const auto& f : fs) {
        out << pad << "  " << f.rule << ": " << f.message;
        if (!f.elements.empty()) out << " [" << join(f.elements) << "]";
        if (f.span) out << " (" << span_str(*f.span) << ")";
        out << "\n";
    }
}

void emit_diagram(std::ostringstream& out, const Diagram& d, const std::string& pad) {
    out << pad << "diagram " << d.name << " [" << d.kind << "]\n";
    for (const auto& e : d.elements) out << pad << "  " << e.kind << " " << e.name << "\n";
    for (const auto& r : d.relationships) out << pad << "  " << rel_line(r) << "\n";
}

std::string nonzero_scope(const rel::Scope& s) {
    std::vector<std::string> parts;
    for (const auto& [name, n] : s.counts)
        if (n) parts.push_back(name + "=" + std::to_string(n));
    return "{" + join(parts) + "}";
}

const char* outcome_word(check::SolverOutcome o) {
    switch (o) {
    case check::SolverOutcome::UniqueInstance: return "unique-instance";
    case check::SolverOutcome::NoInstance: return "no-instance";
    case check::SolverOutcome::MultipleInstances: return "multiple-instances";
    default: return "budget-exceeded";
    }
}

json finding_json(const Finding& f) {
    json j;
    j["rule"] = f.rule;
    j["message"] = f.message;
    j["elements"] = f.elements;
    j["span"] = f.span ? json(span_str(*f.span)) : json(nullptr);
    return j;
}

json report_obj(const Report& r) {
    json j;
    j["level"] = r.level;
    j["subject"] = r.subject;
    j["verdict"] = verdict_word(r.verdict);
    j["findings"] = json::array();
    for (const auto& f : r.findings) j["findings"].push_back(finding_json(f));
    if (r.scope) {
        json sc = json::object();
        for (const auto& [name, n] : r.scope->counts) sc[name] = n;
        j["scope"] = sc;
    }
    j["timing_ms"] = r.timing_ms;
    return j;
}

json scope_obj(const rel::Scope& s) {
    json sc = json::object();
    for (const auto& [name, n] : s.counts) sc[name] = n;
    return sc;
}

} // namespace

std::string verdict_word(CheckVerdict v) {
    switch (v) {
    case CheckVerdict::Valid: return "valid";
    case CheckVerdict::Invalid: return "invalid";
    default: return "budget-exceeded";
    }
}

std::string report_text(const Report& r) {
    std::ostringstream out;
    if (r.level == "system") {
        out << "system " << r.subject << ": " << verdict_word(r.verdict) << "\n";
        for (const auto& child : r.children) out << indent_block(report_text(child), "  ");
        std::vector<Finding> own;
        for (const auto& f : r.findings)
            if (f.rule == "F7") own.push_back(f);
        emit_findings(out, own, "  ");
        return out.str();
    }
    const MergedModel* mm = r.structure.get();
    if (r.level == "diagram") {
        out << "diagram " << r.subject;
        if (mm && !mm->member_diagrams.empty())
            out << " [" << mm->member_diagrams.front().kind << "]";
        out << ": " << verdict_word(r.verdict) << "\n";
        if (mm && !mm->member_diagrams.empty()) {
            const Diagram& d = mm->member_diagrams.front();
            for (const auto& e : d.elements) out << "  " << e.kind << " " << e.name << "\n";
            for (const auto& rel : d.relationships) out << "  " << rel_line(rel) << "\n";
        }
        emit_findings(out, r.findings, "  ");
        return out.str();
    }
    out << "model " << r.subject;
    if (mm && !mm->model_kind.empty()) out << " [" << mm->model_kind << "]";
    out << ": " << verdict_word(r.verdict) << "\n";
    if (mm) {
        for (const auto& d : mm->member_diagrams) emit_diagram(out, d, "  ");
        for (const auto& ex : mm->shared_expect)
            out << "  shared " << ex.kind << ": " << join(ex.names) << "\n";
    }
    emit_findings(out, r.findings, "  ");
    return out.str();
}

std::string reports_text(const std::vector<Report>& rs) {
    std::string out;
    for (std::size_t i = 0; i < rs.size(); ++i) {
        if (i) out += "\n";
        out += report_text(rs[i]);
    }
    return out;
}

std::string report_json(const Report& r) { return report_obj(r).dump(2) + "\n"; }

std::string reports_json(const std::vector<Report>& rs) {
    if (rs.size() == 1) return report_json(rs.front());
    json arr = json::array();
    for (const auto& r : rs) arr.push_back(report_obj(r));
    return arr.dump(2) + "\n";
}

std::string report_dot(const Report& r) {
    if (r.level == "system") {
        std::string out;
        for (const auto& child : r.children) out += report_dot(child);
        return out;
    }
    std::ostringstream out;
    out << "digraph \"" << r.subject << "\" {\n  node [shape=box];\n";
    const MergedModel* mm = r.structure.get();
    if (mm) {
        for (const auto& e : mm->elements)
            out << "  \"" << e.kind << ":" << e.name << "\" [label=\"" << e.name << "\"];\n";
        auto id = [&](const ElementRef& ref) -> std::string {
            if (!mm->find_element(ref)) return {};
            return "\"" + ref.kind + ":" + ref.name + "\"";
        };
        for (const auto& mr : mm->relationships) {
            const Relationship& rel = mr.rel;
            if (rel.head) {
                std::string h = id(*rel.head);
                for (const auto& t : rel.tail) {
                    std::string p = id(t);
                    if (!h.empty() && !p.empty())
                        out << "  " << h << " -> " << p << " [label=\"" << rel.name << "\"];\n";
                }
            }
            if (rel.user && rel.tact) {
                std::string u = id(*rel.user), t = id(*rel.tact);
                if (!u.empty() && !t.empty())
                    out << "  " << u << " -> " << t << " [label=\"" << rel.name
                        << "\", style=dashed];\n";
            }
            if (rel.source && rel.target) {
                std::string s = id(*rel.source), t = id(*rel.target);
                if (!s.empty() && !t.empty())
                    out << "  " << s << " -> " << t << " [label=\"" << rel.name
                        << "\", style=dotted];\n";
            }
        }
    }
    out << "}\n";
    return out.str();
}

namespace {

// reading order: models, diagrams, relationships, nodes, then the
// remaining roots; within a root, declaration-order depth-first
std::vector<std::string> scope_order(const rel::Spec& spec) {
    std::vector<std::string> out;
    std::vector<bool> seen(spec.signatures().size(), false);
    std::function<void(int)> walk = [&](int i) {
        if (seen[i]) return;
        seen[i] = true;
        out.push_back(spec.signature(i).name);
        for (int c : spec.children(i)) walk(c);
    };
    for (const char* root : {"Model", "DiagramView", "Relationship", "Node",
                             "TaskFlowElement", "Member", "System"}) {
        int i = spec.sig_index(root);
        if (i >= 0) walk(i);
    }
    for (int r : spec.roots()) walk(r);
    return out;
}

} // namespace

std::string scope_text(const rel::Scope& s, const meta::MetamodelCatalog& cat) {
    std::ostringstream out;
    for (const auto& name : scope_order(cat.spec))
        out << "exactly " << s.get(name) << " " << name << "\n";
    return out.str();
}

std::string scope_json(const rel::Scope& s, const meta::MetamodelCatalog& cat) {
    (void)cat;
    return scope_obj(s).dump(2) + "\n";
}

std::string verdict_text(const check::Verdict& v) {
    std::ostringstream out;
    out << "outcome: " << outcome_word(v.outcome) << "\n";
    out << "scope: " << nonzero_scope(v.encoding.scope) << "\n";
    if (!v.encoding.pinning.empty()) {
        out << "pinning:\n";
        for (const auto& [a, name] : v.encoding.pinning) out << "  " << a << " = " << name << "\n";
    }
    for (std::size_t i = 0; i < v.instances.size(); ++i) {
        out << "instance " << (i + 1) << ":\n";
        out << indent_block(v.instances[i].dump(), "  ");
    }
    return out.str();
}

std::string verdict_json(const check::Verdict& v) {
    json j;
    j["outcome"] = outcome_word(v.outcome);
    j["count"] = v.count;
    j["timing_ms"] = v.timing_ms;
    j["scope"] = scope_obj(v.encoding.scope);
    json pin = json::object();
    for (const auto& [a, name] : v.encoding.pinning) pin[a] = name;
    j["pinning"] = pin;
    j["instances"] = json::array();
    for (const auto& inst : v.instances) j["instances"].push_back(inst.dump());
    return j.dump(2) + "\n";
}

std::string suite_text(const std::vector<check::AssertionResult>& rs) {
    std::ostringstream out;
    for (const auto& r : rs) {
        out << r.id << ": " << (r.holds ? "holds" : "counterexample found");
        if (r.budget_exceeded) out << " (budget exceeded)";
        out << "\n";
        if (r.counterexample) {
            if (r.counterexample_scope)
                out << "  scope: " << nonzero_scope(*r.counterexample_scope) << "\n";
            out << indent_block(r.counterexample->dump(), "  ");
        }
    }
    return out.str();
}

std::string suite_json(const std::vector<check::AssertionResult>& rs) {
    json arr = json::array();
    for (const auto& r : rs) {
        json j;
        j["id"] = r.id;
        j["holds"] = r.holds;
        j["budget_exceeded"] = r.budget_exceeded;
        if (r.counterexample_scope) j["scope"] = scope_obj(*r.counterexample_scope);
        if (r.counterexample) j["counterexample"] = r.counterexample->dump();
        arr.push_back(j);
    }
    return arr.dump(2) + "\n";
}

} // namespace disco::render
