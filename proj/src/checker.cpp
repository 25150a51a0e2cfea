#include "disco/checker.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "disco/eval.hpp"

namespace disco::check {

using meta::MetamodelCatalog;
using rel::CardOp;
using rel::ExprPtr;
using rel::FormulaPtr;

namespace {

std::vector<ElementRef> endpoints_of(const Relationship& r) {
    std::vector<ElementRef> out;
    if (r.head) out.push_back(*r.head);
    for (const auto& t : r.tail) out.push_back(t);
    if (r.tact) out.push_back(*r.tact);
    if (r.user) out.push_back(*r.user);
    if (r.source) out.push_back(*r.source);
    if (r.target) out.push_back(*r.target);
    return out;
}

std::vector<ElementRef> dedup_refs(const std::vector<ElementRef>& refs) {
    std::vector<ElementRef> out;
    for (const auto& r : refs)
        if (std::find(out.begin(), out.end(), r) == out.end()) out.push_back(r);
    return out;
}

int rule_rank(const std::string& rule) {
    if (rule.size() >= 2 && rule[0] == 'F') return rule[1] - '0';
    if (rule == "EXPECT") return 100;
    if (rule == "SHARED") return 101;
    if (rule == "SOLVER") return 102;
    return 103;
}

void sort_findings(std::vector<Finding>& fs) {
    std::stable_sort(fs.begin(), fs.end(), [](const Finding& a, const Finding& b) {
        int ra = rule_rank(a.rule), rb = rule_rank(b.rule);
        if (ra != rb) return ra < rb;
        if (a.elements != b.elements) return a.elements < b.elements;
        return a.message < b.message;
    });
}

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

// elements and deduplicated relationships of one member diagram folded into
// the merged tables
void absorb_diagram(MergedModel& mm, const Diagram& d,
                    std::map<std::pair<std::string, std::string>, MergedElement>& elems) {
    for (const auto& e : d.elements) {
        auto key = std::make_pair(e.kind, e.name);
        auto it = elems.find(key);
        if (it == elems.end())
            it = elems.emplace(key, MergedElement{e.kind, e.name, {}, e.span}).first;
        auto& ds = it->second.diagrams;
        if (std::find(ds.begin(), ds.end(), d.name) == ds.end()) ds.push_back(d.name);
    }
    for (const auto& r : d.relationships) {
        Relationship copy = r;
        copy.tail = dedup_refs(r.tail);
        mm.relationships.push_back(MergedRelationship{d.name, std::move(copy)});
    }
    mm.member_diagrams.push_back(d);
}

void finish_merge(MergedModel& mm,
                  std::map<std::pair<std::string, std::string>, MergedElement>& elems) {
    for (auto& [key, e] : elems) {
        std::sort(e.diagrams.begin(), e.diagrams.end());
        mm.elements.push_back(std::move(e));
    }
}

const Diagram* member_by_name(const MergedModel& mm, const std::string& name) {
    for (const auto& d : mm.member_diagrams)
        if (d.name == name) return &d;
    return nullptr;
}

std::string join_names(const std::vector<std::string>& names, const char* sep = ", ") {
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) out += sep;
        out += names[i];
    }
    return out;
}

// ---- native rule evaluation ------------------------------------------------

struct RuleContext {
    const MergedModel& mm;
    const MetamodelCatalog& cat;
    std::map<std::string, const Diagram*> diagram_by_name;
    std::map<std::pair<std::string, std::string>, int> element_index;

    explicit RuleContext(const MergedModel& m, const MetamodelCatalog& c) : mm(m), cat(c) {
        for (const auto& d : mm.member_diagrams) diagram_by_name[d.name] = &d;
        for (std::size_t i = 0; i < mm.elements.size(); ++i)
            element_index[{mm.elements[i].kind, mm.elements[i].name}] = int(i);
    }

    bool is_kind(const std::string& kind, const char* anc) const {
        return meta::conforms(kind, anc, cat);
    }
    // whether the relationship lands in a relationship field of its diagram;
    // the model-scoped facts only see relationships through those fields
    bool in_rel_field(const MergedRelationship& mr) const {
        const Diagram* d = diagram_by_name.at(mr.diagram);
        return meta::relationship_field(cat, d->kind, mr.rel.kind).has_value();
    }
    int elem(const ElementRef& ref) const {
        auto it = element_index.find({ref.kind, ref.name});
        return it == element_index.end() ? -1 : it->second;
    }
};

// names of merged elements lying on a cycle of the given structure family
std::vector<std::string> cycle_names(const RuleContext& cx, const char* family) {
    int n = int(cx.mm.elements.size());
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (const auto& mr : cx.mm.relationships) {
        if (!cx.is_kind(mr.rel.kind, family) || !cx.in_rel_field(mr)) continue;
        if (!mr.rel.head) continue;
        int u = cx.elem(*mr.rel.head);
        if (u < 0) continue;
        for (const auto& t : mr.rel.tail) {
            int v = cx.elem(t);
            if (v >= 0) reach[u][v] = true;
        }
    }
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i) {
            if (!reach[i][k]) continue;
            for (int j = 0; j < n; ++j)
                if (reach[k][j]) reach[i][j] = true;
        }
    std::vector<std::string> out;
    for (int i = 0; i < n; ++i)
        if (reach[i][i]) out.push_back(cx.mm.elements[i].name);
    return out;
}

void rule_f1(const RuleContext& cx, std::vector<Finding>& out) {
    for (const auto& mr : cx.mm.relationships) {
        if (!cx.is_kind(mr.rel.kind, "Aggregation")) continue;
        auto eps = dedup_refs(endpoints_of(mr.rel));
        if (eps.empty()) continue;
        bool task = false, object = false, other = false;
        for (const auto& ep : eps) {
            if (cx.is_kind(ep.kind, "Task")) task = true;
            else if (cx.is_kind(ep.kind, "Object")) object = true;
            else other = true;
        }
        if (!other && !(task && object)) continue;
        std::vector<std::string> names{mr.rel.name};
        std::set<std::string> eset;
        for (const auto& ep : eps) eset.insert(ep.name);
        names.insert(names.end(), eset.begin(), eset.end());
        out.push_back(Finding{"F1",
                              "'" + mr.rel.name + "' must relate only tasks or only objects",
                              std::move(names), mr.rel.span});
    }
}

void rule_f2(const RuleContext& cx, std::vector<Finding>& out) {
    for (const auto& mr : cx.mm.relationships) {
        if (!cx.is_kind(mr.rel.kind, "Structure") || !mr.rel.head) continue;
        const auto& h = *mr.rel.head;
        if (std::find(mr.rel.tail.begin(), mr.rel.tail.end(), h) == mr.rel.tail.end()) continue;
        out.push_back(Finding{"F2",
                              "'" + mr.rel.name + "' lists its head '" + h.name +
                                  "' among its tail",
                              {mr.rel.name, h.name}, mr.rel.span});
    }
}

void rule_f3(const RuleContext& cx, std::vector<Finding>& out) {
    auto cyc = cycle_names(cx, "Composition");
    if (cyc.empty()) return;
    out.push_back(Finding{"F3", "composition cycle through: " + join_names(cyc), cyc,
                          std::nullopt});
}

void rule_f4(const RuleContext& cx, std::vector<Finding>& out) {
    std::map<int, std::vector<std::string>> owners;
    for (const auto& mr : cx.mm.relationships) {
        if (!cx.is_kind(mr.rel.kind, "Composition") || !cx.in_rel_field(mr)) continue;
        for (const auto& t : mr.rel.tail) {
            int v = cx.elem(t);
            if (v >= 0) owners[v].push_back(mr.rel.name);
        }
    }
    for (const auto& [idx, rels] : owners) {
        if (rels.size() < 2) continue;
        const auto& part = cx.mm.elements[idx];
        std::vector<std::string> names{part.name};
        names.insert(names.end(), rels.begin(), rels.end());
        out.push_back(Finding{"F4",
                              "'" + part.name + "' is a composition part in " +
                                  join_names(rels, " and "),
                              std::move(names), part.span});
    }
}

void rule_f5(const RuleContext& cx, std::vector<Finding>& out) {
    auto cyc = cycle_names(cx, "Generalisation");
    if (cyc.empty()) return;
    out.push_back(Finding{"F5", "generalisation cycle through: " + join_names(cyc), cyc,
                          std::nullopt});
}

void rule_f6(const RuleContext& cx, std::vector<Finding>& out) {
    for (const auto& mr : cx.mm.relationships) {
        if (!cx.in_rel_field(mr)) continue;
        const Diagram* d = cx.diagram_by_name.at(mr.diagram);
        for (const auto& ep : endpoints_of(mr.rel)) {
            bool placed = meta::element_field(cx.cat, d->kind, ep.kind).has_value() &&
                          d->find_element(ep.kind, ep.name) != nullptr;
            if (placed) continue;
            std::vector<std::string> names{mr.rel.name};
            if (cx.elem(ep) >= 0) names.push_back(ep.name);
            names.push_back(d->name);
            out.push_back(Finding{"F6",
                                  "endpoint '" + ep.name + "' of '" + mr.rel.name +
                                      "' is not an element of diagram '" + d->name + "'",
                                  std::move(names), mr.rel.span});
        }
    }
}

void rule_f8(const RuleContext& cx, std::vector<Finding>& out) {
    for (const auto& mr : cx.mm.relationships) {
        if (!cx.is_kind(mr.rel.kind, "Structure") || !mr.rel.tail.empty()) continue;
        out.push_back(
            Finding{"F8", "'" + mr.rel.name + "' has an empty tail", {mr.rel.name}, mr.rel.span});
    }
}

void rule_expect(const RuleContext& cx, std::vector<Finding>& out) {
    for (const auto& mr : cx.mm.relationships) {
        if (!mr.rel.expect_tail) continue;
        long got = long(mr.rel.tail.size());
        if (*mr.rel.expect_tail == got) continue;
        std::ostringstream msg;
        msg << "'" << mr.rel.name << "' expects " << *mr.rel.expect_tail
            << " tail elements, found " << got;
        out.push_back(Finding{"EXPECT", msg.str(), {mr.rel.name}, mr.rel.span});
    }
}

void rule_shared(const RuleContext& cx, std::vector<Finding>& out) {
    if (cx.mm.shared_expect.empty()) return;
    std::map<std::string, std::set<std::string>> declared;
    std::map<std::string, Span> where;
    for (const auto& ex : cx.mm.shared_expect) {
        declared[ex.kind].insert(ex.names.begin(), ex.names.end());
        where.emplace(ex.kind, ex.span);
    }
    std::string diagram_kind =
        cx.mm.member_diagrams.empty() ? std::string() : cx.mm.member_diagrams.front().kind;
    for (const auto& [kind, names] : declared) {
        std::set<std::string> actual;
        bool visible = !diagram_kind.empty() &&
                       meta::element_field(cx.cat, diagram_kind, kind).has_value();
        if (visible)
            for (const auto& e : cx.mm.elements)
                if (e.kind == kind && e.diagrams.size() >= 2) actual.insert(e.name);
        if (actual == names) continue;
        std::vector<std::string> elems;
        for (const auto& n : names)
            if (cx.element_index.count({kind, n})) elems.push_back(n);
        for (const auto& n : actual)
            if (!std::count(elems.begin(), elems.end(), n)) elems.push_back(n);
        std::sort(elems.begin(), elems.end());
        if (elems.empty())
            for (const auto& d : cx.mm.member_diagrams) elems.push_back(d.name);
        if (elems.empty()) elems.push_back(cx.mm.name);
        std::ostringstream msg;
        msg << "declared shared " << kind << " {"
            << join_names({names.begin(), names.end()}) << "} but the diagrams share {"
            << join_names({actual.begin(), actual.end()}) << "}";
        out.push_back(Finding{"SHARED", msg.str(), std::move(elems), where.at(kind)});
    }
}

std::vector<Finding> run_rules(const MergedModel& mm, const MetamodelCatalog& cat,
                               const CheckOptions& opts, bool model_rules) {
    RuleContext cx(mm, cat);
    std::vector<Finding> out;
    rule_f1(cx, out);
    rule_f2(cx, out);
    if (model_rules) {
        rule_f3(cx, out);
        rule_f4(cx, out);
        if (opts.enable_f5) rule_f5(cx, out);
    }
    rule_f6(cx, out);
    if (opts.enable_f8) rule_f8(cx, out);
    rule_expect(cx, out);
    rule_shared(cx, out);
    sort_findings(out);
    return out;
}

} // namespace

const MergedElement* MergedModel::find_element(const ElementRef& ref) const {
    auto it = std::lower_bound(elements.begin(), elements.end(), ref,
                               [](const MergedElement& e, const ElementRef& r) {
                                   return e.kind != r.kind ? e.kind < r.kind : e.name < r.name;
                               });
    if (it == elements.end() || it->kind != ref.kind || it->name != ref.name) return nullptr;
    return &*it;
}

MergedModel merge_diagram(const Diagram& d) {
    MergedModel mm;
    mm.name = d.name;
    std::map<std::pair<std::string, std::string>, MergedElement> elems;
    absorb_diagram(mm, d, elems);
    finish_merge(mm, elems);
    return mm;
}

MergedModel merge_model(const ModelRef& m, const Workspace& ws, const MetamodelCatalog& cat) {
    MergedModel mm;
    mm.model_kind = m.kind;
    mm.name = m.name;
    mm.shared_expect = m.shared;
    std::string want = meta::diagram_kind_for_model(cat, m.kind);
    std::map<std::pair<std::string, std::string>, MergedElement> elems;
    for (const auto& dname : m.diagrams) {
        const Diagram* d = ws.find_diagram(dname);
        if (!d)
            throw std::invalid_argument("model '" + m.name + "' references unknown diagram '" +
                                        dname + "'");
        if (d->kind != want)
            throw std::invalid_argument("model '" + m.name + "' needs " + want +
                                        " members, diagram '" + dname + "' is a " + d->kind);
        absorb_diagram(mm, *d, elems);
    }
    finish_merge(mm, elems);
    return mm;
}

Report check_diagram(const Diagram& d, const MetamodelCatalog& cat, const CheckOptions& opts) {
    auto t0 = std::chrono::steady_clock::now();
    MergedModel mm = merge_diagram(d);
    Report r;
    r.level = "diagram";
    r.subject = d.name;
    r.findings = run_rules(mm, cat, opts, opts.degenerate_diagram_rules);
    r.verdict = r.findings.empty() ? CheckVerdict::Valid : CheckVerdict::Invalid;
    r.structure = std::make_shared<MergedModel>(std::move(mm));
    r.timing_ms = ms_since(t0);
    return r;
}

Report check_model(const MergedModel& mm, const MetamodelCatalog& cat, const CheckOptions& opts) {
    auto t0 = std::chrono::steady_clock::now();
    Report r;
    r.level = "model";
    r.subject = mm.name;
    r.findings = run_rules(mm, cat, opts, true);
    r.verdict = r.findings.empty() ? CheckVerdict::Valid : CheckVerdict::Invalid;
    r.structure = std::make_shared<MergedModel>(mm);
    r.timing_ms = ms_since(t0);
    return r;
}

Report check_system(const SystemRef& s, const Workspace& ws, const MetamodelCatalog& cat,
                    const CheckOptions& opts) {
    auto t0 = std::chrono::steady_clock::now();
    Report r;
    r.level = "system";
    r.subject = s.name;
    std::map<std::string, std::vector<std::string>> by_kind;
    for (const auto& mname : s.models) {
        const ModelRef* m = ws.find_model(mname);
        if (!m)
            throw std::invalid_argument("system '" + s.name + "' references unknown model '" +
                                        mname + "'");
        by_kind[m->kind].push_back(m->name);
        r.children.push_back(check_model(merge_model(*m, ws, cat), cat, opts));
    }
    for (const auto& [kind, names] : by_kind) {
        if (names.size() < 2) continue;
        std::ostringstream msg;
        msg << "system holds " << names.size() << " " << kind << " models: " << join_names(names);
        r.findings.push_back(Finding{"F7", msg.str(), names, s.span});
    }
    for (const auto& child : r.children)
        for (const auto& f : child.findings)
            r.findings.push_back(Finding{f.rule, "in model '" + child.subject + "': " + f.message,
                                         f.elements, f.span});
    r.verdict = r.findings.empty() ? CheckVerdict::Valid : CheckVerdict::Invalid;
    r.timing_ms = ms_since(t0);
    return r;
}

rel::Scope scope_from_exact_counts(const MetamodelCatalog& cat,
                                   const std::vector<std::pair<std::string, long>>& exact) {
    rel::Scope s;
    for (const auto& sigd : cat.spec.signatures()) s.set(sigd.name, 0);
    for (const auto& [kind, n] : exact) {
        int idx = cat.spec.sig_index(kind);
        if (idx < 0) throw rel::ScopeError("unknown signature in scope: " + kind);
        for (int cur = idx; cur >= 0;) {
            const auto& decl = cat.spec.signature(cur);
            s.counts[decl.name] += n;
            cur = decl.parent.empty() ? -1 : cat.spec.sig_index(decl.parent);
        }
    }
    return s;
}

rel::Scope compute_scope(const MergedModel& mm, const MetamodelCatalog& cat) {
    std::map<std::string, long> cnt;
    for (const auto& e : mm.elements) cnt[e.kind]++;
    for (const auto& mr : mm.relationships) cnt[mr.rel.kind]++;
    for (const auto& d : mm.member_diagrams) cnt[d.kind]++;
    if (!mm.model_kind.empty()) cnt[mm.model_kind]++;
    return scope_from_exact_counts(cat, {cnt.begin(), cnt.end()});
}

namespace {

// extent of exactly this signature: its own atoms, no subtypes
ExprPtr exact_extent(const MetamodelCatalog& cat, const std::string& kind) {
    ExprPtr e = rel::sig(kind);
    int idx = cat.spec.sig_index_checked(kind);
    for (int c : cat.spec.children(idx)) e = rel::diff(std::move(e), rel::sig(cat.spec.signature(c).name));
    return e;
}

bool field_accepts(const MetamodelCatalog& cat, const rel::FieldDecl& f, const std::string& kind) {
    if (!cat.spec.conforms(kind, f.target)) return false;
    return f.exclude.empty() || !cat.spec.conforms(kind, f.exclude);
}

ExprPtr atom_set(const std::set<std::string>& names) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& n : names) rows.push_back({n});
    return rel::atoms(std::move(rows), 1);
}

} // namespace

Encoding encode_instance(const MergedModel& mm, const MetamodelCatalog& cat) {
    Encoding enc;
    enc.scope = compute_scope(mm, cat);

    std::map<std::string, long> counter;
    auto next_atom = [&](const std::string& kind) {
        return kind + "$" + std::to_string(counter[kind]++);
    };

    std::map<std::pair<std::string, std::string>, std::string> elem_atom;
    for (const auto& e : mm.elements) {
        std::string a = next_atom(e.kind);
        elem_atom[{e.kind, e.name}] = a;
        enc.pinning.emplace_back(a, e.name);
    }

    std::vector<const MergedRelationship*> rels;
    for (const auto& mr : mm.relationships) rels.push_back(&mr);
    std::stable_sort(rels.begin(), rels.end(),
                     [](const MergedRelationship* a, const MergedRelationship* b) {
                         return a->diagram < b->diagram;
                     });
    std::map<const Relationship*, std::string> rel_atom;
    for (const MergedRelationship* mr : rels) {
        std::string a = next_atom(mr->rel.kind);
        rel_atom[&mr->rel] = a;
        enc.pinning.emplace_back(a, mr->rel.name);
    }

    std::vector<std::string> dnames;
    for (const auto& d : mm.member_diagrams) dnames.push_back(d.name);
    std::sort(dnames.begin(), dnames.end());
    std::map<std::string, std::string> dia_atom;
    for (const auto& dn : dnames) {
        const Diagram* d = member_by_name(mm, dn);
        std::string a = next_atom(d->kind);
        dia_atom[dn] = a;
        enc.pinning.emplace_back(a, dn);
    }

    std::string model_atom;
    if (!mm.model_kind.empty()) {
        model_atom = next_atom(mm.model_kind);
        enc.pinning.emplace_back(model_atom, mm.name);
    }

    std::vector<FormulaPtr> cs;
    auto extent_count = [&](const rel::FieldDecl& f) {
        long n = enc.scope.get(f.target);
        if (!f.exclude.empty()) n -= enc.scope.get(f.exclude);
        return n;
    };
    // a row is forced empty either explicitly or by an empty candidate extent
    auto pin_row = [&](ExprPtr owner, const rel::FieldDecl& f, const std::set<std::string>& members) {
        ExprPtr row = rel::join(std::move(owner), rel::field(f.qualified()));
        if (!members.empty()) {
            cs.push_back(rel::in(atom_set(members), row));
            cs.push_back(rel::card(std::move(row), CardOp::Eq, long(members.size())));
        } else if (extent_count(f) > 0) {
            cs.push_back(rel::card(std::move(row), CardOp::Eq, 0));
        }
    };

    for (const auto& dn : dnames) {
        const Diagram* d = member_by_name(mm, dn);
        for (const auto& f : meta::diagram_fields(d->kind, cat)) {
            std::set<std::string> members;
            if (cat.spec.conforms(f.target, "Node")) {
                for (const auto& e : d->elements)
                    if (field_accepts(cat, f, e.kind)) members.insert(elem_atom.at({e.kind, e.name}));
            } else {
                for (const auto& mr : mm.relationships)
                    if (mr.diagram == dn && field_accepts(cat, f, mr.rel.kind))
                        members.insert(rel_atom.at(&mr.rel));
            }
            pin_row(rel::atom(dia_atom.at(dn)), f, members);
        }
    }

    for (const MergedRelationship* mr : rels) {
        const Relationship& r = mr->rel;
        ExprPtr ratom = rel::atom(rel_atom.at(&r));
        for (const auto& ef : meta::endpoint_fields(cat, r.kind)) {
            std::vector<ElementRef> refs;
            if (ef.name == "head" && r.head) refs = {*r.head};
            else if (ef.name == "tail") refs = r.tail;
            else if (ef.name == "tact" && r.tact) refs = {*r.tact};
            else if (ef.name == "user" && r.user) refs = {*r.user};
            else if (ef.name == "source" && r.source) refs = {*r.source};
            else if (ef.name == "target" && r.target) refs = {*r.target};
            if (refs.empty() && ef.mult == rel::Mult::One) continue;
            std::set<std::string> members;
            for (const auto& ref : refs) {
                auto it = elem_atom.find({ref.kind, ref.name});
                if (it == elem_atom.end()) cs.push_back(rel::negate(rel::truth()));
                else members.insert(it->second);
            }
            pin_row(ratom, ef, members);
        }
        if (r.expect_tail)
            cs.push_back(rel::card(rel::join(ratom, rel::field("Structure.tail")), CardOp::Eq,
                                   *r.expect_tail));
    }

    if (!mm.model_kind.empty()) {
        rel::FieldDecl mf = meta::model_member_field(cat, mm.model_kind);
        std::set<std::string> members;
        for (const auto& [dn, a] : dia_atom) members.insert(a);
        pin_row(rel::atom(model_atom), mf, members);

        std::map<std::string, std::set<std::string>> declared;
        for (const auto& ex : mm.shared_expect)
            declared[ex.kind].insert(ex.names.begin(), ex.names.end());
        std::string dkind = meta::diagram_kind_for_model(cat, mm.model_kind);
        for (const auto& [kind, names] : declared) {
            auto f = meta::element_field(cat, dkind, kind);
            if (!f) {
                cs.push_back(rel::negate(rel::truth()));
                continue;
            }
            std::set<std::string> expected;
            for (const auto& n : names) {
                auto it = elem_atom.find({kind, n});
                if (it == elem_atom.end()) cs.push_back(rel::negate(rel::truth()));
                else expected.insert(it->second);
            }
            std::vector<ExprPtr> rows;
            for (const auto& dn : dnames)
                rows.push_back(rel::intersect(
                    rel::join(rel::atom(dia_atom.at(dn)), rel::field(f->qualified())),
                    exact_extent(cat, kind)));
            ExprPtr sharedx;
            for (std::size_t i = 0; i < rows.size(); ++i)
                for (std::size_t j = i + 1; j < rows.size(); ++j) {
                    ExprPtr pair_ = rel::intersect(rows[i], rows[j]);
                    sharedx = sharedx ? rel::unite(std::move(sharedx), std::move(pair_))
                                      : std::move(pair_);
                }
            if (!sharedx) sharedx = rel::atoms({}, 1);
            cs.push_back(rel::equal(std::move(sharedx), atom_set(expected)));
        }
    }

    enc.goal = rel::conj_all(cs);
    return enc;
}

namespace {

rel::Spec filtered_spec(const MetamodelCatalog& cat, const CheckOptions& opts) {
    if (opts.enable_f5 && opts.enable_f8) return cat.spec;
    std::vector<std::pair<std::string, FormulaPtr>> facts;
    for (const auto& [id, f] : cat.spec.facts()) {
        if (id == "F5" && !opts.enable_f5) continue;
        if (id == "F8" && !opts.enable_f8) continue;
        facts.emplace_back(id, f);
    }
    return rel::Spec(cat.spec.signatures(), std::move(facts));
}

} // namespace

Verdict validate_via_solver(const MergedModel& mm, const MetamodelCatalog& cat,
                            const CheckOptions& opts) {
    Verdict v;
    v.encoding = encode_instance(mm, cat);
    rel::Spec spec = filtered_spec(cat, opts);
    rel::SearchOptions so;
    so.budget = opts.budget;
    auto t0 = std::chrono::steady_clock::now();
    auto er = rel::enumerate_instances(spec, v.encoding.goal, v.encoding.scope, 2, so);
    v.timing_ms = ms_since(t0);
    v.count = int(er.instances.size());
    v.instances = std::move(er.instances);
    if (er.status == rel::SearchStatus::Budget) v.outcome = SolverOutcome::BudgetExceeded;
    else if (v.count == 0) v.outcome = SolverOutcome::NoInstance;
    else if (v.count == 1) v.outcome = SolverOutcome::UniqueInstance;
    else v.outcome = SolverOutcome::MultipleInstances;
    return v;
}

Report check_with_solver(const MergedModel& mm, const std::string& level,
                         const MetamodelCatalog& cat, const CheckOptions& opts) {
    Report r;
    r.level = level;
    r.subject = mm.name;
    Verdict v = validate_via_solver(mm, cat, opts);
    r.scope = v.encoding.scope;
    r.timing_ms = v.timing_ms;
    r.structure = std::make_shared<MergedModel>(mm);
    switch (v.outcome) {
    case SolverOutcome::UniqueInstance:
        r.verdict = CheckVerdict::Valid;
        break;
    case SolverOutcome::NoInstance:
        r.verdict = CheckVerdict::Invalid;
        r.findings.push_back(
            Finding{"SOLVER",
                    "no instance at the pinned scope satisfies the metamodel facts", {},
                    std::nullopt});
        break;
    case SolverOutcome::MultipleInstances:
        r.verdict = CheckVerdict::Invalid;
        r.findings.push_back(Finding{
            "INTERNAL", "encoding under-constrains the data: several instances found", {},
            std::nullopt});
        break;
    case SolverOutcome::BudgetExceeded:
        r.verdict = CheckVerdict::BudgetExceeded;
        break;
    }
    return r;
}

// ---- built-in assertion suite ----------------------------------------------

namespace {

// the fact-side expressions, rebuilt for the assertion formulas
ExprPtr suite_endpoints(ExprPtr s) {
    // sequence the two joins: moving s inside one argument of a single call
    // would race the copy in the other (argument order is unspecified)
    ExprPtr heads = rel::join(s, rel::field("Structure.head"));
    ExprPtr tails = rel::join(std::move(s), rel::field("Structure.tail"));
    return rel::unite(std::move(heads), std::move(tails));
}

ExprPtr suite_model_comps(ExprPtr m) {
    ExprPtr ts =
        rel::join(rel::join(m, rel::field("TaskStModel.tm")), rel::field("TaskStDiagramView.comp"));
    ExprPtr data = rel::join(rel::join(std::move(m), rel::field("DataModel.dm")),
                             rel::field("DataDiagramView.comp"));
    return rel::unite(std::move(ts), std::move(data));
}

ExprPtr suite_whole_part(ExprPtr structures) {
    ExprPtr dom = rel::product(std::move(structures), rel::sig("Node"));
    ExprPtr h = rel::intersect(rel::field("Structure.head"), dom);
    ExprPtr t = rel::intersect(rel::field("Structure.tail"), dom);
    return rel::join(rel::transpose(std::move(h)), std::move(t));
}

// every count tuple up to the per-kind maxima, ascending by (sum, lex)
std::vector<rel::Scope> family_scopes(const MetamodelCatalog& cat,
                                      const std::vector<std::pair<std::string, int>>& dims) {
    std::vector<std::vector<long>> tuples;
    std::vector<long> cur(dims.size(), 0);
    for (;;) {
        tuples.push_back(cur);
        std::size_t i = 0;
        while (i < dims.size() && cur[i] == dims[i].second) cur[i++] = 0;
        if (i == dims.size()) break;
        cur[i]++;
    }
    std::sort(tuples.begin(), tuples.end(), [](const auto& a, const auto& b) {
        long sa = 0, sb = 0;
        for (long x : a) sa += x;
        for (long x : b) sb += x;
        if (sa != sb) return sa < sb;
        return a < b;
    });
    std::vector<rel::Scope> out;
    for (const auto& t : tuples) {
        std::vector<std::pair<std::string, long>> exact;
        for (std::size_t i = 0; i < dims.size(); ++i) exact.emplace_back(dims[i].first, t[i]);
        out.push_back(scope_from_exact_counts(cat, exact));
    }
    return out;
}

} // namespace

std::vector<AssertionResult> builtin_assertion_suite(const MetamodelCatalog& cat, int max_scope,
                                                     const CheckOptions& opts) {
    if (max_scope < 0) throw std::invalid_argument("max_scope must be >= 0");
    using namespace rel;

    FormulaPtr a1 = all("m", sig("Model"),
                        all("n", sig("Node"),
                            negate(in(var("n"),
                                      join(var("n"),
                                           closure(suite_whole_part(suite_model_comps(var("m")))))))));
    FormulaPtr a2 = all("m", sig("Model"),
                        all("n", sig("Node"),
                            card(intersect(join(var("n"), transpose(field("Structure.tail"))),
                                           suite_model_comps(var("m"))),
                                 CardOp::Le, 1)));
    FormulaPtr a3 = all("a", sig("Aggregation"),
                        negate(conj(card(intersect(suite_endpoints(var("a")), sig("Task")),
                                         CardOp::Ge, 1),
                                    card(intersect(suite_endpoints(var("a")), sig("Object")),
                                         CardOp::Ge, 1))));

    // companions entailed by the negated assertion, phrased over whole fields
    // so the search prunes before the containers are assigned
    FormulaPtr c1 = negate(acyclic(suite_whole_part(sig("Composition"))));
    FormulaPtr c2 = some("n", sig("Node"),
                         card(intersect(join(var("n"), transpose(field("Structure.tail"))),
                                        sig("Composition")),
                              CardOp::Ge, 2));

    // container counts saturate: extra diagrams or models never enable a new
    // counterexample, so their dimension stops at one
    int one = std::min(1, max_scope);
    auto ts_family = family_scopes(cat, {{"Task", max_scope},
                                         {"Composition", max_scope},
                                         {"TaskStDiagramView", one},
                                         {"TaskStModel", one}});
    auto agg_family = family_scopes(cat, {{"Task", max_scope},
                                          {"Object", max_scope},
                                          {"Aggregation", max_scope}});

    rel::Spec no_f3;
    {
        std::vector<std::pair<std::string, FormulaPtr>> facts;
        for (const auto& [id, f] : cat.spec.facts())
            if (id != "F3") facts.emplace_back(id, f);
        no_f3 = rel::Spec(cat.spec.signatures(), std::move(facts));
    }

    struct Run {
        std::string id;
        FormulaPtr goal;
        const rel::Spec* spec;
        const std::vector<rel::Scope>* scopes;
    };
    std::vector<Run> runs = {
        {"A1", conj(negate(a1), c1), &cat.spec, &ts_family},
        {"A2", conj(negate(a2), c2), &cat.spec, &ts_family},
        {"A3", negate(a3), &cat.spec, &agg_family},
        {"A1-no-F3", conj(negate(a1), c1), &no_f3, &ts_family},
    };

    SearchOptions so;
    so.budget = opts.budget;
    so.field_order = {"Structure.head", "Structure.tail", "TaskStDiagramView.comp",
                      "TaskStModel.tm"};

    std::vector<AssertionResult> out;
    for (const auto& run : runs) {
        AssertionResult r;
        r.id = run.id;
        for (const auto& scope : *run.scopes) {
            auto fr = find_instance(*run.spec, run.goal, scope, so);
            if (fr.status == SearchStatus::Budget) {
                r.budget_exceeded = true;
                continue;
            }
            if (fr.status == SearchStatus::Sat) {
                r.holds = false;
                r.counterexample = std::move(fr.instance);
                r.counterexample_scope = scope;
                break;
            }
        }
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace disco::check
