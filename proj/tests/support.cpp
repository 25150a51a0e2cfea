#include "support.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <set>
#include <sstream>
#include <stdexcept>

using namespace disco;

namespace testsup {

const char* const kCirculation = R"(diagram taskstructure Circulation {
  task Circulation, Overdue, LoanTransaction;
  actor ReaderServices;
  agg circAgg { head Circulation; tail Overdue, LoanTransaction; expect tail = 2; }
  parti p1 { tact Circulation; user ReaderServices; }
}
diagram taskstructure LoanTransactionTS {
  task LoanTransaction, Issue, Discharge;
  actor Borrower;
  gen loanGener { head LoanTransaction; tail Issue, Discharge; expect tail = 2; }
  parti p2 { tact LoanTransaction; user Borrower; }
}
model taskstructure CirculationModel {
  diagrams Circulation, LoanTransactionTS;
  shared task LoanTransaction;
}
)";

const char* const kSharedPart = R"(diagram data PartsA {
  object W1, Z;
  comp c1 { head W1; tail Z; }
}
diagram data PartsB {
  object W2, Z;
  comp c2 { head W2; tail Z; }
}
model data PartsModel {
  diagrams PartsA, PartsB;
  shared object Z;
}
)";

Workspace must_resolve(const std::string& text, const meta::MetamodelCatalog& cat) {
    auto pr = dsl::parse_source(text, "test.disco");
    auto rr = dsl::resolve(pr.doc, cat);
    std::string diags;
    for (const auto& d : pr.errors) diags += format_diagnostic(d) + "\n";
    for (const auto& d : rr.errors) diags += format_diagnostic(d) + "\n";
    if (!diags.empty()) throw std::runtime_error("fixture does not resolve:\n" + diags + text);
    return std::move(rr.workspace);
}

std::vector<rel::Instance> brute_force_instances(const rel::Spec& spec, const rel::Scope& scope,
                                                 const rel::FormulaPtr& goal) {
    auto uni = rel::make_universe(spec, scope);
    struct Cand {
        int field;
        int owner;
        int target;
    };
    std::vector<Cand> cands;
    for (std::size_t f = 0; f < uni->fields.size(); ++f) {
        const auto& fld = uni->fields[f];
        for (int o : fld.owners)
            fld.targets.for_each([&](std::size_t t) { cands.push_back({int(f), o, int(t)}); });
    }
    if (cands.size() > 22) throw std::runtime_error("brute force space too large");

    std::vector<rel::Instance> out;
    const std::uint64_t total = std::uint64_t{1} << cands.size();
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        rel::Instance inst = rel::Instance::empty_of(uni);
        for (std::size_t i = 0; i < cands.size(); ++i)
            if (mask >> i & 1) inst.rows[cands[i].field][cands[i].owner].set(cands[i].target);

        bool ok = true;
        for (std::size_t f = 0; f < uni->fields.size() && ok; ++f) {
            const auto& fld = uni->fields[f];
            for (int o : fld.owners) {
                std::size_t n = inst.rows[f][o].count();
                if ((fld.decl.mult == rel::Mult::One && n != 1) ||
                    (fld.decl.mult == rel::Mult::Lone && n > 1)) {
                    ok = false;
                    break;
                }
            }
        }
        for (const auto& fact : spec.facts()) {
            if (!ok) break;
            ok = rel::eval_formula(*fact.second, inst);
        }
        if (ok && goal) ok = rel::eval_formula(*goal, inst);
        if (ok) out.push_back(std::move(inst));
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

int roll(std::mt19937& rng, int n) {
    return std::uniform_int_distribution<int>(0, n - 1)(rng);
}

// Random well-formed formulas over a mini spec, typed by arity so that
// validate_formula accepts them by construction.
struct FormulaGen {
    std::mt19937& rng;
    const std::vector<std::string>& sigs;
    const std::vector<std::string>& fields;  // qualified names
    std::vector<std::string> bound;
    int next_var = 0;

    rel::ExprPtr unary(int depth) {
        int c = roll(rng, depth > 0 ? 8 : 4);
        switch (c) {
            case 0:
            case 1: return rel::sig(sigs[roll(rng, int(sigs.size()))]);
            case 2:
                if (!bound.empty()) return rel::var(bound[roll(rng, int(bound.size()))]);
                return rel::sig(sigs[roll(rng, int(sigs.size()))]);
            case 3: return rel::none();
            case 4: return rel::unite(unary(depth - 1), unary(depth - 1));
            case 5: return rel::intersect(unary(depth - 1), unary(depth - 1));
            case 6: return rel::diff(unary(depth - 1), unary(depth - 1));
            default: return rel::join(unary(depth - 1), binary(depth - 1));
        }
    }

    rel::ExprPtr binary(int depth) {
        if (depth <= 0 || roll(rng, 3) == 0) {
            if (!fields.empty()) return rel::field(fields[roll(rng, int(fields.size()))]);
            return rel::product(unary(0), unary(0));
        }
        switch (roll(rng, 6)) {
            case 0: return rel::transpose(binary(depth - 1));
            case 1: return rel::closure(binary(depth - 1));
            case 2: return rel::unite(binary(depth - 1), binary(depth - 1));
            case 3: return rel::diff(binary(depth - 1), binary(depth - 1));
            case 4: return rel::product(unary(depth - 1), unary(depth - 1));
            default: return rel::join(binary(depth - 1), binary(depth - 1));
        }
    }

    rel::FormulaPtr formula(int depth) {
        if (depth <= 0) {
            switch (roll(rng, 4)) {
                case 0: return rel::in(unary(0), unary(0));
                case 1: return rel::card(unary(1), pick_cmp(), roll(rng, 3));
                case 2: return rel::equal(unary(0), unary(0));
                default: return rel::truth();
            }
        }
        switch (roll(rng, 10)) {
            case 0: return rel::in(unary(depth - 1), unary(depth - 1));
            case 1: return rel::in(binary(depth - 1), binary(depth - 1));
            case 2: return rel::card(binary(depth - 1), pick_cmp(), roll(rng, 3));
            case 3: return rel::negate(formula(depth - 1));
            case 4: return rel::conj(formula(depth - 1), formula(depth - 1));
            case 5: return rel::disj(formula(depth - 1), formula(depth - 1));
            case 6: return rel::implies(formula(depth - 1), formula(depth - 1));
            case 7: return rel::acyclic(binary(depth - 1));
            case 8: return rel::card(unary(depth - 1), pick_cmp(), roll(rng, 3));
            default: {
                std::string v = "v" + std::to_string(next_var++);
                rel::ExprPtr over = unary(depth - 1);
                static const rel::QuantKind kinds[] = {rel::QuantKind::All, rel::QuantKind::Some,
                                                       rel::QuantKind::No, rel::QuantKind::One};
                rel::QuantKind k = kinds[roll(rng, 4)];
                bound.push_back(v);
                rel::FormulaPtr body = formula(depth - 1);
                bound.pop_back();
                return rel::quant(k, v, std::move(over), std::move(body));
            }
        }
    }

    rel::CardOp pick_cmp() {
        static const rel::CardOp ops[] = {rel::CardOp::Eq, rel::CardOp::Le, rel::CardOp::Ge};
        return ops[roll(rng, 3)];
    }
};

std::string scope_note(const rel::Scope& s) {
    std::string out = "{";
    for (const auto& [k, v] : s.counts) out += k + "=" + std::to_string(v) + " ";
    return out + "}";
}

std::string case_note(const MiniCase& mc) {
    std::ostringstream os;
    os << "scope " << scope_note(mc.scope) << "\nsigs:";
    for (const auto& s : mc.spec.signatures()) {
        os << " " << s.name << "(";
        for (const auto& f : s.fields) os << f.name << ":" << f.target << " ";
        os << ")";
    }
    os << "\nfacts:";
    for (const auto& f : mc.spec.facts()) os << "\n  " << rel::to_string(*f.second);
    os << "\ngoal: " << rel::to_string(*mc.goal);
    return os.str();
}

} // namespace

MiniCase random_mini_case(std::mt19937& rng) {
    int nsigs = 1 + roll(rng, 2);
    std::vector<std::string> sig_names;
    for (int i = 0; i < nsigs; ++i) sig_names.emplace_back(1, char('A' + i));

    int nfields = roll(rng, 3);
    std::vector<std::vector<rel::FieldDecl>> per(nsigs);
    std::vector<std::string> field_names;
    for (int i = 0; i < nfields; ++i) {
        int owner = roll(rng, nsigs);
        int target = roll(rng, nsigs);
        static const rel::Mult mults[] = {rel::Mult::One, rel::Mult::Lone, rel::Mult::Set,
                                          rel::Mult::Set};
        std::string fname = "f" + std::to_string(i);
        per[owner].push_back(
            {fname, sig_names[owner], sig_names[target], mults[roll(rng, 4)], {}});
        field_names.push_back(sig_names[owner] + "." + fname);
    }
    std::vector<rel::SignatureDecl> sigs;
    for (int i = 0; i < nsigs; ++i) sigs.push_back({sig_names[i], false, "", per[i]});

    rel::Spec bare(sigs, {});
    FormulaGen gen{rng, sig_names, field_names, {}, 0};
    auto checked = [&](int depth) {
        for (int attempt = 0; attempt < 10; ++attempt) {
            rel::FormulaPtr f = gen.formula(depth);
            try {
                rel::validate_formula(bare, *f);
                return f;
            } catch (const rel::SpecError&) {
            }
        }
        return rel::truth();
    };

    MiniCase mc;
    std::vector<std::pair<std::string, rel::FormulaPtr>> facts;
    int nfacts = roll(rng, 3);
    for (int i = 0; i < nfacts; ++i)
        facts.emplace_back("P" + std::to_string(i), checked(2 + roll(rng, 2)));
    mc.goal = checked(2 + roll(rng, 2));
    mc.spec = rel::Spec(std::move(sigs), std::move(facts));

    for (int attempt = 0;; ++attempt) {
        mc.scope.counts.clear();
        bool all_zero = roll(rng, 20) == 0;
        for (const auto& s : sig_names) mc.scope.set(s, all_zero ? 0 : roll(rng, 4));
        auto uni = rel::make_universe(mc.spec, mc.scope);
        std::size_t total = 0;
        for (const auto& f : uni->fields) total += f.owners.size() * f.targets.count();
        if (total <= 14) break;
        if (attempt > 60) {
            for (const auto& s : sig_names) mc.scope.set(s, 1);
            break;
        }
    }
    return mc;
}

SweepResult run_minispec_equivalence(int cases, unsigned seed) {
    std::mt19937 rng(seed);
    SweepResult res;

    auto fail = [&](const MiniCase& mc, int i, const std::string& what) {
        res.ok = false;
        res.detail = "case " + std::to_string(i) + ": " + what + "\n" + case_note(mc);
    };

    for (int i = 0; i < cases && res.ok; ++i) {
        MiniCase mc = random_mini_case(rng);

        for (int pass = 0; pass < 2 && res.ok; ++pass) {
            rel::FormulaPtr goal = pass == 0 ? rel::truth() : mc.goal;
            auto oracle = brute_force_instances(mc.spec, mc.scope, pass == 0 ? nullptr : mc.goal);
            auto er = rel::enumerate_instances(mc.spec, goal, mc.scope, std::size_t{1} << 20);
            if (!er.exhausted) {
                fail(mc, i, "enumeration did not exhaust the space");
                break;
            }
            std::sort(er.instances.begin(), er.instances.end());
            res.instances_compared += long(oracle.size());
            if (er.instances.size() != oracle.size()) {
                fail(mc, i,
                     "pass " + std::to_string(pass) + ": solver found " +
                         std::to_string(er.instances.size()) + " instances, oracle " +
                         std::to_string(oracle.size()));
                break;
            }
            for (std::size_t k = 0; k < oracle.size(); ++k)
                if (!(er.instances[k] == oracle[k])) {
                    fail(mc, i, "instance sets differ at position " + std::to_string(k));
                    break;
                }

            auto fr = rel::find_instance(mc.spec, goal, mc.scope);
            bool want_sat = !oracle.empty();
            if ((fr.status == rel::SearchStatus::Sat) != want_sat) {
                fail(mc, i, "find_instance status disagrees with the oracle");
                break;
            }
            if (want_sat && !(fr.instance && rel::eval_formula(*goal, *fr.instance))) {
                fail(mc, i, "find_instance returned a non-model");
                break;
            }
        }
        if (res.ok) ++res.cases_run;
    }
    return res;
}

namespace {

struct WsGen {
    std::mt19937& rng;
    std::ostringstream out;

    struct Node {
        std::string name;
        std::string kw;  // task | goal | actor | object | assocclass
    };

    bool task_or_object(const std::string& kw) {
        return kw == "task" || kw == "object" || kw == "assocclass";
    }

    std::string build() {
        bool ts = roll(rng, 2) == 0;
        int ndiag = 1 + roll(rng, 3);
        int nnodes = 1 + roll(rng, 6);

        static const char* ts_kinds[] = {"task", "task", "task", "object", "actor", "goal"};
        static const char* data_kinds[] = {"object", "object", "object", "assocclass"};
        std::vector<Node> pool;
        for (int i = 0; i < nnodes; ++i)
            pool.push_back({"n" + std::to_string(i),
                            ts ? ts_kinds[roll(rng, 6)] : data_kinds[roll(rng, 4)]});

        // each node lives in one diagram, sometimes two (the sharing cases)
        std::vector<std::vector<int>> members(ndiag);
        for (int i = 0; i < nnodes; ++i) {
            int first = roll(rng, ndiag);
            members[first].push_back(i);
            if (ndiag > 1 && roll(rng, 3) == 0) {
                int second = roll(rng, ndiag);
                if (second != first) members[second].push_back(i);
            }
        }

        int nrels = roll(rng, 5);
        int next_rel = 0;
        for (int d = 0; d < ndiag; ++d) {
            out << "diagram " << (ts ? "taskstructure" : "data") << " D" << d << " {\n";
            emit_nodes(pool, members[d]);
            int here = d + 1 < ndiag ? roll(rng, nrels - next_rel + 1) : nrels - next_rel;
            for (int k = 0; k < here; ++k) emit_rel(ts, pool, members[d], next_rel);
            out << "}\n";
        }

        out << "model " << (ts ? "taskstructure" : "data") << " M {\n  diagrams";
        for (int d = 0; d < ndiag; ++d) out << (d ? ", D" : " D") << d;
        out << ";\n";
        if (roll(rng, 2) == 0) {
            int picks = 1 + roll(rng, 2);
            for (int k = 0; k < picks; ++k) {
                const Node& n = pool[roll(rng, int(pool.size()))];
                out << "  shared " << n.kw << " " << n.name << ";\n";
            }
        }
        out << "}\n";
        return out.str();
    }

    void emit_nodes(const std::vector<Node>& pool, const std::vector<int>& ids) {
        // one entry per keyword, comma-joined, matching the grammar
        static const char* kws[] = {"task", "goal", "actor", "object", "assocclass"};
        for (const char* kw : kws) {
            std::string line;
            for (int i : ids)
                if (pool[i].kw == kw) line += (line.empty() ? "" : ", ") + pool[i].name;
            if (!line.empty()) out << "  " << kw << " " << line << ";\n";
        }
    }

    void emit_rel(bool ts, const std::vector<Node>& pool, const std::vector<int>& ids,
                  int& next_rel) {
        std::vector<int> wp;  // task/object family, legal whole-part endpoints
        std::vector<int> tasks, actors;
        for (int i : ids) {
            if (task_or_object(pool[i].kw)) wp.push_back(i);
            if (pool[i].kw == "task") tasks.push_back(i);
            if (pool[i].kw == "actor") actors.push_back(i);
        }

        int kind = roll(rng, ts ? 5 : 4);  // gen real agg comp [parti]
        if (kind == 4 && (tasks.empty() || actors.empty())) kind = roll(rng, 4);
        const std::vector<int>& heads = kind >= 2 && kind <= 3 ? wp : ids;
        if (kind <= 3 && heads.empty()) return;

        std::string name = "r" + std::to_string(next_rel++);
        if (kind == 4) {
            out << "  parti " << name << " { tact " << pool[tasks[roll(rng, int(tasks.size()))]].name
                << "; user " << pool[actors[roll(rng, int(actors.size()))]].name << "; }\n";
            return;
        }

        static const char* kws[] = {"gen", "real", "agg", "comp"};
        const std::vector<int>& tails = kind >= 2 ? wp : ids;
        out << "  " << kws[kind] << " " << name << " { head "
            << pool[heads[roll(rng, int(heads.size()))]].name << ";";
        int ntail = roll(rng, 3);
        std::vector<std::string> picked;
        for (int k = 0; k < ntail && !tails.empty(); ++k)
            picked.push_back(pool[tails[roll(rng, int(tails.size()))]].name);
        if (!picked.empty()) {
            out << " tail";
            for (std::size_t k = 0; k < picked.size(); ++k)
                out << (k ? ", " : " ") << picked[k];
            out << ";";
        }
        if (roll(rng, 3) == 0) {
            long expect;
            if (roll(rng, 2) == 0) {
                std::set<std::string> uniq(picked.begin(), picked.end());
                expect = long(uniq.size());
            } else {
                expect = roll(rng, 4);
            }
            out << " expect tail = " << expect << ";";
        }
        out << " }\n";
    }
};

std::string findings_note(const check::Report& r) {
    std::string out;
    for (const auto& f : r.findings) {
        out += "  " + f.rule + ": " + f.message + "\n";
    }
    return out.empty() ? "  (none)\n" : out;
}

} // namespace

std::string random_workspace_text(std::mt19937& rng) {
    WsGen gen{rng, {}};
    return gen.build();
}

SweepResult run_backend_agreement(int cases, unsigned seed) {
    auto cat = meta::declare_metamodel();
    std::mt19937 rng(seed);
    SweepResult res;

    auto fail = [&](const std::string& text, const std::string& what) {
        res.ok = false;
        res.detail = what + "\n--- workspace ---\n" + text;
    };

    for (int i = 0; i < cases && res.ok; ++i) {
        std::string text = random_workspace_text(rng);
        auto pr = dsl::parse_source(text, "gen.disco");
        if (!pr.errors.empty()) {
            fail(text, "generated text does not parse: " + format_diagnostic(pr.errors.front()));
            break;
        }
        auto rr = dsl::resolve(pr.doc, cat);
        if (!rr.errors.empty()) {
            fail(text, "generated text does not resolve: " + format_diagnostic(rr.errors.front()));
            break;
        }
        const Workspace& ws = rr.workspace;

        auto agree = [&](const check::MergedModel& mm, const check::Report& ev,
                         const std::string& level, const check::CheckOptions& opts) {
            auto ver = check::validate_via_solver(mm, cat, opts);
            if (ver.outcome == check::SolverOutcome::MultipleInstances) {
                fail(text, level + " '" + mm.name + "': pinned encoding admits two instances:\n" +
                               ver.instances[0].dump() + "---\n" + ver.instances[1].dump());
                return;
            }
            if (ver.outcome == check::SolverOutcome::BudgetExceeded) {
                fail(text, level + " '" + mm.name + "': solver budget exceeded");
                return;
            }
            bool ev_valid = ev.verdict == check::CheckVerdict::Valid;
            bool sol_valid = ver.outcome == check::SolverOutcome::UniqueInstance;
            if (ev_valid != sol_valid) {
                fail(text, level + " '" + mm.name + "': evaluator says " +
                               (ev_valid ? "valid" : "invalid") + ", solver says " +
                               (sol_valid ? "valid" : "invalid") + "\nevaluator findings:\n" +
                               findings_note(ev));
                return;
            }
            if (!ev_valid) ++res.invalid_cases;
        };

        for (const auto& m : ws.models) {
            auto mm = check::merge_model(m, ws, cat);
            agree(mm, check::check_model(mm, cat), "model", {});
            if (!res.ok) break;
        }
        check::CheckOptions dopts;
        dopts.degenerate_diagram_rules = false;
        for (const auto& d : ws.diagrams) {
            if (!res.ok) break;
            auto mm = check::merge_diagram(d);
            agree(mm, check::check_diagram(d, cat, dopts), "diagram", dopts);
        }
        if (res.ok) ++res.cases_run;
    }
    return res;
}

} // namespace testsup
