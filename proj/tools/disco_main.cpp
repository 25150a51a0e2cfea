#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "disco/checker.hpp"
#include "disco/render.hpp"
#include "disco/resolve.hpp"

namespace {

using namespace disco;

struct Cli {
    std::vector<std::string> files;
    std::string level = "all";
    std::string backend = "eval";
    std::string format = "text";
    std::vector<std::string> disabled;
    bool degenerate = false;
    std::uint64_t budget = 10'000'000;
    long limit = 2;
    int max_scope = 3;
};

constexpr int kExitValid = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitInput = 2;   // parse/resolve/usage failures
constexpr int kExitBudget = 3;  // budget exhaustion or internal defects

bool load_workspace(const std::vector<std::string>& files, const meta::MetamodelCatalog& cat,
                    Workspace& ws) {
    std::vector<dsl::SourceDocument> docs;
    std::vector<Diagnostic> errors;
    for (const auto& path : files) {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            std::cerr << "error: cannot read '" << path << "'\n";
            return false;
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        auto pr = dsl::parse_source(buf.str(), path);
        errors.insert(errors.end(), pr.errors.begin(), pr.errors.end());
        docs.push_back(std::move(pr.doc));
    }
    if (errors.empty()) {
        auto rr = dsl::resolve(docs, cat);
        if (rr.errors.empty()) {
            ws = std::move(rr.workspace);
            return true;
        }
        errors = std::move(rr.errors);
    }
    for (const auto& d : errors) std::cerr << format_diagnostic(d) << "\n";
    return false;
}

check::CheckOptions make_options(const Cli& cli) {
    check::CheckOptions opts;
    opts.degenerate_diagram_rules = cli.degenerate;
    opts.budget = cli.budget;
    for (const auto& id : cli.disabled) {
        if (id == "F5") opts.enable_f5 = false;
        else if (id == "F8") opts.enable_f8 = false;
    }
    return opts;
}

int exit_code_for(const std::vector<check::Report>& reports) {
    int code = kExitValid;
    for (const auto& r : reports) {
        if (r.verdict == check::CheckVerdict::BudgetExceeded) return kExitBudget;
        for (const auto& f : r.findings)
            if (f.rule == "INTERNAL") return kExitBudget;
        if (r.verdict == check::CheckVerdict::Invalid) code = kExitInvalid;
    }
    return code;
}

int run_check(const Cli& cli, const meta::MetamodelCatalog& cat) {
    bool solver = cli.backend == "solver" || cli.backend == "both";
    if (solver && cli.level != "diagram" && cli.level != "model") {
        std::cerr << "error: --backend " << cli.backend
                  << " requires --level diagram or --level model\n";
        return kExitInput;
    }
    Workspace ws;
    if (!load_workspace(cli.files, cat, ws)) return kExitInput;
    auto opts = make_options(cli);

    std::vector<check::Report> reports;
    auto add_subject = [&](const check::MergedModel& mm, const std::string& level,
                           const Diagram* d) {
        if (cli.backend == "eval") {
            reports.push_back(level == "diagram" ? check::check_diagram(*d, cat, opts)
                                                 : check::check_model(mm, cat, opts));
            return;
        }
        check::Report sr = check::check_with_solver(mm, level, cat, opts);
        if (cli.backend == "solver") {
            reports.push_back(std::move(sr));
            return;
        }
        // both: evaluator findings, solver cross-check, scope as evidence
        check::Report er = level == "diagram" ? check::check_diagram(*d, cat, opts)
                                              : check::check_model(mm, cat, opts);
        er.scope = sr.scope;
        if (sr.verdict == check::CheckVerdict::BudgetExceeded) {
            er.verdict = check::CheckVerdict::BudgetExceeded;
        } else if ((er.verdict == check::CheckVerdict::Valid) !=
                   (sr.verdict == check::CheckVerdict::Valid)) {
            er.findings.push_back(check::Finding{
                "INTERNAL",
                "back ends disagree: evaluator says " + std::string(render::verdict_word(er.verdict)) +
                    ", solver says " + std::string(render::verdict_word(sr.verdict)),
                {}, std::nullopt});
            er.verdict = check::CheckVerdict::Invalid;
        }
        reports.push_back(std::move(er));
    };

    if (cli.level == "diagram" || cli.level == "all")
        for (const auto& d : ws.diagrams) add_subject(check::merge_diagram(d), "diagram", &d);
    if (cli.level == "model" || cli.level == "all")
        for (const auto& m : ws.models)
            add_subject(check::merge_model(m, ws, cat), "model", nullptr);
    if (cli.level == "system" || cli.level == "all")
        for (const auto& s : ws.systems) reports.push_back(check::check_system(s, ws, cat, opts));

    if (cli.format == "json") {
        std::cout << render::reports_json(reports);
    } else if (cli.format == "dot") {
        for (const auto& r : reports) std::cout << render::report_dot(r);
    } else {
        std::cout << render::reports_text(reports);
    }
    return exit_code_for(reports);
}

int run_scope(const Cli& cli, const meta::MetamodelCatalog& cat) {
    Workspace ws;
    if (!load_workspace(cli.files, cat, ws)) return kExitInput;
    struct Subject {
        std::string level, name;
        rel::Scope scope;
    };
    std::vector<Subject> subjects;
    if (cli.level == "diagram" || cli.level == "all")
        for (const auto& d : ws.diagrams)
            subjects.push_back({"diagram", d.name, check::compute_scope(check::merge_diagram(d), cat)});
    if (cli.level == "model" || cli.level == "all")
        for (const auto& m : ws.models)
            subjects.push_back(
                {"model", m.name, check::compute_scope(check::merge_model(m, ws, cat), cat)});
    if (cli.format == "json") {
        if (subjects.size() == 1) {
            std::cout << render::scope_json(subjects.front().scope, cat);
        } else {
            std::cout << "[\n";
            for (std::size_t i = 0; i < subjects.size(); ++i) {
                std::string one = render::scope_json(subjects[i].scope, cat);
                if (!one.empty() && one.back() == '\n') one.pop_back();
                std::cout << one << (i + 1 < subjects.size() ? ",\n" : "\n");
            }
            std::cout << "]\n";
        }
    } else {
        for (std::size_t i = 0; i < subjects.size(); ++i) {
            if (i) std::cout << "\n";
            std::cout << subjects[i].level << " " << subjects[i].name << "\n";
            std::cout << render::scope_text(subjects[i].scope, cat);
        }
    }
    return kExitValid;
}

int run_find(const Cli& cli, const meta::MetamodelCatalog& cat) {
    if (cli.level != "diagram" && cli.level != "model") {
        std::cerr << "error: find requires --level diagram or --level model\n";
        return kExitInput;
    }
    Workspace ws;
    if (!load_workspace(cli.files, cat, ws)) return kExitInput;
    auto opts = make_options(cli);
    opts.budget = cli.budget;

    std::vector<check::MergedModel> subjects;
    if (cli.level == "diagram")
        for (const auto& d : ws.diagrams) subjects.push_back(check::merge_diagram(d));
    else
        for (const auto& m : ws.models) subjects.push_back(check::merge_model(m, ws, cat));

    int code = kExitValid;
    bool first = true;
    for (const auto& mm : subjects) {
        check::Verdict v = check::validate_via_solver(mm, cat, opts);
        if (cli.format == "json") {
            std::cout << render::verdict_json(v);
        } else {
            if (!first) std::cout << "\n";
            std::cout << cli.level << " " << mm.name << "\n" << render::verdict_text(v);
        }
        first = false;
        switch (v.outcome) {
        case check::SolverOutcome::UniqueInstance: break;
        case check::SolverOutcome::NoInstance:
            if (code == kExitValid) code = kExitInvalid;
            break;
        default: code = kExitBudget; break;
        }
    }
    return code;
}

int run_assert(const Cli& cli, const meta::MetamodelCatalog& cat) {
    auto opts = make_options(cli);
    auto results = check::builtin_assertion_suite(cat, cli.max_scope, opts);
    if (cli.format == "json") std::cout << render::suite_json(results);
    else std::cout << render::suite_text(results);
    int code = kExitValid;
    for (const auto& r : results) {
        if (r.budget_exceeded) return kExitBudget;
        bool expected = r.id == "A1-no-F3" ? !r.holds : r.holds;
        if (!expected) code = kExitInvalid;
    }
    return code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"discovery notation checker"};
    app.require_subcommand(1);
    Cli cli;

    auto add_common = [&](CLI::App* cmd, bool with_files) {
        if (with_files)
            cmd->add_option("files", cli.files, "DSL input files")->required()->expected(-1);
        cmd->add_option("--format", cli.format, "text, json or dot")
            ->check(CLI::IsMember({"text", "json", "dot"}));
        cmd->add_option("--budget", cli.budget, "search node budget");
    };
    auto add_rule_flags = [&](CLI::App* cmd) {
        cmd->add_option("--disable-rule", cli.disabled, "disable a toggleable rule (F5 or F8)")
            ->check(CLI::IsMember({"F5", "F8"}));
        cmd->add_flag("--enable-degenerate-diagram-rules", cli.degenerate,
                      "evaluate F3/F4/F5 over lone diagrams too");
    };

    CLI::App* c_check = app.add_subcommand("check", "validate diagrams, models and systems");
    add_common(c_check, true);
    add_rule_flags(c_check);
    c_check->add_option("--level", cli.level, "diagram, model, system or all")
        ->check(CLI::IsMember({"diagram", "model", "system", "all"}));
    c_check->add_option("--backend", cli.backend, "eval, solver or both")
        ->check(CLI::IsMember({"eval", "solver", "both"}));

    CLI::App* c_scope = app.add_subcommand("scope", "print the exact scope of each subject");
    add_common(c_scope, true);
    c_scope->add_option("--level", cli.level, "diagram, model or all")
        ->check(CLI::IsMember({"diagram", "model", "all"}));

    CLI::App* c_find = app.add_subcommand("find", "search for the pinned instance of each subject");
    add_common(c_find, true);
    add_rule_flags(c_find);
    c_find->add_option("--level", cli.level, "diagram or model")
        ->check(CLI::IsMember({"diagram", "model"}));
    c_find->add_option("--limit", cli.limit, "instance enumeration cap (2..1000)")
        ->check(CLI::Range(2L, 1000L));

    CLI::App* c_assert = app.add_subcommand("assert", "run the built-in assertion suite");
    add_common(c_assert, false);
    c_assert->add_option("--max-scope", cli.max_scope, "per-signature count ceiling")
        ->check(CLI::Range(0, 6));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kExitInput;
    }

    // scope and find default to the model level; check covers everything
    if (c_scope->parsed() && !c_scope->count("--level")) cli.level = "model";
    if (c_find->parsed() && !c_find->count("--level")) cli.level = "model";

    try {
        auto cat = meta::declare_metamodel();
        if (c_check->parsed()) return run_check(cli, cat);
        if (c_scope->parsed()) return run_scope(cli, cat);
        if (c_find->parsed()) return run_find(cli, cat);
        return run_assert(cli, cat);
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitBudget;
    }
}
