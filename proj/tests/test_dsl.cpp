#include <algorithm>
#include <random>
#include <string>

#include "doctest.h"
#include "support.hpp"

using namespace disco;

namespace {

const meta::MetamodelCatalog& cat() {
    static meta::MetamodelCatalog c = meta::declare_metamodel();
    return c;
}

bool has_error(const std::vector<Diagnostic>& errs, const std::string& code) {
    return std::any_of(errs.begin(), errs.end(),
                       [&](const Diagnostic& d) { return d.code == code; });
}

const Diagnostic& first_error(const std::vector<Diagnostic>& errs, const std::string& code) {
    for (const auto& d : errs)
        if (d.code == code) return d;
    throw std::runtime_error("no diagnostic with code " + code);
}

std::vector<Diagnostic> resolve_errors(const std::string& text) {
    auto pr = dsl::parse_source(text, "t.disco");
    REQUIRE(pr.errors.empty());
    auto rr = dsl::resolve(pr.doc, cat());
    return rr.errors;
}

} // namespace

TEST_CASE("the reference workspace parses into the expected shape") {
    auto pr = dsl::parse_source(testsup::kCirculation, "circulation.disco");
    CHECK(pr.errors.empty());
    REQUIRE(pr.doc.diagrams.size() == 2);
    REQUIRE(pr.doc.models.size() == 1);
    CHECK(pr.doc.systems.empty());

    const auto& d0 = pr.doc.diagrams[0];
    CHECK(d0.kindword == "taskstructure");
    CHECK(d0.name.name == "Circulation");
    REQUIRE(d0.nodes.size() == 2);  // one task entry, one actor entry
    CHECK(d0.nodes[0].keyword == "task");
    REQUIRE(d0.nodes[0].names.size() == 3);
    CHECK(d0.nodes[0].names[0].name == "Circulation");
    CHECK(d0.nodes[0].names[2].name == "LoanTransaction");
    CHECK(d0.nodes[1].keyword == "actor");

    REQUIRE(d0.rels.size() == 2);
    const auto& agg = d0.rels[0];
    CHECK(agg.keyword == "agg");
    CHECK(agg.name.name == "circAgg");
    REQUIRE(agg.fields.size() == 3);
    CHECK(agg.fields[0].field == "head");
    CHECK(agg.fields[1].field == "tail");
    CHECK(agg.fields[1].values.size() == 2);
    CHECK(agg.fields[2].field == "expect");
    CHECK(agg.fields[2].number == 2);
    CHECK(d0.rels[1].keyword == "parti");

    const auto& m = pr.doc.models[0];
    CHECK(m.kindword == "taskstructure");
    CHECK(m.name.name == "CirculationModel");
    REQUIRE(m.diagrams.size() == 2);
    CHECK(m.diagrams[1].name == "LoanTransactionTS");
    REQUIRE(m.shared.size() == 1);
    CHECK(m.shared[0].keyword == "task");
    CHECK(m.shared[0].names.size() == 1);
}

TEST_CASE("the reference workspace resolves cleanly") {
    Workspace ws = testsup::must_resolve(testsup::kCirculation, cat());
    REQUIRE(ws.diagrams.size() == 2);
    REQUIRE(ws.models.size() == 1);

    const Diagram* d = ws.find_diagram("Circulation");
    REQUIRE(d);
    CHECK(d->kind == "TaskStDiagramView");
    CHECK(d->elements.size() == 4);
    CHECK(d->find_element("Task", "Overdue"));
    CHECK(d->find_element("Actor", "ReaderServices"));
    CHECK_FALSE(d->find_element("Task", "ReaderServices"));

    REQUIRE(d->relationships.size() == 2);
    const Relationship& agg = d->relationships[0];
    CHECK(agg.kind == "Aggregation");
    REQUIRE(agg.head.has_value());
    CHECK(agg.head->name == "Circulation");
    REQUIRE(agg.tail.size() == 2);
    CHECK(agg.tail[0].name == "Overdue");
    CHECK(agg.expect_tail == 2);
    const Relationship& p1 = d->relationships[1];
    CHECK(p1.kind == "Participation");
    REQUIRE(p1.tact.has_value());
    REQUIRE(p1.user.has_value());
    CHECK(p1.tact->kind == "Task");
    CHECK(p1.user->kind == "Actor");

    const ModelRef* m = ws.find_model("CirculationModel");
    REQUIRE(m);
    CHECK(m->kind == "TaskStModel");
    CHECK(m->diagrams == std::vector<std::string>{"Circulation", "LoanTransactionTS"});
    REQUIRE(m->shared.size() == 1);
    CHECK(m->shared[0].kind == "Task");
    CHECK(m->shared[0].names == std::vector<std::string>{"LoanTransaction"});

    // gen endpoints resolve in the second diagram
    const Diagram* d2 = ws.find_diagram("LoanTransactionTS");
    REQUIRE(d2);
    CHECK(d2->relationships[0].kind == "Generalisation");
    CHECK(d2->relationships[0].tail.size() == 2);
}

TEST_CASE("duplicate names are parse errors with useful spans") {
    std::string text = "diagram taskstructure Bad { task A, A; }";
    auto pr = dsl::parse_source(text, "dup.disco");
    REQUIRE(has_error(pr.errors, "duplicate-element-name"));
    const auto& d = first_error(pr.errors, "duplicate-element-name");
    CHECK(d.span.file == "dup.disco");
    CHECK(d.span.line == 1);
    CHECK(d.span.col == int(text.rfind('A')) + 1);

    auto pr2 = dsl::parse_source(
        "diagram taskstructure B { task A, B; agg r { head A; } agg r { head B; } }");
    CHECK(has_error(pr2.errors, "duplicate-relationship-name"));

    auto pr3 = dsl::parse_source("diagram taskstructure C { task A; agg r { head A; head A; } }");
    CHECK(has_error(pr3.errors, "duplicate-field"));

    auto pr4 = dsl::parse_source(
        "diagram taskstructure D { task A; }\ndiagram data D { object O; }");
    CHECK(has_error(pr4.errors, "duplicate-name"));
}

TEST_CASE("parse recovery keeps going after a bad construct") {
    auto pr = dsl::parse_source("nonsense ???\ndiagram taskstructure D { task A; }");
    CHECK(has_error(pr.errors, "syntax-error"));
    REQUIRE(pr.doc.diagrams.size() == 1);
    CHECK(pr.doc.diagrams[0].name.name == "D");

    auto pr2 = dsl::parse_source("diagram taskstructure D { task ; goal G; }");
    CHECK_FALSE(pr2.errors.empty());
    REQUIRE(pr2.doc.diagrams.size() == 1);
}

TEST_CASE("the parser is total on arbitrary input") {
    std::mt19937 rng(31337);
    const std::string vocab[] = {"diagram", "model",  "system", "taskstructure",
                                 "data",    "task",   "agg",    "head",
                                 "tail",    "expect", "shared", "diagrams",
                                 "{",       "}",      ";",      ",",
                                 "=",       "x",      "42",     "\n"};
    for (int it = 0; it < 400; ++it) {
        std::string text;
        int len = int(rng() % 60);
        if (it % 3 == 0) {
            for (int i = 0; i < len; ++i) text += char(rng() % 256);
        } else {
            for (int i = 0; i < len; ++i) {
                text += vocab[rng() % std::size(vocab)];
                text += ' ';
            }
        }
        auto pr = dsl::parse_source(text, "fuzz.disco");
        (void)pr;  // must return; any diagnostics are fine
    }
}

TEST_CASE("resolver rejects kind mismatches with pinpointed spans") {
    // a participation user naming a task instead of an actor
    auto errs = resolve_errors(
        "diagram taskstructure D { task T; actor A; parti p { tact T; user T; } }");
    REQUIRE(has_error(errs, "kind-mismatch"));
    const auto& e = first_error(errs, "kind-mismatch");
    CHECK(e.message.find("user") != std::string::npos);
    CHECK(e.span.line == 1);

    // an aggregation head naming an actor
    auto errs2 = resolve_errors(
        "diagram taskstructure D { task T; actor A; agg r { head A; tail T; } }");
    CHECK(has_error(errs2, "kind-mismatch"));

    // goals cannot be whole-part endpoints either
    auto errs3 =
        resolve_errors("diagram taskstructure D { task T; goal G; comp c { head T; tail G; } }");
    CHECK(has_error(errs3, "kind-mismatch"));

    // expect only applies to structure relationships
    auto errs4 = resolve_errors(
        "diagram taskstructure D { task T; actor A; parti p { tact T; user A; expect tail = 1; } }");
    CHECK(has_error(errs4, "kind-mismatch"));

    // transitions have no place in a task structure diagram
    auto errs5 = resolve_errors(
        "diagram taskstructure D { task T; trans t { source T; target T; } }");
    CHECK(has_error(errs5, "kind-mismatch"));

    // state elements have no place in a task structure diagram
    auto errs6 = resolve_errors("diagram taskstructure D { state S; }");
    CHECK(has_error(errs6, "kind-mismatch"));

    // association classes only live in data diagrams
    auto errs7 = resolve_errors("diagram taskstructure D { assocclass X; }");
    CHECK(has_error(errs7, "kind-mismatch"));
    auto errs8 = resolve_errors("diagram data D { assocclass X; object O; }");
    CHECK(errs8.empty());
}

TEST_CASE("resolver reports unknown and ambiguous names") {
    auto errs = resolve_errors("diagram taskstructure D { task T; agg r { head T; tail U; } }");
    REQUIRE(has_error(errs, "unknown-name"));
    CHECK(first_error(errs, "unknown-name").message.find("'U'") != std::string::npos);

    auto errs2 = resolve_errors(
        "diagram taskstructure D { task X; object X; agg r { head X; } }");
    CHECK(has_error(errs2, "ambiguous-name"));

    auto errs3 = resolve_errors(
        "diagram taskstructure D { task T; }\nmodel taskstructure M { diagrams D, Nope; }");
    REQUIRE(has_error(errs3, "unknown-name"));
    CHECK(first_error(errs3, "unknown-name").message.find("Nope") != std::string::npos);
    CHECK(first_error(errs3, "unknown-name").span.line == 2);
}

TEST_CASE("resolver enforces model and relationship shape") {
    auto errs = resolve_errors(
        "diagram data D { object O; }\nmodel taskstructure M { diagrams D; }");
    CHECK(has_error(errs, "wrong-diagram-kind-in-model"));

    auto errs2 = resolve_errors(
        "diagram taskstructure D { task T; actor A; parti p { tact T; } }");
    CHECK(has_error(errs2, "missing-field"));

    auto errs3 = resolve_errors("diagram taskstructure D { task T; agg r { tail T; } }");
    CHECK(has_error(errs3, "missing-field"));

    // shared kinds must have a place in the member diagram kind
    auto errs4 = resolve_errors(
        "diagram data D { object O; }\nmodel data M { diagrams D; shared task O; }");
    CHECK(has_error(errs4, "kind-mismatch"));

    auto errs5 = resolve_errors(
        "diagram taskstructure D { task T; }\nsystem S { models Nope; }");
    CHECK(has_error(errs5, "unknown-name"));
}

TEST_CASE("structure tails may be empty at resolve time") {
    auto pr = dsl::parse_source("diagram taskstructure D { task T; comp c { head T; } }");
    REQUIRE(pr.errors.empty());
    auto rr = dsl::resolve(pr.doc, cat());
    REQUIRE(rr.errors.empty());
    const auto& rels = rr.workspace.diagrams[0].relationships;
    REQUIRE(rels.size() == 1);
    CHECK(rels[0].tail.empty());
    CHECK_FALSE(rels[0].expect_tail.has_value());
}

TEST_CASE("multiple documents share one namespace") {
    auto a = dsl::parse_source("diagram taskstructure D { task T; }", "a.disco");
    auto b = dsl::parse_source("diagram taskstructure D { task U; }", "b.disco");
    REQUIRE(a.errors.empty());
    REQUIRE(b.errors.empty());
    auto rr = dsl::resolve(std::vector<dsl::SourceDocument>{a.doc, b.doc}, cat());
    CHECK(has_error(rr.errors, "duplicate-name"));

    auto c = dsl::parse_source("diagram taskstructure D1 { task T; }", "a.disco");
    auto d = dsl::parse_source("model taskstructure M { diagrams D1; }", "b.disco");
    auto rr2 = dsl::resolve(std::vector<dsl::SourceDocument>{c.doc, d.doc}, cat());
    CHECK(rr2.errors.empty());
    CHECK(rr2.workspace.find_model("M"));
}

TEST_CASE("printing and reparsing a workspace is the identity") {
    std::mt19937 rng(4242);
    for (int it = 0; it < 50; ++it) {
        std::string text = testsup::random_workspace_text(rng);
        INFO(text);
        Workspace ws1 = testsup::must_resolve(text, cat());
        std::string printed = print_workspace(ws1);
        INFO(printed);
        Workspace ws2 = testsup::must_resolve(printed, cat());
        CHECK(structurally_equal(ws1, ws2));
        CHECK(print_workspace(ws2) == printed);
    }

    Workspace circ = testsup::must_resolve(testsup::kCirculation, cat());
    Workspace circ2 = testsup::must_resolve(print_workspace(circ), cat());
    CHECK(structurally_equal(circ, circ2));
}
