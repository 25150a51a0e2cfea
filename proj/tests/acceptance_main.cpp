#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "support.hpp"

// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure. argv[1] is the CLI binary, argv[2] the directory with the
// reference workspaces.

namespace {

struct RunOut {
    int code = -1;
    std::string out;
};

RunOut run_cmd(const std::string& cmd) {
    RunOut r;
    FILE* p = popen((cmd + " 2>/dev/null").c_str(), "r");
    if (!p) return r;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    int st = pclose(p);
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

std::string quoted(const std::string& s) { return "'" + s + "'"; }

// drop lines mentioning timing, the one non-deterministic report field
std::string strip_timing(const std::string& s) {
    std::istringstream in(s);
    std::string line, out;
    while (std::getline(in, line))
        if (line.find("\"timing_ms\"") == std::string::npos) out += line + "\n";
    return out;
}

struct Gate {
    bool all_ok = true;

    void report(int n, const std::string& label, bool ok, double seconds, double budget,
                const std::string& why) {
        bool in_budget = seconds <= budget;
        all_ok = all_ok && ok && in_budget;
        std::string suffix;
        if (!ok) suffix += " - " + why;
        if (!in_budget) suffix += " - over time budget";
        std::printf("criterion %d (%s): %s in %.2fs%s\n", n, label.c_str(),
                    ok && in_budget ? "PASS" : "FAIL", seconds, suffix.c_str());
    }
};

using Clock = std::chrono::steady_clock;

double secs_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

const std::map<std::string, long> kReferenceScope{
    {"Model", 1},        {"TaskStModel", 1},  {"DiagramView", 2}, {"TaskStDiagramView", 2},
    {"Relationship", 4}, {"Structure", 2},    {"Generalisation", 1}, {"Aggregation", 1},
    {"Participation", 2}, {"Node", 7},        {"StateAndTask", 5}, {"TaskActivity", 5},
    {"Task", 5},         {"Actor", 2},
};

} // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::fprintf(stderr, "usage: %s <disco-binary> <data-dir>\n", argv[0]);
        return 2;
    }
    const std::string cli = quoted(argv[1]);
    const std::string data = argv[2];
    const std::string circ = quoted(data + "/circulation.disco");
    const std::string part = quoted(data + "/shared_part.disco");
    Gate gate;

    {
        auto t0 = Clock::now();
        bool ok = true;
        std::string why;
        auto check = run_cmd(cli + " check " + circ + " --level all");
        if (check.code != 0) {
            ok = false;
            why = "check exited " + std::to_string(check.code);
        } else if (check.out.find("model CirculationModel [TaskStModel]: valid") ==
                       std::string::npos ||
                   check.out.find("diagram Circulation [TaskStDiagramView]: valid") ==
                       std::string::npos ||
                   check.out.find("diagram LoanTransactionTS [TaskStDiagramView]: valid") ==
                       std::string::npos) {
            ok = false;
            why = "check output lacks the three valid subjects";
        }
        if (ok) {
            auto scope = run_cmd(cli + " scope " + circ);
            if (scope.code != 0) {
                ok = false;
                why = "scope exited " + std::to_string(scope.code);
            } else {
                std::istringstream in(scope.out);
                std::string word, name;
                long n, lines = 0;
                while (in >> word) {
                    if (word != "exactly") {
                        std::getline(in, name);  // the subject header line
                        continue;
                    }
                    in >> n >> name;
                    ++lines;
                    auto it = kReferenceScope.find(name);
                    long want = it == kReferenceScope.end() ? 0 : it->second;
                    if (n != want) {
                        ok = false;
                        why = "scope line '" + name + "' is " + std::to_string(n) + ", expected " +
                              std::to_string(want);
                        break;
                    }
                }
                if (ok && lines != 32) {
                    ok = false;
                    why = "expected 32 scope lines, got " + std::to_string(lines);
                }
            }
        }
        gate.report(1, "reference workspace end-to-end", ok, secs_since(t0), 5.0, why);
    }

    {
        auto t0 = Clock::now();
        bool ok = true;
        std::string why;
        auto check = run_cmd(cli + " check " + part + " --level model");
        if (check.code != 1) {
            ok = false;
            why = "check exited " + std::to_string(check.code) + ", expected 1";
        } else if (check.out.find("F4") == std::string::npos ||
                   check.out.find("'Z'") == std::string::npos) {
            ok = false;
            why = "check output does not name Z under F4";
        }
        if (ok) {
            auto find = run_cmd(cli + " find " + part + " --level model");
            if (find.code != 1 || find.out.find("no-instance") == std::string::npos) {
                ok = false;
                why = "find did not report no-instance with exit 1 (exit " +
                      std::to_string(find.code) + ")";
            }
        }
        gate.report(2, "doubly-owned part refuted", ok, secs_since(t0), 5.0, why);
    }

    {
        auto t0 = Clock::now();
        bool ok = true;
        std::string why;
        auto cat = disco::meta::declare_metamodel();
        auto rs = disco::check::builtin_assertion_suite(cat, 3);
        std::map<std::string, const disco::check::AssertionResult*> by_id;
        for (const auto& r : rs) by_id[r.id] = &r;
        for (const char* id : {"A1", "A2", "A3"}) {
            const auto* r = by_id.count(id) ? by_id[id] : nullptr;
            if (!r || !r->holds || r->budget_exceeded) {
                ok = false;
                why = std::string(id) + (r && r->budget_exceeded ? " ran out of budget"
                                                                 : " does not hold");
                break;
            }
        }
        const auto* reg = by_id.count("A1-no-F3") ? by_id["A1-no-F3"] : nullptr;
        if (ok && (!reg || reg->holds || !reg->counterexample_scope)) {
            ok = false;
            why = "regression run with F3 disabled found no counterexample";
        }
        if (ok) {
            const auto& sc = *reg->counterexample_scope;
            if (sc.get("Task") != 2 || sc.get("Composition") != 2 ||
                sc.get("TaskStDiagramView") != 1 || sc.get("TaskStModel") != 1) {
                ok = false;
                why = "regression counterexample is not at the minimal scope";
            }
        }
        gate.report(3, "assertion suite at scope 3 with F3 regression", ok, secs_since(t0), 60.0,
                    why);
    }

    {
        auto t0 = Clock::now();
        auto res = testsup::run_minispec_equivalence(220, 0xACCE55u);
        gate.report(4, "220 mini specs vs brute-force oracle", res.ok, secs_since(t0), 60.0,
                    res.detail);
    }

    {
        auto t0 = Clock::now();
        auto res = testsup::run_backend_agreement(120, 0xACCE56u);
        bool ok = res.ok && res.invalid_cases > 0;
        gate.report(5, "120 random workspaces, eval vs solver", ok, secs_since(t0), 120.0,
                    res.ok ? "sweep produced no invalid cases" : res.detail);
    }

    {
        auto t0 = Clock::now();
        bool ok = true;
        std::string why;
        const std::string cmds[] = {
            " check " + circ + " --level all",
            " check " + circ + " --level all --format json",
            " check " + part + " --level model --format json",
            " scope " + circ,
            " find " + circ + " --level model",
        };
        for (const auto& c : cmds) {
            auto a = run_cmd(cli + c);
            auto b = run_cmd(cli + c);
            if (a.code != b.code) {
                ok = false;
                why = "exit codes differ for" + c;
                break;
            }
            if (strip_timing(a.out) != strip_timing(b.out)) {
                ok = false;
                why = "output differs across runs for" + c;
                break;
            }
            if (c.find("json") != std::string::npos &&
                strip_timing(a.out) == a.out) {
                ok = false;
                why = "json output carries no timing field for" + c;
                break;
            }
        }
        gate.report(6, "byte-deterministic reports", ok, secs_since(t0), 30.0, why);
    }

    return gate.all_ok ? 0 : 1;
}
