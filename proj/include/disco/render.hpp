#pragma once

#include <string>
#include <vector>

#include "disco/checker.hpp"

namespace disco::render {

std::string verdict_word(check::CheckVerdict v);

// Indented tree: subject header, member diagrams with their element and
// relationship lines, shared expectations, findings. Timing is never printed,
// so the output is byte-stable across runs.
std::string report_text(const check::Report& r);

// One object per report with the closed key set {findings, level, scope?,
// subject, timing_ms, verdict}; keys and findings sorted. `scope` appears only
// when the solver ran.
std::string report_json(const check::Report& r);
// a single report renders as an object, several as an array
std::string reports_json(const std::vector<check::Report>& rs);
std::string reports_text(const std::vector<check::Report>& rs);

// one box per element, one fan-out edge per relationship (wholes point at
// parts, users point at their task)
std::string report_dot(const check::Report& r);

// exact-scope enumeration, one "exactly N Kind" line per catalog signature
std::string scope_text(const rel::Scope& s, const meta::MetamodelCatalog& cat);
std::string scope_json(const rel::Scope& s, const meta::MetamodelCatalog& cat);

// solver outcome with the pinned-atom legend and found instances
std::string verdict_text(const check::Verdict& v);
std::string verdict_json(const check::Verdict& v);

std::string suite_text(const std::vector<check::AssertionResult>& rs);
std::string suite_json(const std::vector<check::AssertionResult>& rs);

} // namespace disco::render
