#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "disco/ast.hpp"

namespace disco::rel {

struct SpecError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ScopeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

enum class Mult { One, Lone, Set };

// A binary field owner -> target. `exclude` optionally names a signature whose
// extent is subtracted from the allowed targets (set-difference field typing).
struct FieldDecl {
    std::string name;
    std::string owner;
    std::string target;
    Mult mult = Mult::Set;
    std::string exclude;

    std::string qualified() const { return owner + "." + name; }
};

struct SignatureDecl {
    std::string name;
    bool is_abstract = false;
    std::string parent;             // empty for forest roots
    std::vector<FieldDecl> fields;
};

// Immutable after construction. The constructor indexes signatures and fields
// and rejects malformed declarations (unknown parents, parent cycles,
// duplicate names, fields with unknown owner/target).
class Spec {
public:
    struct FieldInfo {
        FieldDecl decl;
        int owner_sig;
        int target_sig;
        int exclude_sig;  // -1 when absent
    };

    Spec() = default;
    Spec(std::vector<SignatureDecl> sigs,
         std::vector<std::pair<std::string, FormulaPtr>> facts);

    const std::vector<SignatureDecl>& signatures() const { return sigs_; }
    const std::vector<std::pair<std::string, FormulaPtr>>& facts() const { return facts_; }

    int sig_index(std::string_view name) const;             // -1 when unknown
    int sig_index_checked(std::string_view name) const;     // throws SpecError
    const SignatureDecl& signature(int i) const { return sigs_[i]; }
    const std::vector<int>& children(int sig) const { return children_[sig]; }
    const std::vector<int>& roots() const { return roots_; }

    // reflexive-transitive subtype test
    bool conforms(int kind, int ancestor) const;
    bool conforms(std::string_view kind, std::string_view ancestor) const;

    const std::vector<FieldInfo>& fields() const { return fields_; }
    // Accepts "Owner.name" or a bare name when unambiguous; -1 when unknown,
    // -2 when ambiguous.
    int field_index(std::string_view name) const;
    int field_index_checked(std::string_view name) const;

private:
    std::vector<SignatureDecl> sigs_;
    std::vector<std::pair<std::string, FormulaPtr>> facts_;
    std::vector<FieldInfo> fields_;
    std::vector<std::vector<int>> children_;
    std::vector<int> roots_;
    std::map<std::string, int, std::less<>> sig_by_name_;
    std::map<std::string, int, std::less<>> field_by_qualified_;
    std::map<std::string, int, std::less<>> field_by_bare_;  // -2 marks ambiguous
};

// Requested atom counts per signature name. Counts are inclusive of subtypes;
// missing names mean zero.
struct Scope {
    std::map<std::string, long> counts;

    long get(std::string_view name) const {
        auto it = counts.find(std::string(name));
        return it == counts.end() ? 0 : it->second;
    }
    void set(const std::string& name, long n) { counts[name] = n; }
};

// Per-signature own atom count (count minus the subtype counts). Throws
// ScopeError on unknown names, negatives, abstract signatures with own
// atoms, or concrete counts smaller than the sum of their children.
std::vector<long> own_counts(const Spec& spec, const Scope& scope);

// Static checks on a formula against a spec: names resolve, arities agree,
// variables are bound. Throws SpecError with a descriptive message.
void validate_formula(const Spec& spec, const Formula& f);

} // namespace disco::rel
