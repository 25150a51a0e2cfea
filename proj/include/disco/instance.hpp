#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "disco/bitset.hpp"
#include "disco/spec.hpp"

namespace disco::rel {

// Atom table and extents for one spec+scope pair. Self-contained copy of the
// spec data the evaluator needs, so instances stay valid independently of the
// Spec they came from. Atoms are named Kind$0, Kind$1, ... in a fixed order
// (signature declaration order, then index), which is what makes search
// output and atom pinning deterministic.
struct Universe {
    struct Atom {
        std::string name;
        int sig;  // exact (concrete) signature
    };
    struct Field {
        FieldDecl decl;
        int owner_sig;
        int target_sig;
        int exclude_sig;
        std::vector<int> owners;   // atoms of the owner extent, ascending
        Bitset targets;            // allowed target atoms (exclude applied)
    };

    std::vector<SignatureDecl> sigs;
    std::vector<Atom> atoms;
    std::vector<Bitset> extents;                       // per signature
    std::vector<Field> fields;
    std::map<std::string, int, std::less<>> sig_by_name;
    std::map<std::string, int, std::less<>> field_by_qualified;
    std::map<std::string, int, std::less<>> field_by_bare;  // -2 marks ambiguous
    std::map<std::string, int, std::less<>> atom_by_name;

    int n_atoms() const { return int(atoms.size()); }
    int sig_of(std::string_view name) const;    // -1 when unknown
    int field_of(std::string_view name) const;  // -1 unknown, -2 ambiguous
};

std::shared_ptr<const Universe> make_universe(const Spec& spec, const Scope& scope);

// A total assignment of tuples to fields. rows[f][a] is the target set of
// atom a under field f (rows exist for every atom; non-owners stay empty).
struct Instance {
    std::shared_ptr<const Universe> universe;
    std::vector<std::vector<Bitset>> rows;

    static Instance empty_of(std::shared_ptr<const Universe> u);

    const std::string& atom_name(int a) const { return universe->atoms[a].name; }
    std::vector<std::string> atoms_of(std::string_view sig_name) const;
    // pairs (owner atom name, target atom name) for a field, ascending
    std::vector<std::pair<std::string, std::string>> tuples_of(std::string_view field_name) const;

    // canonical one-line-per-fact text; equal instances have equal dumps
    std::string dump() const;

    friend bool operator==(const Instance& a, const Instance& b) {
        return a.rows == b.rows;
    }
    friend bool operator<(const Instance& a, const Instance& b) {
        return a.rows < b.rows;
    }
};

} // namespace disco::rel
