#include "disco/instance.hpp"

#include <sstream>

namespace disco::rel {

int Universe::sig_of(std::string_view name) const {
    auto it = sig_by_name.find(name);
    return it == sig_by_name.end() ? -1 : it->second;
}

int Universe::field_of(std::string_view name) const {
    if (auto it = field_by_qualified.find(name); it != field_by_qualified.end())
        return it->second;
    if (auto it = field_by_bare.find(name); it != field_by_bare.end())
        return it->second;
    return -1;
}

std::shared_ptr<const Universe> make_universe(const Spec& spec, const Scope& scope) {
    auto own = own_counts(spec, scope);
    auto u = std::make_shared<Universe>();
    u->sigs = spec.signatures();
    for (std::size_t i = 0; i < u->sigs.size(); ++i)
        u->sig_by_name.emplace(u->sigs[i].name, int(i));

    // own atoms per signature, declaration order; names Kind$0..
    for (std::size_t i = 0; i < u->sigs.size(); ++i) {
        for (long k = 0; k < own[i]; ++k) {
            std::string name = u->sigs[i].name + "$" + std::to_string(k);
            u->atom_by_name.emplace(name, int(u->atoms.size()));
            u->atoms.push_back({std::move(name), int(i)});
        }
    }
    int n = u->n_atoms();
    u->extents.assign(u->sigs.size(), Bitset(std::size_t(n)));
    for (int a = 0; a < n; ++a) {
        // an atom belongs to its signature and every ancestor
        int cur = u->atoms[a].sig;
        while (cur >= 0) {
            u->extents[cur].set(std::size_t(a));
            const auto& p = u->sigs[cur].parent;
            cur = p.empty() ? -1 : u->sig_by_name.find(p)->second;
        }
    }

    for (const auto& fi : spec.fields()) {
        Universe::Field f;
        f.decl = fi.decl;
        f.owner_sig = fi.owner_sig;
        f.target_sig = fi.target_sig;
        f.exclude_sig = fi.exclude_sig;
        u->extents[fi.owner_sig].for_each([&](std::size_t a) { f.owners.push_back(int(a)); });
        f.targets = u->extents[fi.target_sig];
        if (fi.exclude_sig >= 0) f.targets.and_not(u->extents[fi.exclude_sig]);
        int idx = int(u->fields.size());
        u->field_by_qualified.emplace(f.decl.qualified(), idx);
        auto [it, fresh] = u->field_by_bare.emplace(f.decl.name, idx);
        if (!fresh) it->second = -2;
        u->fields.push_back(std::move(f));
    }
    return u;
}

Instance Instance::empty_of(std::shared_ptr<const Universe> u) {
    Instance inst;
    inst.rows.assign(u->fields.size(),
                     std::vector<Bitset>(std::size_t(u->n_atoms()), Bitset(std::size_t(u->n_atoms()))));
    inst.universe = std::move(u);
    return inst;
}

std::vector<std::string> Instance::atoms_of(std::string_view sig_name) const {
    int s = universe->sig_of(sig_name);
    if (s < 0) return {};
    std::vector<std::string> out;
    universe->extents[s].for_each([&](std::size_t a) { out.push_back(universe->atoms[a].name); });
    return out;
}

std::vector<std::pair<std::string, std::string>> Instance::tuples_of(std::string_view field_name) const {
    int f = universe->field_of(field_name);
    if (f < 0) return {};
    std::vector<std::pair<std::string, std::string>> out;
    for (int a = 0; a < universe->n_atoms(); ++a)
        rows[f][a].for_each([&](std::size_t b) {
            out.emplace_back(universe->atoms[a].name, universe->atoms[b].name);
        });
    return out;
}

std::string Instance::dump() const {
    std::ostringstream os;
    for (std::size_t s = 0; s < universe->sigs.size(); ++s) {
        const auto& sig = universe->sigs[s];
        if (sig.is_abstract) continue;
        bool own_any = false;
        universe->extents[s].for_each([&](std::size_t a) {
            if (universe->atoms[a].sig == int(s)) own_any = true;
        });
        if (!own_any) continue;
        os << sig.name << ":";
        for (int a = 0; a < universe->n_atoms(); ++a)
            if (universe->atoms[a].sig == int(s)) os << " " << universe->atoms[a].name;
        os << "\n";
    }
    for (std::size_t f = 0; f < universe->fields.size(); ++f) {
        os << universe->fields[f].decl.qualified() << ":";
        for (int a = 0; a < universe->n_atoms(); ++a)
            rows[f][a].for_each([&](std::size_t b) {
                os << " (" << universe->atoms[a].name << "," << universe->atoms[b].name << ")";
            });
        os << "\n";
    }
    return os.str();
}

} // namespace disco::rel
