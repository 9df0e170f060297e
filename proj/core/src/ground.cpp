#include "appc/ground.hpp"

#include <stdexcept>

namespace appc {

GroundSpace::GroundSpace(SignaturePtr sig) : sig_(std::move(sig)) {
    atoms_ = ground_atoms(*sig_);
    for (std::size_t i = 0; i < atoms_.size(); ++i) index_[atoms_[i]] = i;
}

std::optional<std::size_t> GroundSpace::index(const Atom& a) const {
    auto it = index_.find(a);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::size_t GroundSpace::index_checked(const Atom& a) const {
    auto it = index_.find(a);
    if (it == index_.end())
        throw std::invalid_argument("atom not in ground space: " + atom_to_string(*sig_, a));
    return it->second;
}

UngroundSpace::UngroundSpace(SignaturePtr sig) : sig_(std::move(sig)) {
    atoms_ = unground_atoms(*sig_);
    for (std::size_t i = 0; i < atoms_.size(); ++i) index_[atoms_[i]] = i;
}

std::optional<std::size_t> UngroundSpace::index(const Atom& a) const {
    auto it = index_.find(a);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::vector<Substitution> substitutions(const Signature& sig) {
    std::vector<Substitution> out;
    std::size_t nv = sig.num_vars();
    std::vector<const std::vector<ObjectId>*> choices(nv);
    for (VarId v = 0; v < VarId(nv); ++v) {
        choices[v] = &sig.objects_of_type(sig.var(v).type);
        if (choices[v]->empty()) return out;  // no total map exists
    }
    Substitution cur(nv, -1);
    // product over per-type object sets, canonical order
    auto rec = [&](auto&& self, std::size_t level) -> void {
        if (level == nv) {
            out.push_back(cur);
            return;
        }
        for (ObjectId o : *choices[level]) {
            cur[level] = o;
            self(self, level + 1);
        }
    };
    rec(rec, 0);
    return out;
}

Atom apply_subst(const Signature& sig, const Atom& unground, const Substitution& s) {
    if (unground.ground) throw std::invalid_argument("apply_subst expects an unground atom");
    std::vector<ObjectId> args;
    for (int i = 0; i < int(unground.arity); ++i) {
        VarId v = unground.args[i];
        if (v < 0 || std::size_t(v) >= s.size() || s[v] < 0)
            throw std::invalid_argument("missing binding for variable " + sig.var(v).name);
        args.push_back(s[v]);
    }
    return make_ground_atom(sig, unground.pred, args);
}

std::vector<Atom> ground_atoms(const Signature& sig) {
    std::vector<Atom> out;
    for (PredId p = 0; p < PredId(sig.num_preds()); ++p) {
        const auto& decl = sig.pred(p);
        if (decl.arg_types.size() == 1) {
            for (ObjectId o : sig.objects_of_type(decl.arg_types[0]))
                out.push_back(make_ground_atom(sig, p, {o}));
        } else {
            for (ObjectId o1 : sig.objects_of_type(decl.arg_types[0]))
                for (ObjectId o2 : sig.objects_of_type(decl.arg_types[1]))
                    out.push_back(make_ground_atom(sig, p, {o1, o2}));
        }
    }
    return out;
}

std::vector<Atom> unground_atoms(const Signature& sig) {
    std::vector<Atom> out;
    for (PredId p = 0; p < PredId(sig.num_preds()); ++p) {
        const auto& decl = sig.pred(p);
        if (decl.arg_types.size() == 1) {
            for (VarId v : sig.vars_of_type(decl.arg_types[0]))
                out.push_back(make_var_atom(sig, p, {v}));
        } else {
            for (VarId v1 : sig.vars_of_type(decl.arg_types[0]))
                for (VarId v2 : sig.vars_of_type(decl.arg_types[1]))
                    out.push_back(make_var_atom(sig, p, {v1, v2}));
        }
    }
    return out;
}

}  // namespace appc
