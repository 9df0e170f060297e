#pragma once

#include <map>
#include <optional>
#include <vector>

#include "appc/lang.hpp"

namespace appc {

// All well-typed ground atoms of a signature, indexed densely in canonical
// order. |atoms| ≤ |P|·|O|².
class GroundSpace {
public:
    explicit GroundSpace(SignaturePtr sig);

    const Signature& sig() const { return *sig_; }
    SignaturePtr sig_ptr() const { return sig_; }
    std::size_t size() const { return atoms_.size(); }
    const Atom& atom(std::size_t i) const { return atoms_[i]; }
    std::optional<std::size_t> index(const Atom& a) const;
    std::size_t index_checked(const Atom& a) const;

private:
    SignaturePtr sig_;
    std::vector<Atom> atoms_;
    std::map<Atom, std::size_t> index_;
};

// All well-typed unground atoms, in canonical order; doubles as the total
// atom order used by rule-set symmetry breaking. |atoms| ≤ |P|·|V|².
class UngroundSpace {
public:
    explicit UngroundSpace(SignaturePtr sig);

    std::size_t size() const { return atoms_.size(); }
    const Atom& atom(std::size_t i) const { return atoms_[i]; }
    std::optional<std::size_t> index(const Atom& a) const;
    const std::vector<Atom>& atoms() const { return atoms_; }

private:
    SignaturePtr sig_;
    std::vector<Atom> atoms_;
    std::map<Atom, std::size_t> index_;
};

// A total type-respecting map from variables to objects.
using Substitution = std::vector<ObjectId>;  // indexed by VarId

// All total type-respecting substitutions, in canonical order.
// |result| ≤ |O|^|V|; empty when some variable's type has no objects
// (and exactly one empty map when there are no variables).
std::vector<Substitution> substitutions(const Signature& sig);

// Replaces variables by objects. The substitution must bind every variable of
// the atom (total maps always do; partial maps raise).
Atom apply_subst(const Signature& sig, const Atom& unground, const Substitution& s);

// Convenience wrappers matching the operation names.
std::vector<Atom> ground_atoms(const Signature& sig);
std::vector<Atom> unground_atoms(const Signature& sig);

}  // namespace appc
