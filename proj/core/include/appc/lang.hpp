#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "appc/signature.hpp"

namespace appc {

// An atom is either ground (all arguments are objects) or unground (all
// arguments are variables). Mixed atoms are rejected everywhere.
struct Atom {
    PredId pred = -1;
    std::array<std::int32_t, 2> args{-1, -1};  // ObjectId or VarId per `ground`
    std::uint8_t arity = 0;
    bool ground = false;

    auto key() const { return std::tuple(pred, args[0], args[1], ground); }
    bool operator==(const Atom& o) const { return key() == o.key(); }
    bool operator!=(const Atom& o) const { return !(*this == o); }
    bool operator<(const Atom& o) const { return key() < o.key(); }
};

Atom make_ground_atom(const Signature& sig, PredId p, const std::vector<ObjectId>& args);
Atom make_var_atom(const Signature& sig, PredId p, const std::vector<VarId>& args);
// Resolves names; decides ground vs unground from what the names denote.
// Unknown names and mixed atoms raise std::invalid_argument.
Atom make_atom(const Signature& sig, const std::string& pred_name,
               const std::vector<std::string>& arg_names);

std::string atom_to_string(const Signature& sig, const Atom& a);

// True iff each argument's declared type equals the predicate's argument type
// at that position. Precondition: atom's ids are valid for `sig`.
bool well_typed(const Atom& a, const Signature& sig);

struct Rule {
    enum Kind { Static, Causal };
    Kind kind = Static;
    std::vector<Atom> body;  // unground, non-empty
    Atom head;               // unground; vars(head) ⊆ vars(body)

    bool operator==(const Rule& o) const {
        return kind == o.kind && head == o.head && body == o.body;
    }
    bool operator<(const Rule& o) const {
        return std::tuple(int(kind), head, body) < std::tuple(int(o.kind), o.head, o.body);
    }
};

// Checks safety, non-empty body, well-typedness, groundness.
void validate_rule(const Signature& sig, const Rule& r);

struct Constraint {
    enum Kind { XorUnary, XorBinary, ExistsUnique };
    Kind kind = XorUnary;
    std::vector<PredId> preds;  // sorted; ≥2 for xor kinds, exactly 1 for ∃!

    bool operator==(const Constraint& o) const { return kind == o.kind && preds == o.preds; }
    bool operator<(const Constraint& o) const {
        return std::tuple(int(kind), preds) < std::tuple(int(o.kind), o.preds);
    }
};

void validate_constraint(const Signature& sig, const Constraint& c);

struct Theory {
    SignaturePtr sig;
    std::vector<Atom> inits;            // ground, sorted canonically
    std::vector<Rule> rules;            // sorted canonically
    std::vector<Constraint> constraints;  // sorted canonically

    void normalize();  // sort + dedupe
};

// Full well-formedness check: typing, groundness, safety, constraint
// discipline (identical argument types within a constraint, no predicate in
// two constraints).
void validate_theory(const Theory& t);

struct SensorySequence {
    std::vector<std::vector<Atom>> steps;  // ground atoms, sorted per step

    std::size_t length() const { return steps.size(); }
    void normalize();
};

struct Template {
    SignaturePtr sig;
    int n_static = 0;
    int n_causal = 0;
    int n_body = 1;
    std::string name;  // optional label from template files
};

void validate_template(const Template& t);

// Variable ids occurring in an atom list.
std::vector<VarId> collect_vars(const std::vector<Atom>& atoms, const Atom* head = nullptr);

}  // namespace appc
