#include "appc/lang.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace appc {

static void check_pred(const Signature& sig, PredId p, std::size_t nargs) {
    if (p < 0 || p >= PredId(sig.num_preds())) throw std::invalid_argument("bad predicate id");
    if (sig.pred(p).arg_types.size() != nargs)
        throw std::invalid_argument("arity mismatch for predicate " + sig.pred(p).name);
}

Atom make_ground_atom(const Signature& sig, PredId p, const std::vector<ObjectId>& args) {
    check_pred(sig, p, args.size());
    Atom a;
    a.pred = p;
    a.arity = std::uint8_t(args.size());
    a.ground = true;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] < 0 || args[i] >= ObjectId(sig.num_objects()))
            throw std::invalid_argument("bad object id");
        a.args[i] = args[i];
    }
    return a;
}

Atom make_var_atom(const Signature& sig, PredId p, const std::vector<VarId>& args) {
    check_pred(sig, p, args.size());
    Atom a;
    a.pred = p;
    a.arity = std::uint8_t(args.size());
    a.ground = false;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] < 0 || args[i] >= VarId(sig.num_vars()))
            throw std::invalid_argument("bad variable id");
        a.args[i] = args[i];
    }
    return a;
}

Atom make_atom(const Signature& sig, const std::string& pred_name,
               const std::vector<std::string>& arg_names) {
    auto p = sig.find_pred(canonical_name(pred_name));
    if (!p) throw std::invalid_argument("unknown predicate: " + pred_name);
    int n_obj = 0, n_var = 0;
    std::vector<std::int32_t> ids;
    for (const auto& raw : arg_names) {
        auto name = canonical_name(raw);
        if (auto o = sig.find_object(name)) {
            ++n_obj;
            ids.push_back(*o);
        } else if (auto v = sig.find_var(name)) {
            ++n_var;
            ids.push_back(*v);
        } else {
            throw std::invalid_argument("unknown object/variable: " + raw);
        }
    }
    if (n_obj > 0 && n_var > 0)
        throw std::invalid_argument("mixed atom (objects and variables) rejected: " + pred_name);
    check_pred(sig, *p, arg_names.size());
    Atom a;
    a.pred = *p;
    a.arity = std::uint8_t(arg_names.size());
    a.ground = (n_var == 0);
    for (std::size_t i = 0; i < ids.size(); ++i) a.args[i] = ids[i];
    return a;
}

std::string atom_to_string(const Signature& sig, const Atom& a) {
    std::string s = sig.pred(a.pred).name;
    s += '(';
    for (int i = 0; i < int(a.arity); ++i) {
        if (i) s += ',';
        s += a.ground ? sig.object(a.args[i]).name : sig.var(a.args[i]).name;
    }
    s += ')';
    return s;
}

bool well_typed(const Atom& a, const Signature& sig) {
    if (a.pred < 0 || a.pred >= PredId(sig.num_preds())) throw std::invalid_argument("bad predicate id");
    const auto& decl = sig.pred(a.pred);
    if (decl.arg_types.size() != a.arity) return false;
    for (int i = 0; i < int(a.arity); ++i) {
        TypeId t = a.ground ? sig.object(a.args[i]).type : sig.var(a.args[i]).type;
        if (t != decl.arg_types[i]) return false;
    }
    return true;
}

std::vector<VarId> collect_vars(const std::vector<Atom>& atoms, const Atom* head) {
    std::set<VarId> vs;
    for (const auto& a : atoms)
        for (int i = 0; i < int(a.arity); ++i) vs.insert(a.args[i]);
    if (head)
        for (int i = 0; i < int(head->arity); ++i) vs.insert(head->args[i]);
    return {vs.begin(), vs.end()};
}

void validate_rule(const Signature& sig, const Rule& r) {
    if (r.body.empty()) throw std::invalid_argument("rule body must be non-empty");
    if (r.head.ground) throw std::invalid_argument("rule head must be unground");
    if (!well_typed(r.head, sig)) throw std::invalid_argument("ill-typed rule head");
    std::set<VarId> body_vars;
    for (const auto& b : r.body) {
        if (b.ground) throw std::invalid_argument("rule body atoms must be unground");
        if (!well_typed(b, sig)) throw std::invalid_argument("ill-typed body atom");
        for (int i = 0; i < int(b.arity); ++i) body_vars.insert(b.args[i]);
    }
    for (int i = 0; i < int(r.head.arity); ++i)
        if (!body_vars.count(r.head.args[i]))
            throw std::invalid_argument("unsafe rule: head variable not in body");
}

void validate_constraint(const Signature& sig, const Constraint& c) {
    if (c.preds.empty()) throw std::invalid_argument("empty constraint");
    for (PredId p : c.preds)
        if (p < 0 || p >= PredId(sig.num_preds())) throw std::invalid_argument("bad predicate in constraint");
    const auto& first = sig.pred(c.preds[0]);
    for (PredId p : c.preds)
        if (sig.pred(p).arg_types != first.arg_types)
            throw std::invalid_argument("constraint predicates must share argument types");
    switch (c.kind) {
        case Constraint::XorUnary:
            if (first.arg_types.size() != 1) throw std::invalid_argument("xor needs unary predicates");
            if (c.preds.size() < 2) throw std::invalid_argument("xor group needs >= 2 predicates");
            break;
        case Constraint::XorBinary:
            if (first.arg_types.size() != 2) throw std::invalid_argument("xor2 needs binary predicates");
            if (c.preds.size() < 2) throw std::invalid_argument("xor2 group needs >= 2 predicates");
            break;
        case Constraint::ExistsUnique:
            if (first.arg_types.size() != 2) throw std::invalid_argument("unique needs a binary predicate");
            if (c.preds.size() != 1) throw std::invalid_argument("unique takes exactly one predicate");
            break;
    }
    if (!std::is_sorted(c.preds.begin(), c.preds.end()))
        throw std::invalid_argument("constraint predicates must be sorted");
    for (std::size_t i = 1; i < c.preds.size(); ++i)
        if (c.preds[i] == c.preds[i - 1]) throw std::invalid_argument("duplicate predicate in constraint");
}

void Theory::normalize() {
    std::sort(inits.begin(), inits.end());
    inits.erase(std::unique(inits.begin(), inits.end()), inits.end());
    std::sort(rules.begin(), rules.end());
    rules.erase(std::unique(rules.begin(), rules.end()), rules.end());
    std::sort(constraints.begin(), constraints.end());
    constraints.erase(std::unique(constraints.begin(), constraints.end()), constraints.end());
}

void validate_theory(const Theory& t) {
    if (!t.sig) throw std::invalid_argument("theory without signature");
    const Signature& sig = *t.sig;
    for (const auto& a : t.inits) {
        if (!a.ground) throw std::invalid_argument("initial conditions must be ground");
        if (!well_typed(a, sig))
            throw std::invalid_argument("ill-typed initial atom: " + atom_to_string(sig, a));
    }
    for (const auto& r : t.rules) validate_rule(sig, r);
    std::set<PredId> seen;
    for (const auto& c : t.constraints) {
        validate_constraint(sig, c);
        for (PredId p : c.preds) {
            if (seen.count(p))
                throw std::invalid_argument("predicate in two constraints: " + sig.pred(p).name);
            seen.insert(p);
        }
    }
}

void SensorySequence::normalize() {
    for (auto& st : steps) {
        std::sort(st.begin(), st.end());
        st.erase(std::unique(st.begin(), st.end()), st.end());
    }
}

void validate_template(const Template& t) {
    if (!t.sig) throw std::invalid_argument("template without signature");
    if (t.n_body < 1) throw std::invalid_argument("template needs n_body >= 1");
    if (t.n_static < 0 || t.n_causal < 0) throw std::invalid_argument("negative rule bound");
    if (t.n_static + t.n_causal < 1) throw std::invalid_argument("template needs at least one rule slot");
}

}  // namespace appc
