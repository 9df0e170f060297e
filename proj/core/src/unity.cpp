#include "appc/unity.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "appc/text.hpp"

namespace appc {

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void join(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

UnityCheck check_spatial(const TracePrefix& tr, const Signature& sig) {
    if (sig.num_objects() <= 1) return {};
    for (std::size_t t = 0; t < tr.states.size(); ++t) {
        UnionFind uf(sig.num_objects());
        for (const auto& a : tr.states[t])
            if (a.arity == 2) uf.join(a.args[0], a.args[1]);
        int root0 = uf.find(0);
        for (ObjectId o = 1; o < ObjectId(sig.num_objects()); ++o) {
            if (uf.find(o) != root0) {
                UnityCheck c;
                c.pass = false;
                c.time = t + 1;
                c.witness = "(" + sig.object(0).name + ", " + sig.object(o).name + ")";
                return c;
            }
        }
    }
    return {};
}

UnityCheck check_conceptual(const Signature& sig, const std::vector<Constraint>& constraints) {
    for (PredId p = 0; p < PredId(sig.num_preds()); ++p) {
        bool unary = sig.pred(p).arg_types.size() == 1;
        bool covered = false;
        for (const auto& c : constraints) {
            bool in = std::binary_search(c.preds.begin(), c.preds.end(), p);
            if (!in) continue;
            if (unary && c.kind == Constraint::XorUnary) covered = true;
            if (!unary && (c.kind == Constraint::XorBinary || c.kind == Constraint::ExistsUnique))
                covered = true;
        }
        if (!covered) {
            UnityCheck c;
            c.pass = false;
            c.witness = sig.pred(p).name;
            return c;
        }
    }
    return {};
}

UnityCheck check_static(const TracePrefix& tr, const Signature& sig,
                        const std::vector<Constraint>& constraints) {
    for (std::size_t t = 0; t < tr.states.size(); ++t) {
        const auto& state = tr.states[t];
        auto holds = [&](const Atom& a) { return std::binary_search(state.begin(), state.end(), a); };
        for (const auto& c : constraints) {
            auto fail = [&]() {
                UnityCheck out;
                out.pass = false;
                out.time = t + 1;
                out.witness = constraint_to_string(sig, c);
                return out;
            };
            if (c.kind == Constraint::XorUnary) {
                for (ObjectId o : sig.objects_of_type(sig.pred(c.preds[0]).arg_types[0])) {
                    int n = 0;
                    for (PredId p : c.preds) n += holds(make_ground_atom(sig, p, {o}));
                    if (n != 1) return fail();
                }
            } else if (c.kind == Constraint::XorBinary) {
                const auto& ats = sig.pred(c.preds[0]).arg_types;
                for (ObjectId o1 : sig.objects_of_type(ats[0]))
                    for (ObjectId o2 : sig.objects_of_type(ats[1])) {
                        int n = 0;
                        for (PredId p : c.preds) n += holds(make_ground_atom(sig, p, {o1, o2}));
                        if (n != 1) return fail();
                    }
            } else {
                PredId r = c.preds[0];
                const auto& ats = sig.pred(r).arg_types;
                for (ObjectId o1 : sig.objects_of_type(ats[0])) {
                    int n = 0;
                    for (ObjectId o2 : sig.objects_of_type(ats[1]))
                        n += holds(make_ground_atom(sig, r, {o1, o2}));
                    if (n != 1) return fail();
                }
            }
        }
    }
    return {};
}

UnityCheck check_temporal(const Theory& t, const TracePrefix& tr) {
    if (tr.states.size() < 2) return {};
    Semantics sem(t.sig, t.constraints);
    std::vector<Rule> causal;
    for (const auto& r : t.rules)
        if (r.kind == Rule::Causal) causal.push_back(r);
    auto compiled = sem.compile(causal);

    Bits cur = sem.make_state(tr.states[0]);
    for (std::size_t i = 0; i + 1 < tr.states.size(); ++i) {
        Bits next = sem.make_state(tr.states[i + 1]);
        for (const auto& in : compiled.instances) {
            if (compiled.body_sat(in, cur) && !next.test(in.head)) {
                UnityCheck c;
                c.pass = false;
                c.time = i + 1;
                c.witness = rule_to_string(*t.sig, causal[in.rule]);
                return c;
            }
        }
        cur = std::move(next);
    }
    return {};
}

UnityReport unified(const Theory& t, const SensorySequence& s, TraceOptions opts) {
    UnityReport rep;
    std::size_t horizon = std::max<std::size_t>(1, s.length());
    auto tr = trace(t, horizon, opts);
    rep.conceptual = check_conceptual(*t.sig, t.constraints);
    if (!tr.ok()) {
        // a violated trace is a static-unity failure at the reported step
        rep.static_unity.pass = false;
        rep.static_unity.time = tr.violation->time;
        rep.static_unity.witness = atom_to_string(*t.sig, tr.violation->a) + " / " +
                                   atom_to_string(*t.sig, tr.violation->b);
        rep.covers = false;
        // remaining checks run on whatever prefix exists
        rep.spatial = check_spatial(tr.prefix, *t.sig);
        rep.temporal = check_temporal(t, tr.prefix);
        return rep;
    }
    rep.spatial = check_spatial(tr.prefix, *t.sig);
    rep.static_unity = check_static(tr.prefix, *t.sig, t.constraints);
    rep.temporal = check_temporal(t, tr.prefix);
    rep.covers = covers(tr.prefix, s);
    return rep;
}

std::string report_to_string(const UnityReport& r) {
    std::ostringstream os;
    auto line = [&](const char* name, const UnityCheck& c) {
        os << name << ": " << (c.pass ? "pass" : "FAIL");
        if (!c.pass) {
            if (c.time) os << " at step " << c.time;
            if (!c.witness.empty()) os << " (" << c.witness << ")";
        }
        os << "\n";
    };
    line("spatial unity", r.spatial);
    line("conceptual unity", r.conceptual);
    line("static unity", r.static_unity);
    line("temporal unity", r.temporal);
    os << "covers: " << (r.covers ? "yes" : "no") << "\n";
    os << "unified: " << (r.unified() ? "yes" : "no") << "\n";
    return os.str();
}

}  // namespace appc
