#include "appc/trace.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

namespace appc {

Semantics::Semantics(SignaturePtr sig, const std::vector<Constraint>& constraints, TraceOptions opts)
    : space_(std::move(sig)), constraints_(constraints), opts_(opts) {
    std::sort(constraints_.begin(), constraints_.end());
    conflicts_.assign(space_.size(), Bits(space_.size()));
    if (!opts_.use_incompossibility) return;

    const Signature& s = space_.sig();
    auto mark = [&](std::size_t i, std::size_t j) {
        if (i == j) return;
        conflicts_[i].set(j);
        conflicts_[j].set(i);
    };
    for (const auto& c : constraints_) {
        if (c.kind == Constraint::XorUnary) {
            // distinct predicates of one group applied to the same object
            for (ObjectId o : s.objects_of_type(s.pred(c.preds[0]).arg_types[0])) {
                for (std::size_t x = 0; x < c.preds.size(); ++x)
                    for (std::size_t y = x + 1; y < c.preds.size(); ++y)
                        mark(space_.index_checked(make_ground_atom(s, c.preds[x], {o})),
                             space_.index_checked(make_ground_atom(s, c.preds[y], {o})));
            }
        } else if (c.kind == Constraint::XorBinary) {
            const auto& ats = s.pred(c.preds[0]).arg_types;
            for (ObjectId o1 : s.objects_of_type(ats[0]))
                for (ObjectId o2 : s.objects_of_type(ats[1]))
                    for (std::size_t x = 0; x < c.preds.size(); ++x)
                        for (std::size_t y = x + 1; y < c.preds.size(); ++y)
                            mark(space_.index_checked(make_ground_atom(s, c.preds[x], {o1, o2})),
                                 space_.index_checked(make_ground_atom(s, c.preds[y], {o1, o2})));
        } else {
            // ∃!: r(x,y) and r(x,y') with y ≠ y'
            PredId r = c.preds[0];
            const auto& ats = s.pred(r).arg_types;
            for (ObjectId o1 : s.objects_of_type(ats[0])) {
                const auto& range = s.objects_of_type(ats[1]);
                for (std::size_t x = 0; x < range.size(); ++x)
                    for (std::size_t y = x + 1; y < range.size(); ++y)
                        mark(space_.index_checked(make_ground_atom(s, r, {o1, range[x]})),
                             space_.index_checked(make_ground_atom(s, r, {o1, range[y]})));
            }
        }
    }
}

Semantics::Compiled Semantics::compile(const std::vector<Rule>& rules) const {
    Compiled out;
    const Signature& s = space_.sig();
    Substitution sub(s.num_vars(), -1);
    for (std::uint32_t ri = 0; ri < rules.size(); ++ri) {
        const Rule& r = rules[ri];
        // instances range over the rule's own variables only
        std::vector<VarId> vars = collect_vars(r.body, &r.head);
        auto emit = [&]() {
            Instance in;
            in.rule = ri;
            in.causal = (r.kind == Rule::Causal);
            in.body_begin = std::uint32_t(out.body_pool.size());
            for (const auto& b : r.body)
                out.body_pool.push_back(std::uint32_t(space_.index_checked(apply_subst(s, b, sub))));
            in.body_end = std::uint32_t(out.body_pool.size());
            in.head = std::uint32_t(space_.index_checked(apply_subst(s, r.head, sub)));
            out.instances.push_back(in);
        };
        auto rec = [&](auto&& self, std::size_t level) -> void {
            if (level == vars.size()) {
                emit();
                return;
            }
            for (ObjectId o : s.objects_of_type(s.var(vars[level]).type)) {
                sub[vars[level]] = o;
                self(self, level + 1);
            }
            sub[vars[level]] = -1;
        };
        rec(rec, 0);
    }
    return out;
}

Bits Semantics::make_state(const std::vector<Atom>& atoms) const {
    Bits b(space_.size());
    for (const auto& a : atoms) b.set(space_.index_checked(a));
    return b;
}

std::vector<Atom> Semantics::state_atoms(const Bits& state) const {
    std::vector<Atom> out;
    state.for_each([&](std::size_t i) { out.push_back(space_.atom(i)); });
    std::sort(out.begin(), out.end());
    return out;
}

void Semantics::close_static(Bits& state, const Compiled& rules) const {
    std::size_t bound = space_.size() + 1;
    for (std::size_t round = 0; round <= bound; ++round) {
        bool changed = false;
        for (const auto& in : rules.instances) {
            if (in.causal || state.test(in.head)) continue;
            if (rules.body_sat(in, state)) {
                state.set(in.head);
                changed = true;
            }
        }
        if (!changed) return;
    }
    throw std::logic_error("static closure exceeded its fixpoint bound");
}

Bits Semantics::causal_consequences(const Bits& state, const Compiled& rules) const {
    Bits out(space_.size());
    for (const auto& in : rules.instances)
        if (in.causal && rules.body_sat(in, state)) out.set(in.head);
    return out;
}

std::optional<ConstraintViolation> Semantics::find_conflict(const Bits& state, std::size_t time) const {
    std::optional<ConstraintViolation> found;
    state.for_each([&](std::size_t i) {
        if (found) return;
        if (conflicts_[i].intersects(state)) {
            Bits both = conflicts_[i];
            both &= state;
            std::size_t j = space_.size();
            both.for_each([&](std::size_t k) {
                if (k < j) j = k;
            });
            found = ConstraintViolation{time, space_.atom(std::min(i, j)), space_.atom(std::max(i, j))};
        }
    });
    return found;
}

Semantics::StepOutcome Semantics::step(const Bits& prev, const Compiled& rules, std::size_t time) const {
    // D: causal consequences closed under static rules. Everything in D or
    // added by a static fire counts as derived; derived atoms win over frame
    // atoms.
    Bits derived = causal_consequences(prev, rules);
    close_static(derived, rules);

    Bits frame(space_.size());
    prev.for_each([&](std::size_t i) {
        if (!conflicts_[i].intersects(derived)) frame.set(i);
    });

    Bits state(space_.size());
    for (std::size_t round = 0;; ++round) {
        if (round > space_.size() + 1) throw std::logic_error("frame fixpoint exceeded its bound");
        state = derived;
        state |= frame;
        // close, tracking which heads are derived
        Bits der = derived;
        std::size_t bound = space_.size() + 1;
        for (std::size_t r2 = 0;; ++r2) {
            if (r2 > bound) throw std::logic_error("static closure exceeded its fixpoint bound");
            bool changed = false;
            for (const auto& in : rules.instances) {
                if (in.causal) continue;
                if (rules.body_sat(in, state) && !der.test(in.head)) {
                    der.set(in.head);
                    if (!state.test(in.head)) state.set(in.head);
                    changed = true;
                }
            }
            if (!changed) break;
        }
        // frame atoms not rederived lose against conflicting derived atoms
        Bits bad(space_.size());
        frame.for_each([&](std::size_t i) {
            if (!der.test(i) && conflicts_[i].intersects(der)) bad.set(i);
        });
        if (bad.none()) {
            StepOutcome out{std::move(state), std::nullopt};
            out.violation = find_conflict(out.next, time);
            return out;
        }
        frame.subtract(bad);
    }
}

// --- spec-level wrappers ---

namespace {

SignaturePtr share(const Theory& t) { return t.sig; }

}  // namespace

bool incompossible(const Signature& sig, const Atom& a, const Atom& b,
                   const std::vector<Constraint>& constraints) {
    if (a == b) throw std::invalid_argument("incompossible expects distinct atoms");
    if (!well_typed(a, sig) || !well_typed(b, sig))
        throw std::invalid_argument("incompossible expects well-typed ground atoms");
    for (const auto& c : constraints) {
        bool a_in = std::binary_search(c.preds.begin(), c.preds.end(), a.pred);
        bool b_in = std::binary_search(c.preds.begin(), c.preds.end(), b.pred);
        switch (c.kind) {
            case Constraint::XorUnary:
            case Constraint::XorBinary:
                if (a_in && b_in && a.pred != b.pred && a.args == b.args && a.arity == b.arity)
                    return true;
                break;
            case Constraint::ExistsUnique:
                if (a_in && b_in && a.pred == b.pred && a.args[0] == b.args[0] && a.args[1] != b.args[1])
                    return true;
                break;
        }
    }
    return false;
}

std::vector<Atom> static_closure(const Theory& t, const std::vector<Atom>& state) {
    Semantics sem(share(t), t.constraints);
    auto compiled = sem.compile(t.rules);
    Bits b = sem.make_state(state);
    sem.close_static(b, compiled);
    return sem.state_atoms(b);
}

std::vector<Atom> causal_consequences(const Theory& t, const std::vector<Atom>& state) {
    Semantics sem(share(t), t.constraints);
    auto compiled = sem.compile(t.rules);
    return sem.state_atoms(sem.causal_consequences(sem.make_state(state), compiled));
}

std::variant<std::vector<Atom>, ConstraintViolation> step(const Theory& t,
                                                          const std::vector<Atom>& prev) {
    Semantics sem(share(t), t.constraints);
    auto compiled = sem.compile(t.rules);
    auto out = sem.step(sem.make_state(prev), compiled, 0);
    if (out.violation) return *out.violation;
    return sem.state_atoms(out.next);
}

TraceResult trace(const Theory& t, std::size_t horizon, TraceOptions opts) {
    if (horizon < 1) throw std::invalid_argument("trace horizon must be >= 1");
    Semantics sem(share(t), t.constraints, opts);
    auto compiled = sem.compile(t.rules);

    TraceResult res;
    Bits cur = sem.make_state(t.inits);
    sem.close_static(cur, compiled);
    if (auto v = sem.find_conflict(cur, 1)) {
        res.violation = v;
        return res;
    }

    std::unordered_map<std::size_t, std::vector<std::pair<Bits, std::size_t>>> seen;
    auto remember = [&](const Bits& b, std::size_t at) -> std::optional<std::size_t> {
        auto& bucket = seen[b.hash()];
        for (const auto& [prevb, idx] : bucket)
            if (prevb == b) return idx;
        bucket.emplace_back(b, at);
        return std::nullopt;
    };

    res.prefix.states.push_back(sem.state_atoms(cur));
    remember(cur, 1);
    for (std::size_t tm = 2; tm <= horizon; ++tm) {
        auto out = sem.step(cur, compiled, tm);
        if (out.violation) {
            res.violation = out.violation;
            return res;
        }
        cur = std::move(out.next);
        res.prefix.states.push_back(sem.state_atoms(cur));
        if (!res.prefix.period) {
            if (auto first = remember(cur, tm))
                res.prefix.period = std::make_pair(*first, tm - *first);
        }
    }
    return res;
}

bool covers(const TracePrefix& tr, const SensorySequence& s) {
    if (tr.states.size() < s.steps.size())
        throw std::invalid_argument("trace shorter than the sensory sequence");
    for (std::size_t i = 0; i < s.steps.size(); ++i) {
        const auto& a = tr.states[i];
        for (const auto& atom : s.steps[i])
            if (!std::binary_search(a.begin(), a.end(), atom)) return false;
    }
    return true;
}

}  // namespace appc
