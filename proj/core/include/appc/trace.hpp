#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "appc/bits.hpp"
#include "appc/ground.hpp"
#include "appc/lang.hpp"

namespace appc {

struct ConstraintViolation {
    std::size_t time = 0;  // 1-based step index
    Atom a, b;             // offending pair
};

struct TracePrefix {
    std::vector<std::vector<Atom>> states;                    // A_1..A_T, sorted
    std::optional<std::pair<std::size_t, std::size_t>> period;  // (start, length), 1-based start
};

struct TraceOptions {
    // Ablation switch: with incompossibility disabled nothing ever displaces a
    // frame atom, so states grow monotonically.
    bool use_incompossibility = true;
};

// Ground-level machinery shared by the trace engine and the synthesizer:
// the ground-atom index, the pairwise incompossibility table derived from a
// constraint set, and compiled ground rule instances.
class Semantics {
public:
    Semantics(SignaturePtr sig, const std::vector<Constraint>& constraints,
              TraceOptions opts = {});

    const GroundSpace& space() const { return space_; }
    const Signature& sig() const { return space_.sig(); }
    const std::vector<Constraint>& constraints() const { return constraints_; }
    const TraceOptions& options() const { return opts_; }

    bool incompossible(std::size_t a, std::size_t b) const {
        return a != b && conflicts_[a].test(b);
    }
    const Bits& conflicts(std::size_t a) const { return conflicts_[a]; }

    struct Instance {
        std::uint32_t head;
        std::uint32_t body_begin, body_end;  // into body_pool
        std::uint32_t rule;                  // index into the compiled rule list
        bool causal;
    };
    struct Compiled {
        std::vector<Instance> instances;
        std::vector<std::uint32_t> body_pool;
        bool body_sat(const Instance& in, const Bits& state) const {
            for (auto i = in.body_begin; i != in.body_end; ++i)
                if (!state.test(body_pool[i])) return false;
            return true;
        }
    };
    Compiled compile(const std::vector<Rule>& rules) const;

    Bits make_state(const std::vector<Atom>& atoms) const;
    std::vector<Atom> state_atoms(const Bits& state) const;

    // Least superset closed under the static instances; fixpoint within
    // |G|+1 rounds.
    void close_static(Bits& state, const Compiled& rules) const;
    Bits causal_consequences(const Bits& state, const Compiled& rules) const;

    struct StepOutcome {
        Bits next;
        std::optional<ConstraintViolation> violation;
    };
    // Deterministic next state: derived atoms (causal consequences plus static
    // closure) always win over frame atoms; a conflict among derived atoms is
    // a violation.
    StepOutcome step(const Bits& prev, const Compiled& rules, std::size_t time) const;

    // Conflict scan used on A_1 and by step(); reports the canonically first pair.
    std::optional<ConstraintViolation> find_conflict(const Bits& state, std::size_t time) const;

private:
    GroundSpace space_;
    std::vector<Constraint> constraints_;
    std::vector<Bits> conflicts_;
    TraceOptions opts_;
};

struct TraceResult {
    TracePrefix prefix;  // states computed before any violation
    std::optional<ConstraintViolation> violation;
    bool ok() const { return !violation.has_value(); }
};

// Spec-level operations.
bool incompossible(const Signature& sig, const Atom& a, const Atom& b,
                   const std::vector<Constraint>& constraints);
std::vector<Atom> static_closure(const Theory& t, const std::vector<Atom>& state);
std::vector<Atom> causal_consequences(const Theory& t, const std::vector<Atom>& state);
std::variant<std::vector<Atom>, ConstraintViolation> step(const Theory& t,
                                                          const std::vector<Atom>& prev);
TraceResult trace(const Theory& t, std::size_t horizon, TraceOptions opts = {});
bool covers(const TracePrefix& tr, const SensorySequence& s);

}  // namespace appc
