#pragma once

#include <optional>
#include <string>

#include "appc/trace.hpp"

namespace appc {

// One unity condition's verdict plus a concrete witness when it fails.
struct UnityCheck {
    bool pass = true;
    std::size_t time = 0;       // 1-based, when applicable
    std::string witness;        // human-readable: object pair / predicate / constraint / rule

    explicit operator bool() const { return pass; }
};

struct UnityReport {
    UnityCheck spatial;
    UnityCheck conceptual;
    UnityCheck static_unity;
    UnityCheck temporal;
    bool covers = false;

    bool unified() const {
        return spatial.pass && conceptual.pass && static_unity.pass && temporal.pass;
    }
    bool makes_sense() const { return unified() && covers; }
};

// Objects are connected via a chain of binary atoms in every state; every
// binary predicate contributes edges.
UnityCheck check_spatial(const TracePrefix& tr, const Signature& sig);

// Every unary predicate occurs in some xor group; every binary predicate in an
// xor2 group or a uniqueness constraint.
UnityCheck check_conceptual(const Signature& sig, const std::vector<Constraint>& constraints);

// Every constraint holds in every state (exactly-one semantics).
UnityCheck check_static(const TracePrefix& tr, const Signature& sig,
                        const std::vector<Constraint>& constraints);

// Every fired causal ground instance has its head in the next state.
UnityCheck check_temporal(const Theory& t, const TracePrefix& tr);

// Runs the trace to |S|, evaluates the four conditions plus covering.
UnityReport unified(const Theory& t, const SensorySequence& s, TraceOptions opts = {});

std::string report_to_string(const UnityReport& r);

}  // namespace appc
