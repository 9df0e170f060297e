#pragma once

#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "appc/cost.hpp"
#include "appc/domains.hpp"
#include "appc/ground.hpp"
#include "appc/trace.hpp"
#include "appc/unity.hpp"

namespace appc {

inline constexpr double kInfObjective = std::numeric_limits<double>::infinity();

enum class SolveMode { Exact, Noise };
enum class SearchStatus { Found, Exhausted, Timeout };

std::string status_to_string(SearchStatus s);

struct SearchBudget {
    std::chrono::milliseconds time_limit{0};  // 0 = unlimited
    std::uint64_t node_cap = 0;               // 0 = unlimited
};

struct SolveOptions {
    SolveMode mode = SolveMode::Exact;
    // Ablation switches (eval harness rows).
    bool require_covering = true;
    bool conceptual_unity = true;
    bool spatial_unity = true;
    bool cost_minimization = true;
    double beta = 1.0;  // weight of unexplained atoms in noise mode
    SearchBudget budget;
    std::uint64_t seed = 0;
    double initial_bound = kInfObjective;  // incumbent objective from outside
};

struct SearchResult {
    std::optional<Theory> best;
    std::optional<CostBreakdown> best_cost;
    double objective = kInfObjective;  // cost total (exact) or cost_noise (noise)
    SearchStatus status = SearchStatus::Exhausted;
    std::uint64_t templates_tried = 0;
    std::uint64_t nodes_expanded = 0;
    std::chrono::milliseconds wall_time{0};
    std::string note;  // e.g. infeasible-template diagnostics
};

// --- hypothesis space ---

// Variable-ordering symmetry breaking: reject a rule when some body variable
// has a same-type lexicographically-smaller variable that appears in the body
// neither as p(Y) nor as p(Y,X).
bool prune_variable_symmetry(const Signature& sig, const Rule& r);

// Rule-set-ordering symmetry breaking over positional rule lists: reject when
// a later rule's body contains an atom below every atom of an earlier rule's
// body (checked per rule kind).
bool prune_ruleset_symmetry(const std::vector<Rule>& rules, const UngroundSpace& atom_order);

// All constraint sets that cover every predicate exactly once, in increasing
// constraint count. A type with exactly one unary predicate makes coverage
// impossible; `why_infeasible` then names it.
std::vector<std::vector<Constraint>> enumerate_constraint_schemes(SignaturePtr sig,
                                                                  std::string* why_infeasible = nullptr);

// Candidate rules of one kind: safe, well-typed, |body| ≤ n_body, variable
// symmetry respected, head not in body. Sorted by (cost, canonical).
std::vector<Rule> enumerate_candidate_rules(SignaturePtr sig, Rule::Kind kind, int n_body);

// --- templates ---

struct GroundingEstimate {
    std::uint64_t n_ground_atoms = 0;    // |G|
    std::uint64_t n_unground_atoms = 0;  // |U|
    std::uint64_t n_substitutions = 0;   // |Σ|
    std::uint64_t holds = 0;             // |Σ|·|U|·(N→+N⇒)·t + |G|·(t+1)
    std::uint64_t eval_atom = 0;         // |Σ|·|U|·t
    std::uint64_t eval_body = 0;         // |Σ|·(N→+N⇒)·t
    std::uint64_t total_atoms = 0;       // 5·|Σ|·(N→+N⇒)·|U|·t
};

GroundingEstimate grounding_estimate(const Template& tmpl, std::uint64_t steps);

// Domain-independent template stream: the signature induced by the task plus
// invented predicates/objects, ordered by weight
// (#inv unary + #inv binary + #inv objects + N→ + N⇒ + (N_B − 1)).
std::vector<Template> auto_templates(const ApperceptionTask& task, std::size_t count);

// --- search ---

SearchResult solve_template(const ApperceptionTask& task, const Template& tmpl,
                            const SolveOptions& opts);

struct ApperceiveConfig {
    SolveOptions solve;
    std::vector<Template> templates;  // empty = domain-independent stream
    std::size_t max_auto_templates = 48;
    int threads = 1;
};

// Anytime loop over the template stream; keeps the globally best theory.
SearchResult apperceive(const ApperceptionTask& task, const ApperceiveConfig& config);

}  // namespace appc
