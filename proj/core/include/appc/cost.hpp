#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "appc/trace.hpp"

namespace appc {

struct CostBreakdown {
    std::size_t n_inits = 0;
    std::size_t n_static = 0;
    std::size_t n_causal = 0;
    std::size_t n_body_atoms = 0;
    std::size_t total = 0;  // n_inits + n_static + n_causal + n_body_atoms
    std::optional<double> noise_discrepancies;

    // The experiment tables count each causal rule one extra unit.
    std::size_t table_complexity() const { return total + n_causal; }
};

// total = |I| + Σ_r (1 + |body(r)|); constraints contribute zero.
CostBreakdown cost(const Theory& t);

// |S_i \ A_i|: sensory atoms the trace fails to reproduce.
std::size_t discrepancy(const std::vector<Atom>& sensed, const std::vector<Atom>& traced);

// cost(θ).total + β·Σ_i |S_i − τ(θ)_i|. A constraint violation makes the
// theory inadmissible (nullopt = infinite cost). β defaults to 1.
std::optional<double> cost_noise(const Theory& t, const SensorySequence& s, double beta = 1.0);

// inits,static,causal,body,total,table_complexity,noise
std::string cost_csv_header();
std::string cost_csv_row(const CostBreakdown& c);

}  // namespace appc
