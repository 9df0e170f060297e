#include "appc/cost.hpp"

#include <algorithm>
#include <sstream>

namespace appc {

CostBreakdown cost(const Theory& t) {
    CostBreakdown c;
    c.n_inits = t.inits.size();
    for (const auto& r : t.rules) {
        (r.kind == Rule::Causal ? c.n_causal : c.n_static) += 1;
        c.n_body_atoms += r.body.size();
    }
    c.total = c.n_inits + c.n_static + c.n_causal + c.n_body_atoms;
    return c;
}

std::size_t discrepancy(const std::vector<Atom>& sensed, const std::vector<Atom>& traced) {
    std::size_t n = 0;
    for (const auto& a : sensed)
        if (!std::binary_search(traced.begin(), traced.end(), a)) ++n;
    return n;
}

std::optional<double> cost_noise(const Theory& t, const SensorySequence& s, double beta) {
    auto tr = trace(t, std::max<std::size_t>(1, s.length()));
    if (!tr.ok()) return std::nullopt;
    std::size_t mismatched = 0;
    for (std::size_t i = 0; i < s.length(); ++i)
        mismatched += discrepancy(s.steps[i], tr.prefix.states[i]);
    return double(cost(t).total) + beta * double(mismatched);
}

std::string cost_csv_header() { return "inits,static,causal,body,total,table_complexity,noise"; }

std::string cost_csv_row(const CostBreakdown& c) {
    std::ostringstream os;
    os << c.n_inits << ',' << c.n_static << ',' << c.n_causal << ',' << c.n_body_atoms << ','
       << c.total << ',' << c.table_complexity() << ',';
    if (c.noise_discrepancies) os << *c.noise_discrepancies;
    return os.str();
}

}  // namespace appc
