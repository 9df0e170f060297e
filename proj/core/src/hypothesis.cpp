#include <algorithm>
#include <map>
#include <set>

#include "appc/synthesis.hpp"

namespace appc {

std::string status_to_string(SearchStatus s) {
    switch (s) {
        case SearchStatus::Found: return "found";
        case SearchStatus::Exhausted: return "exhausted";
        case SearchStatus::Timeout: return "timeout";
    }
    return "exhausted";
}

bool prune_variable_symmetry(const Signature& sig, const Rule& r) {
    // returns keep?
    std::set<VarId> body_vars;
    for (const auto& b : r.body)
        for (int i = 0; i < int(b.arity); ++i) body_vars.insert(b.args[i]);
    for (VarId x : body_vars) {
        for (VarId y : sig.vars_of_type(sig.var(x).type)) {
            if (!(y < x)) continue;  // ids follow lexicographic name order
            bool ok = false;
            for (const auto& b : r.body) {
                if (b.arity == 1 && b.args[0] == y) ok = true;
                if (b.arity == 2 && b.args[0] == y && b.args[1] == x) ok = true;
            }
            if (!ok) return false;
        }
    }
    return true;
}

bool prune_ruleset_symmetry(const std::vector<Rule>& rules, const UngroundSpace& atom_order) {
    // returns keep?; positional lists checked per kind
    auto min_atom = [&](const Rule& r) {
        std::size_t best = atom_order.size();
        for (const auto& b : r.body) {
            auto idx = atom_order.index(b);
            if (idx && *idx < best) best = *idx;
        }
        return best;
    };
    auto check = [&](Rule::Kind kind) {
        for (std::size_t i = 0; i < rules.size(); ++i) {
            if (rules[i].kind != kind) continue;
            for (std::size_t j = i + 1; j < rules.size(); ++j) {
                if (rules[j].kind != kind) continue;
                // some β' in body_j below every β in body_i
                if (min_atom(rules[j]) < min_atom(rules[i])) return false;
            }
        }
        return true;
    };
    return check(Rule::Static) && check(Rule::Causal);
}

namespace {

// Partitions of `items` into blocks of size ≥ 2 (canonical order).
void partitions_min2(const std::vector<PredId>& items, std::size_t i,
                     std::vector<std::vector<PredId>>& acc,
                     std::vector<std::vector<std::vector<PredId>>>& out) {
    if (i == items.size()) {
        for (const auto& blk : acc)
            if (blk.size() < 2) return;
        out.push_back(acc);
        return;
    }
    for (auto& blk : acc) {
        blk.push_back(items[i]);
        partitions_min2(items, i + 1, acc, out);
        blk.pop_back();
    }
    acc.push_back({items[i]});
    partitions_min2(items, i + 1, acc, out);
    acc.pop_back();
}

}  // namespace

std::vector<std::vector<Constraint>> enumerate_constraint_schemes(SignaturePtr sig_ptr,
                                                                  std::string* why_infeasible) {
    const Signature& sig = *sig_ptr;
    if (why_infeasible) why_infeasible->clear();

    // unary predicates grouped per type; binary per argument-type pair
    std::map<TypeId, std::vector<PredId>> unary;
    std::map<std::pair<TypeId, TypeId>, std::vector<PredId>> binary;
    for (PredId p = 0; p < PredId(sig.num_preds()); ++p) {
        const auto& ats = sig.pred(p).arg_types;
        if (ats.size() == 1)
            unary[ats[0]].push_back(p);
        else
            binary[{ats[0], ats[1]}].push_back(p);
    }

    // per type: all xor partitions
    std::vector<std::vector<std::vector<Constraint>>> factor_options;
    for (const auto& [type, preds] : unary) {
        if (preds.size() == 1) {
            if (why_infeasible)
                *why_infeasible = "type " + sig.type_name(type) + " has a single unary predicate (" +
                                  sig.pred(preds[0]).name + "); no xor group of size >= 2 exists";
            return {};
        }
        std::vector<std::vector<std::vector<PredId>>> parts;
        std::vector<std::vector<PredId>> acc;
        partitions_min2(preds, 0, acc, parts);
        std::vector<std::vector<Constraint>> opts;
        for (auto& part : parts) {
            std::vector<Constraint> cs;
            for (auto& blk : part) {
                Constraint c;
                c.kind = Constraint::XorUnary;
                c.preds = blk;
                std::sort(c.preds.begin(), c.preds.end());
                cs.push_back(std::move(c));
            }
            std::sort(cs.begin(), cs.end());
            opts.push_back(std::move(cs));
        }
        std::sort(opts.begin(), opts.end());
        factor_options.push_back(std::move(opts));
    }

    // per binary group: each predicate gets ∃! or joins a same-typed xor2 block
    for (const auto& [types, preds] : binary) {
        (void)types;
        std::vector<std::vector<Constraint>> opts;
        // choose a subset to be ∃!, partition the rest into xor2 blocks of ≥2
        std::size_t n = preds.size();
        for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << n); ++mask) {
            std::vector<PredId> uniq, rest;
            for (std::size_t i = 0; i < n; ++i)
                ((mask >> i) & 1 ? uniq : rest).push_back(preds[i]);
            std::vector<std::vector<std::vector<PredId>>> parts;
            if (rest.empty()) {
                parts.push_back({});
            } else {
                std::vector<std::vector<PredId>> acc;
                partitions_min2(rest, 0, acc, parts);
                if (parts.empty()) continue;  // e.g. a single leftover predicate
            }
            for (auto& part : parts) {
                std::vector<Constraint> cs;
                for (PredId p : uniq) {
                    Constraint c;
                    c.kind = Constraint::ExistsUnique;
                    c.preds = {p};
                    cs.push_back(std::move(c));
                }
                for (auto& blk : part) {
                    Constraint c;
                    c.kind = Constraint::XorBinary;
                    c.preds = blk;
                    std::sort(c.preds.begin(), c.preds.end());
                    cs.push_back(std::move(c));
                }
                std::sort(cs.begin(), cs.end());
                opts.push_back(std::move(cs));
            }
        }
        std::sort(opts.begin(), opts.end());
        opts.erase(std::unique(opts.begin(), opts.end()), opts.end());
        factor_options.push_back(std::move(opts));
    }

    // cartesian product of the per-group options
    std::vector<std::vector<Constraint>> schemes{{}};
    for (const auto& opts : factor_options) {
        std::vector<std::vector<Constraint>> next;
        for (const auto& sch : schemes)
            for (const auto& opt : opts) {
                auto merged = sch;
                merged.insert(merged.end(), opt.begin(), opt.end());
                next.push_back(std::move(merged));
            }
        schemes = std::move(next);
    }
    for (auto& sch : schemes) std::sort(sch.begin(), sch.end());
    std::stable_sort(schemes.begin(), schemes.end(),
                     [](const auto& a, const auto& b) {
                         if (a.size() != b.size()) return a.size() < b.size();
                         return a < b;
                     });
    return schemes;
}

namespace {

std::size_t rule_cost(const Rule& r) { return 1 + r.body.size(); }

}  // namespace

std::vector<Rule> enumerate_candidate_rules(SignaturePtr sig_ptr, Rule::Kind kind, int n_body) {
    const Signature& sig = *sig_ptr;
    UngroundSpace uspace(sig_ptr);
    std::vector<Rule> out;

    std::vector<Atom> body;
    auto heads_for = [&](const std::vector<Atom>& b) {
        std::set<VarId> vars;
        for (const auto& a : b)
            for (int i = 0; i < int(a.arity); ++i) vars.insert(a.args[i]);
        std::vector<Atom> heads;
        for (std::size_t i = 0; i < uspace.size(); ++i) {
            const Atom& h = uspace.atom(i);
            bool safe = true;
            for (int k = 0; k < int(h.arity); ++k)
                if (!vars.count(h.args[k])) safe = false;
            if (!safe) continue;
            // head repeating a body atom is never useful
            if (std::find(b.begin(), b.end(), h) != b.end()) continue;
            heads.push_back(h);
        }
        return heads;
    };

    auto emit = [&]() {
        Rule r;
        r.kind = kind;
        r.body = body;
        std::sort(r.body.begin(), r.body.end());
        if (!prune_variable_symmetry(sig, r)) return;
        for (const Atom& h : heads_for(r.body)) {
            r.head = h;
            out.push_back(r);
        }
    };

    auto rec = [&](auto&& self, std::size_t from) -> void {
        if (!body.empty()) emit();
        if (int(body.size()) == n_body) return;
        for (std::size_t i = from; i < uspace.size(); ++i) {
            body.push_back(uspace.atom(i));
            self(self, i + 1);
            body.pop_back();
        }
    };
    rec(rec, 0);

    std::stable_sort(out.begin(), out.end(), [&](const Rule& a, const Rule& b) {
        if (rule_cost(a) != rule_cost(b)) return rule_cost(a) < rule_cost(b);
        return a < b;
    });
    return out;
}

GroundingEstimate grounding_estimate(const Template& tmpl, std::uint64_t steps) {
    const Signature& sig = *tmpl.sig;
    GroundingEstimate e;
    e.n_ground_atoms = ground_atoms(sig).size();
    e.n_unground_atoms = unground_atoms(sig).size();
    e.n_substitutions = 1;
    for (VarId v = 0; v < VarId(sig.num_vars()); ++v)
        e.n_substitutions *= std::uint64_t(sig.objects_of_type(sig.var(v).type).size());
    std::uint64_t rules = std::uint64_t(tmpl.n_static + tmpl.n_causal);
    e.holds = e.n_substitutions * e.n_unground_atoms * rules * steps + e.n_ground_atoms * (steps + 1);
    e.eval_atom = e.n_substitutions * e.n_unground_atoms * steps;
    e.eval_body = e.n_substitutions * rules * steps;
    e.total_atoms = 5 * e.n_substitutions * rules * e.n_unground_atoms * steps;
    return e;
}

std::vector<Template> auto_templates(const ApperceptionTask& task, std::size_t count) {
    const Signature& base = *task.sig;
    std::vector<Template> out;

    bool single_type = base.num_types() == 1;
    std::string obj_type = base.num_types() > 0 ? base.type_name(0) : "obj";

    auto fresh = [&](const Signature& sig, const std::string& stem, int i) {
        std::string name = stem + std::to_string(i);
        while (sig.find_pred(name) || sig.find_object(name) || sig.find_var(name))
            name += "x";
        return name;
    };

    for (std::size_t weight = 1; out.size() < count && weight <= 24; ++weight) {
        for (int inv_o = 0; inv_o <= int(weight); ++inv_o)
            for (int inv_u = 0; inv_o + inv_u <= int(weight); ++inv_u)
                for (int inv_b = 0; inv_o + inv_u + inv_b <= int(weight); ++inv_b) {
                    if (!single_type && (inv_o || inv_b)) continue;  // invention kept to one-type tasks
                    int rest = int(weight) - inv_o - inv_u - inv_b;
                    for (int ns = 0; ns <= rest; ++ns) {
                        int nc_plus_nb = rest - ns;
                        for (int nc = 0; nc <= nc_plus_nb; ++nc) {
                            int nb = nc_plus_nb - nc + 1;
                            if (ns + nc < 1) continue;
                            Signature::Builder b;
                            for (TypeId t = 0; t < TypeId(base.num_types()); ++t)
                                b.type(base.type_name(t));
                            if (base.num_types() == 0) b.type(obj_type);
                            for (ObjectId o = 0; o < ObjectId(base.num_objects()); ++o)
                                b.object(base.object(o).name, base.type_name(base.object(o).type));
                            for (PredId p = 0; p < PredId(base.num_preds()); ++p) {
                                std::vector<std::string> ats;
                                for (TypeId t : base.pred(p).arg_types) ats.push_back(base.type_name(t));
                                b.pred(base.pred(p).name, ats);
                            }
                            for (int i = 1; i <= inv_o; ++i)
                                b.object(fresh(base, "obj", i), obj_type);
                            for (int i = 1; i <= inv_u; ++i)
                                b.pred(fresh(base, "p", i), {obj_type});
                            for (int i = 1; i <= inv_b; ++i)
                                b.pred(fresh(base, "q", i), {obj_type, obj_type});
                            for (TypeId t = 0; t < TypeId(base.num_types()); ++t) {
                                b.var(fresh(base, "x", int(t) + 1), base.type_name(t));
                                b.var(fresh(base, "y", int(t) + 1), base.type_name(t));
                            }
                            if (base.num_types() == 0) {
                                b.var("x1", obj_type);
                                b.var("y1", obj_type);
                            }
                            Template t;
                            t.sig = b.build();
                            t.n_static = ns;
                            t.n_causal = nc;
                            t.n_body = nb;
                            t.name = "auto_w" + std::to_string(weight) + "_" +
                                     std::to_string(out.size() + 1);
                            out.push_back(std::move(t));
                            if (out.size() >= count) return out;
                        }
                    }
                }
    }
    return out;
}

}  // namespace appc
