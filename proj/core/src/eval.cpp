#include "appc/eval.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "appc/text.hpp"
#include "appc/trace.hpp"

namespace appc {

namespace {

std::size_t peak_memory_kb() {
    std::ifstream f("/proc/self/status");
    std::string line;
    while (std::getline(f, line)) {
        if (line.rfind("VmHWM:", 0) == 0) {
            std::istringstream is(line.substr(6));
            std::size_t kb = 0;
            is >> kb;
            return kb;
        }
    }
    return 0;
}

}  // namespace

ApperceptionTask make_task(const ApperceptionTask& base, ApperceptionTask::Kind kind,
                           std::uint64_t seed) {
    SensorySequence full = base.full_sequence();
    if (full.steps.size() < 2) throw std::invalid_argument("make_task needs at least 2 steps");

    ApperceptionTask t = base;
    t.kind = kind;
    t.visible = full;
    t.hidden.clear();

    auto hide_step = [&](std::size_t idx) {
        for (const auto& a : full.steps[idx]) t.hidden.emplace_back(idx + 1, a);
        t.visible.steps[idx].clear();
    };
    if (kind == ApperceptionTask::Prediction) {
        hide_step(full.steps.size() - 1);
    } else if (kind == ApperceptionTask::Retrodiction) {
        hide_step(0);
    } else {
        std::size_t want = full.steps.back().size();
        std::vector<std::pair<std::size_t, Atom>> all;
        for (std::size_t i = 0; i < full.steps.size(); ++i)
            for (const auto& a : full.steps[i]) all.emplace_back(i, a);
        std::mt19937_64 rng(seed);
        for (std::size_t i = all.size(); i > 1; --i)
            std::swap(all[i - 1], all[rng() % i]);
        want = std::min(want, all.size());
        for (std::size_t k = 0; k < want; ++k) {
            auto [idx, atom] = all[k];
            t.hidden.emplace_back(idx + 1, atom);
            auto& st = t.visible.steps[idx];
            st.erase(std::remove(st.begin(), st.end(), atom), st.end());
        }
    }
    std::sort(t.hidden.begin(), t.hidden.end());
    return t;
}

double accuracy(const std::vector<EvalRecord>& records) {
    if (records.empty()) return 0;
    std::size_t good = 0;
    for (const auto& r : records) good += r.all_correct;
    return double(good) / double(records.size());
}

double kappa(double a, double r) {
    if (!(r >= 0.0 && r < 1.0)) throw std::invalid_argument("kappa needs 0 <= r < 1");
    return (a - r) / (1.0 - r);
}

double mcnemar(double b, double c) {
    if (b + c <= 0) throw std::invalid_argument("mcnemar needs b + c > 0");
    return (b - c) * (b - c) / (b + c);
}

namespace {

// sensor cell of an atom: unary p(x) -> (x); binary r(x,y) -> (r, x)
struct SlotKey {
    int pred;  // -1 for unary cells
    int subject;
    bool operator<(const SlotKey& o) const {
        return std::tie(pred, subject) < std::tie(o.pred, o.subject);
    }
};

SlotKey slot_key(const Atom& a) {
    if (a.arity == 1) return {-1, a.args[0]};
    return {int(a.pred), a.args[0]};
}

}  // namespace

std::vector<Atom> baseline_constant(const ApperceptionTask& task) {
    std::map<SlotKey, std::map<Atom, std::size_t>> counts;
    for (const auto& st : task.visible.steps)
        for (const auto& a : st) counts[slot_key(a)][a] += 1;
    std::vector<Atom> out;
    for (const auto& [key, votes] : counts) {
        (void)key;
        std::size_t best = 0;
        for (const auto& [atom, n] : votes) best = std::max(best, n);
        for (const auto& [atom, n] : votes)
            if (n == best) {
                out.push_back(atom);  // ties resolved by canonical (map) order
                break;
            }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Atom> baseline_inertia(const ApperceptionTask& task, std::size_t time) {
    if (task.visible.steps.size() < 2)
        throw std::invalid_argument("inertia baseline needs at least 2 steps");
    // nearest non-empty visible step strictly before `time`, else after
    std::size_t idx = task.visible.steps.size();
    for (std::size_t i = std::min(time - 1, task.visible.steps.size()); i-- > 0;) {
        if (!task.visible.steps[i].empty()) {
            idx = i;
            break;
        }
    }
    if (idx == task.visible.steps.size()) {
        for (std::size_t i = std::min(time, task.visible.steps.size() - 1);
             i < task.visible.steps.size(); ++i)
            if (!task.visible.steps[i].empty()) {
                idx = i;
                break;
            }
    }
    if (idx == task.visible.steps.size()) return {};
    return task.visible.steps[idx];
}

ApperceptionTask perturb_task(const ApperceptionTask& task, double fraction, std::uint64_t seed) {
    if (fraction < 0 || fraction > 1) throw std::invalid_argument("fraction must be in [0,1]");
    ApperceptionTask out = task;
    const Signature& sig = *task.sig;
    std::vector<std::pair<std::size_t, std::size_t>> coords;  // (step, offset)
    for (std::size_t t = 0; t < out.visible.steps.size(); ++t)
        for (std::size_t i = 0; i < out.visible.steps[t].size(); ++i) coords.emplace_back(t, i);
    std::mt19937_64 rng(seed);
    for (std::size_t i = coords.size(); i > 1; --i) std::swap(coords[i - 1], coords[rng() % i]);
    std::size_t flips = std::size_t(fraction * double(coords.size()) + 0.5);

    std::size_t done = 0;
    for (const auto& [t, i] : coords) {
        if (done >= flips) break;
        Atom& a = out.visible.steps[t][i];
        if (a.arity == 1) {
            // another unary predicate over the same argument type
            std::vector<PredId> alts;
            for (PredId p = 0; p < PredId(sig.num_preds()); ++p)
                if (p != a.pred && sig.pred(p).arg_types == sig.pred(a.pred).arg_types &&
                    sig.pred(p).arg_types.size() == 1)
                    alts.push_back(p);
            if (alts.empty()) continue;
            a.pred = alts[rng() % alts.size()];
        } else {
            const auto& range = sig.objects_of_type(sig.pred(a.pred).arg_types[1]);
            std::vector<ObjectId> alts;
            for (ObjectId o : range)
                if (o != a.args[1]) alts.push_back(o);
            if (alts.empty()) continue;
            a.args[1] = alts[rng() % alts.size()];
        }
        ++done;
    }
    out.visible.normalize();
    out.name = task.name + "_noisy";
    return out;
}

std::string domain_of_task_name(const std::string& name) {
    for (const char* d : {"eca", "sw", "rhythm", "binding", "occlusion"})
        if (name.rfind(d, 0) == 0) return d;
    return "other";
}

double domain_random_agreement(const std::string& domain) {
    if (domain == "eca") return 0.00048;
    if (domain == "rhythm") return 0.00001;
    if (domain == "sw") return 0.16666;
    if (domain == "binding") return 0.00003;
    if (domain == "occlusion") return 0.03846;
    return 0.0;
}

namespace {

struct Prediction {
    bool has_theory = false;
    std::string status = "n/a";
    std::optional<CostBreakdown> cost;
    // per hidden (time, atom): present?
    std::vector<bool> correct;
};

Prediction run_engine(const ApperceptionTask& task, const SuiteConfig& config,
                      const SolveOptions& solve) {
    Prediction out;
    ApperceiveConfig cfg;
    cfg.solve = solve;
    cfg.max_auto_templates = config.max_auto_templates;
    if (!task.template_file.empty()) {
        std::string path = task.template_file;
        if (!config.template_dir.empty() && path.front() != '/')
            path = config.template_dir + "/" + path;
        cfg.templates = parse_templates(read_file(path));
    }
    SearchResult res = apperceive(task, cfg);
    out.status = status_to_string(res.status);
    if (!res.best) return out;
    out.has_theory = true;
    out.cost = res.best_cost;

    std::size_t horizon = std::max<std::size_t>(1, task.visible.steps.size());
    for (const auto& [tm, _] : task.hidden) horizon = std::max(horizon, tm);
    auto tr = trace(*res.best, horizon);
    for (const auto& [tm, atom] : task.hidden) {
        bool ok = false;
        if (tr.ok() || tr.prefix.states.size() >= tm) {
            if (tm <= tr.prefix.states.size()) {
                // hidden atoms live in the task vocabulary; compare by name
                const auto& st = tr.prefix.states[tm - 1];
                std::string want = atom_to_string(*task.sig, atom);
                for (const auto& a : st)
                    if (atom_to_string(*res.best->sig, a) == want) {
                        ok = true;
                        break;
                    }
            }
        }
        out.correct.push_back(ok);
    }
    return out;
}

Prediction run_baseline(const ApperceptionTask& task, const std::string& which) {
    Prediction out;
    out.status = "ok";
    out.has_theory = false;
    std::vector<Atom> constant;
    if (which == "constant") constant = baseline_constant(task);
    for (const auto& [tm, atom] : task.hidden) {
        std::vector<Atom> predicted =
            which == "constant" ? constant : baseline_inertia(task, tm);
        out.correct.push_back(std::binary_search(predicted.begin(), predicted.end(), atom));
    }
    return out;
}

SolveOptions ablated(SolveOptions base, const std::string& system) {
    if (system == "engine-nocover") base.require_covering = false;
    if (system == "engine-noconcept") base.conceptual_unity = false;
    if (system == "engine-nospatial") base.spatial_unity = false;
    if (system == "engine-nocostmin") base.cost_minimization = false;
    if (system == "engine-noise") base.mode = SolveMode::Noise;
    return base;
}

}  // namespace

SuiteResult run_suite(const std::vector<ApperceptionTask>& tasks, const SuiteConfig& config) {
    struct Unit {
        const ApperceptionTask* task;
        std::string system;
        double mislabel = -1;
    };
    std::vector<ApperceptionTask> prepared;
    prepared.reserve(tasks.size());
    for (const auto& t : tasks) {
        std::uint64_t task_seed = config.seed ^ std::hash<std::string>{}(t.name);
        if (config.force_kind && *config.force_kind != t.kind)
            prepared.push_back(make_task(t, *config.force_kind, task_seed));
        else
            prepared.push_back(t);
    }

    std::vector<Unit> units;
    for (const auto& t : prepared) {
        for (const auto& sys : config.systems) units.push_back(Unit{&t, sys, -1});
        for (double f : config.mislabel_fractions) units.push_back(Unit{&t, "engine-noise", f});
    }

    std::vector<EvalRecord> records(units.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= units.size()) break;
            const Unit& u = units[i];
            ApperceptionTask task = *u.task;
            std::uint64_t task_seed = config.seed ^ std::hash<std::string>{}(task.name);
            if (u.mislabel >= 0) task = perturb_task(task, u.mislabel, task_seed);

            EvalRecord rec;
            rec.task = u.mislabel >= 0
                           ? task.name + "@f=" + std::to_string(u.mislabel)
                           : task.name;
            rec.domain = domain_of_task_name(task.name);
            rec.kind = task.kind;
            rec.system = u.system;
            auto start = std::chrono::steady_clock::now();
            Prediction pred;
            try {
                if (u.system == "constant" || u.system == "inertia")
                    pred = run_baseline(task, u.system);
                else {
                    SolveOptions solve = ablated(config.solve, u.system);
                    solve.seed = task_seed;
                    pred = run_engine(task, config, solve);
                }
            } catch (const std::exception& e) {
                pred.status = std::string("error: ") + e.what();
            }
            rec.status = pred.status;
            rec.atoms_total = task.hidden.size();
            for (bool ok : pred.correct) rec.atoms_correct += ok;
            rec.all_correct =
                rec.atoms_total > 0 && rec.atoms_correct == rec.atoms_total;
            rec.cost = pred.cost;
            rec.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                              std::chrono::steady_clock::now() - start)
                              .count();
            rec.memory_kb = peak_memory_kb();
            records[i] = std::move(rec);
        }
    };
    int threads = std::max(1, config.threads);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    SuiteResult out;
    out.records = std::move(records);
    std::stable_sort(out.records.begin(), out.records.end(),
                     [](const EvalRecord& a, const EvalRecord& b) {
                         return std::tie(a.task, a.system) < std::tie(b.task, b.system);
                     });

    // per-domain, per-system aggregates
    std::map<std::pair<std::string, std::string>, std::vector<EvalRecord>> groups;
    for (const auto& r : out.records) groups[{r.domain, r.system}].push_back(r);
    for (const auto& [key, recs] : groups) {
        DomainSummary s;
        s.domain = key.first;
        s.system = key.second;
        s.tasks = recs.size();
        s.accuracy = accuracy(recs);
        double r = domain_random_agreement(s.domain);
        s.kappa = r < 1.0 ? kappa(s.accuracy, r) : 0.0;
        // discordant-pair McNemar against every other system in the same domain
        for (const auto& [okey, orecs] : groups) {
            if (okey.first != key.first || okey.second == key.second) continue;
            if (orecs.size() != recs.size()) continue;
            double b = 0, c = 0;  // inaccurate here / inaccurate there
            for (std::size_t i = 0; i < recs.size(); ++i) {
                if (!recs[i].all_correct && orecs[i].all_correct) b += 1;
                if (recs[i].all_correct && !orecs[i].all_correct) c += 1;
            }
            if (b + c > 0) s.mcnemar_vs[okey.second] = mcnemar(b, c);
        }
        out.summaries.push_back(std::move(s));
    }
    return out;
}

std::string records_csv(const std::vector<EvalRecord>& records) {
    std::ostringstream os;
    os << "task,domain,kind,system,status,all_correct,atoms_correct,atoms_total,cost_total,"
          "table_complexity,wall_ms\n";
    for (const auto& r : records) {
        os << r.task << ',' << r.domain << ',' << kind_to_string(r.kind) << ',' << r.system << ','
           << r.status << ',' << (r.all_correct ? 1 : 0) << ',' << r.atoms_correct << ','
           << r.atoms_total << ',';
        if (r.cost) os << r.cost->total;
        os << ',';
        if (r.cost) os << r.cost->table_complexity();
        os << ',' << r.wall_ms << "\n";
    }
    return os.str();
}

std::string summaries_csv(const std::vector<DomainSummary>& summaries) {
    std::ostringstream os;
    os << "domain,system,tasks,accuracy,kappa,mcnemar_vs\n";
    for (const auto& s : summaries) {
        os << s.domain << ',' << s.system << ',' << s.tasks << ',' << s.accuracy << ',' << s.kappa
           << ',';
        bool first = true;
        for (const auto& [sys, v] : s.mcnemar_vs) {
            if (!first) os << ';';
            os << sys << '=' << v;
            first = false;
        }
        os << "\n";
    }
    return os.str();
}

}  // namespace appc
