// appc: apperception engine command line
//
// generate / solve / trace / check / eval / estimate over the core library.
// Exit codes: 0 success, 1 task-level failure, 2 usage error.

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "appc/eval.hpp"
#include "appc/synthesis.hpp"
#include "appc/text.hpp"

namespace fs = std::filesystem;
using namespace appc;

namespace {

std::vector<bool> parse_bits(const std::string& s) {
    std::vector<bool> out;
    for (char c : s) {
        if (c == '0')
            out.push_back(false);
        else if (c == '1')
            out.push_back(true);
        else
            throw CLI::ValidationError("--init", "init must be a 0/1 string");
    }
    return out;
}

void write_task_and_templates(const ApperceptionTask& task, const std::vector<Template>& tmpls,
                              std::string out, std::string template_out) {
    if (template_out.empty()) {
        template_out = out;
        auto dot = template_out.rfind('.');
        if (dot != std::string::npos) template_out.resize(dot);
        template_out += ".tmpl";
    }
    ApperceptionTask t = task;
    t.template_file = fs::path(template_out).filename().string();
    std::string body;
    for (const auto& tm : tmpls) body += serialize_template(tm);
    write_file(template_out, body);
    write_file(out, serialize_task(t));
    std::cout << "wrote " << out << " and " << template_out << "\n";
}

ApperceptionTask apply_holdout(const ApperceptionTask& task, const std::string& holdout,
                               std::uint64_t seed) {
    if (holdout == "none") return task;
    ApperceptionTask::Kind kind = ApperceptionTask::Prediction;
    if (holdout == "first")
        kind = ApperceptionTask::Retrodiction;
    else if (holdout == "random")
        kind = ApperceptionTask::Imputation;
    else if (holdout != "last")
        throw CLI::ValidationError("--hold-out", "expected last|first|random|none");
    return make_task(task, kind, seed);
}

int cmd_solve(const std::string& task_file, const std::string& mode, const std::string& templates,
              double time_limit, std::uint64_t node_limit, std::uint64_t seed, int threads,
              const std::string& out, const std::string& report, bool no_covering,
              bool no_conceptual, bool no_spatial, bool no_costmin, double beta, bool verbose) {
    ApperceptionTask task = parse_task(read_file(task_file));

    ApperceiveConfig cfg;
    cfg.threads = threads;
    cfg.solve.mode = mode == "noise" ? SolveMode::Noise : SolveMode::Exact;
    cfg.solve.require_covering = !no_covering;
    cfg.solve.conceptual_unity = !no_conceptual;
    cfg.solve.spatial_unity = !no_spatial;
    cfg.solve.cost_minimization = !no_costmin;
    cfg.solve.beta = beta;
    cfg.solve.seed = seed;
    if (time_limit > 0)
        cfg.solve.budget.time_limit =
            std::chrono::milliseconds(std::int64_t(time_limit * 1000.0));
    cfg.solve.budget.node_cap = node_limit;

    std::string tmpl_source = templates;
    if (tmpl_source == "task") tmpl_source = task.template_file.empty() ? "auto" : task.template_file;
    if (tmpl_source != "auto") {
        fs::path p = tmpl_source;
        if (!fs::exists(p)) p = fs::path(task_file).parent_path() / tmpl_source;
        cfg.templates = parse_templates(read_file(p.string()));
    }

    SearchResult res = apperceive(task, cfg);
    if (verbose)
        std::cerr << "status=" << status_to_string(res.status) << " templates=" << res.templates_tried
                  << " nodes=" << res.nodes_expanded << " wall_ms=" << res.wall_time.count()
                  << (res.note.empty() ? "" : " note=" + res.note) << "\n";
    if (!res.best) {
        std::cout << "status " << status_to_string(res.status) << "\n";
        std::cout << "no theory found\n";
        return 1;
    }
    std::string text = serialize_theory(*res.best);
    if (!out.empty()) write_file(out, text);
    std::cout << "status " << status_to_string(res.status) << "\n";
    std::cout << "objective " << res.objective << "\n";
    std::cout << text;
    if (!report.empty()) {
        std::ostringstream os;
        os << cost_csv_header() << ",nodes,wall_ms,status\n"
           << cost_csv_row(*res.best_cost) << ',' << res.nodes_expanded << ','
           << res.wall_time.count() << ',' << status_to_string(res.status) << "\n";
        write_file(report, os.str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"appc: unified causal theory synthesis over symbolic sensory sequences"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand
    std::uint64_t seed = 0;
    int threads = 1;
    bool verbose = false;
    app.add_option("--seed", seed, "global random seed");
    app.add_option("--threads", threads, "worker pool size");
    app.add_flag("--verbose", verbose, "diagnostics on standard error");

    // generate
    auto* gen = app.add_subcommand("generate", "produce a task file from a domain generator");
    gen->require_subcommand(1);
    std::string g_out = "task.task", g_template_out, g_holdout = "last";

    auto* g_eca = gen->add_subcommand("eca", "elementary cellular automaton");
    int e_rule = 110, e_cells = 11, e_steps = 10;
    std::string e_init;
    g_eca->add_option("--rule", e_rule, "Wolfram rule 0..255");
    g_eca->add_option("--cells", e_cells, "number of cells");
    g_eca->add_option("--steps", e_steps, "visible steps before hold-out");
    g_eca->add_option("--init", e_init, "initial 0/1 configuration");
    g_eca->add_option("--out", g_out, "task file");
    g_eca->add_option("--template-out", g_template_out, "template file");
    g_eca->add_option("--hold-out", g_holdout, "last|first|random|none");

    auto* g_sw = gen->add_subcommand("sw", "Seek Whence letter sequence");
    std::string s_letters = "abcde";
    g_sw->add_option("--letters", s_letters, "sequence over a..f");
    g_sw->add_option("--out", g_out, "task file");
    g_sw->add_option("--template-out", g_template_out, "template file");

    auto* g_rhythm = gen->add_subcommand("rhythm", "drum rhythm / nursery tune");
    std::string r_events = "1:sc,3:sc,5:sg,7:sg";
    std::string r_sensors = "sa,sb,sc,sd,se,sf,sg,sc2";
    int r_steps = 8;
    g_rhythm->add_option("--events", r_events, "press events time:note,...");
    g_rhythm->add_option("--sensors", r_sensors, "comma separated note sensors");
    g_rhythm->add_option("--steps", r_steps, "total steps");
    g_rhythm->add_option("--out", g_out, "task file");
    g_rhythm->add_option("--template-out", g_template_out, "template file");
    g_rhythm->add_option("--hold-out", g_holdout, "last|first|random|none");

    auto* g_bind = gen->add_subcommand("binding", "multi-modal light/touch variant of the eca");
    int b_rule = 110, b_cells = 11, b_steps = 10;
    std::string b_init, b_touch = "3,11";
    g_bind->add_option("--rule", b_rule, "Wolfram rule");
    g_bind->add_option("--cells", b_cells, "cells");
    g_bind->add_option("--steps", b_steps, "steps");
    g_bind->add_option("--init", b_init, "initial 0/1 configuration");
    g_bind->add_option("--touch", b_touch, "touch sensor cells, comma separated");
    g_bind->add_option("--out", g_out, "task file");
    g_bind->add_option("--template-out", g_template_out, "template file");

    auto* g_occ = gen->add_subcommand("occlusion", "movers on a grid with occlusion");
    int o_width = 7, o_height = 2, o_steps = 10;
    std::string o_movers = "1:1:+1:1,2:4:-1:1";
    g_occ->add_option("--width", o_width, "grid width");
    g_occ->add_option("--height", o_height, "grid height");
    g_occ->add_option("--steps", o_steps, "steps");
    g_occ->add_option("--movers", o_movers, "row:col:dir:speed,...");
    g_occ->add_option("--out", g_out, "task file");
    g_occ->add_option("--template-out", g_template_out, "template file");

    // trace
    auto* tr = app.add_subcommand("trace", "run a theory's trace");
    std::string t_theory;
    int t_steps = 10;
    tr->add_option("--theory", t_theory, "theory file")->required();
    tr->add_option("--steps", t_steps, "horizon");

    // check
    auto* ck = app.add_subcommand("check", "unity report for a theory against a task");
    std::string c_theory, c_task, c_seq;
    ck->add_option("--theory", c_theory, "theory file")->required();
    ck->add_option("--task", c_task, "task file");
    ck->add_option("--seq", c_seq, "sequence file");

    // solve
    auto* sv = app.add_subcommand("solve", "synthesize the lowest-cost unified theory");
    std::string s_task, s_mode = "exact", s_templates = "task", s_out, s_report;
    double s_time = 0, s_beta = 1.0;
    std::uint64_t s_nodes = 0;
    bool s_nocover = false, s_noconcept = false, s_nospatial = false, s_nocostmin = false;
    sv->add_option("--task", s_task, "task file")->required();
    sv->add_option("--mode", s_mode, "exact|noise");
    sv->add_option("--templates", s_templates, "auto|task|FILE");
    sv->add_option("--time-limit", s_time, "seconds");
    sv->add_option("--node-limit", s_nodes, "search node cap");
    sv->add_option("--out", s_out, "write the best theory here");
    sv->add_option("--report", s_report, "write a cost/effort CSV here");
    sv->add_option("--beta", s_beta, "noise weighting of unexplained atoms");
    sv->add_flag("--no-covering", s_nocover, "ablation: drop the covering requirement");
    sv->add_flag("--no-conceptual-unity", s_noconcept, "ablation: drop constraint coverage");
    sv->add_flag("--no-spatial-unity", s_nospatial, "ablation: drop connectedness");
    sv->add_flag("--no-cost-min", s_nocostmin, "ablation: first admissible theory wins");

    // eval
    auto* ev = app.add_subcommand("eval", "run a task suite with engine and baselines");
    std::string e_suite, e_systems = "engine,constant,inertia", e_kind, e_out = "report.csv";
    std::string e_mislabel;
    double e_time = 0;
    ev->add_option("--suite", e_suite, "directory of .task files")->required();
    ev->add_option("--systems", e_systems, "comma separated systems");
    ev->add_option("--kind", e_kind, "force prediction|retrodiction|imputation");
    ev->add_option("--out", e_out, "records CSV (a .summary.csv lands beside it)");
    ev->add_option("--mislabel", e_mislabel, "comma separated mislabel fractions");
    ev->add_option("--time-limit", e_time, "per-task seconds");

    // estimate
    auto* es = app.add_subcommand("estimate", "closed-form grounding size of a template");
    std::string es_template;
    std::uint64_t es_steps = 10;
    es->add_option("--template", es_template, "template file")->required();
    es->add_option("--steps", es_steps, "time steps");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed()) {
            std::uint64_t hseed = seed;
            if (g_eca->parsed()) {
                std::vector<bool> init;
                if (e_init.empty()) {
                    init.assign(e_cells, false);
                    init[std::size_t(e_cells / 2)] = true;
                } else {
                    init = parse_bits(e_init);
                }
                auto gen_out = eca_generate(e_rule, e_cells, e_steps + 1, init);
                ApperceptionTask task;
                task.name = "eca_r" + std::to_string(e_rule) + "_c" + std::to_string(e_cells);
                task.sig = gen_out.sig;
                task.visible = gen_out.seq;
                task = apply_holdout(task, g_holdout, hseed);
                write_task_and_templates(task, eca_templates(e_cells), g_out, g_template_out);
            } else if (g_sw->parsed()) {
                ApperceptionTask task = seek_whence_task(s_letters);
                write_task_and_templates(task, seek_whence_templates(), g_out, g_template_out);
            } else if (g_rhythm->parsed()) {
                std::vector<std::string> sensors;
                for (auto& tok : CLI::detail::split(r_sensors, ',')) sensors.push_back(tok);
                std::vector<NoteEvent> events;
                for (auto& tok : CLI::detail::split(r_events, ',')) {
                    auto pos = tok.find(':');
                    if (pos == std::string::npos)
                        throw std::invalid_argument("event must be time:note");
                    events.push_back(NoteEvent{std::stoi(tok.substr(0, pos)), tok.substr(pos + 1)});
                }
                ApperceptionTask task = rhythm_tune_task(events, sensors, r_steps);
                task = apply_holdout(task, g_holdout, hseed);
                write_task_and_templates(task, rhythm_templates(sensors), g_out, g_template_out);
            } else if (g_bind->parsed()) {
                std::vector<bool> init;
                if (b_init.empty()) {
                    init.assign(b_cells, false);
                    init[std::size_t(b_cells / 2)] = true;
                } else {
                    init = parse_bits(b_init);
                }
                std::vector<int> touch;
                for (auto& tok : CLI::detail::split(b_touch, ',')) touch.push_back(std::stoi(tok));
                ApperceptionTask task = binding_generate(b_rule, b_cells, init, touch, b_steps);
                write_task_and_templates(task, binding_templates(b_cells, int(touch.size())), g_out,
                                         g_template_out);
            } else if (g_occ->parsed()) {
                std::vector<Mover> movers;
                for (auto& tok : CLI::detail::split(o_movers, ',')) {
                    auto parts = CLI::detail::split(tok, ':');
                    if (parts.size() != 4)
                        throw std::invalid_argument("mover must be row:col:dir:speed");
                    Mover m;
                    m.row = std::stoi(parts[0]);
                    m.start_col = std::stoi(parts[1]);
                    m.direction = std::stoi(parts[2]);
                    m.speed = std::stoi(parts[3]);
                    movers.push_back(m);
                }
                ApperceptionTask task = occlusion_generate(o_width, o_height, movers, o_steps);
                write_task_and_templates(task, occlusion_templates(o_width, o_height, int(movers.size())),
                                         g_out, g_template_out);
            }
            return 0;
        }
        if (tr->parsed()) {
            Theory th = parse_theory(read_file(t_theory));
            auto res = trace(th, std::size_t(t_steps));
            for (std::size_t t = 0; t < res.prefix.states.size(); ++t) {
                std::cout << "at " << (t + 1) << " {";
                for (const auto& a : res.prefix.states[t]) std::cout << " " << atom_to_string(*th.sig, a);
                std::cout << " }\n";
            }
            if (res.prefix.period)
                std::cout << "period " << res.prefix.period->first << " "
                          << res.prefix.period->second << "\n";
            if (!res.ok()) {
                std::cout << "violation at " << res.violation->time << ": "
                          << atom_to_string(*th.sig, res.violation->a) << " / "
                          << atom_to_string(*th.sig, res.violation->b) << "\n";
                return 1;
            }
            return 0;
        }
        if (ck->parsed()) {
            Theory th = parse_theory(read_file(c_theory));
            SensorySequence seq;
            if (!c_task.empty()) {
                ApperceptionTask task = parse_task(read_file(c_task));
                for (const auto& st : task.visible.steps) {
                    seq.steps.emplace_back();
                    for (const auto& a : st) {
                        std::vector<std::string> args;
                        for (int i = 0; i < int(a.arity); ++i)
                            args.push_back(task.sig->object(a.args[i]).name);
                        seq.steps.back().push_back(
                            make_atom(*th.sig, task.sig->pred(a.pred).name, args));
                    }
                }
                seq.normalize();
            } else if (!c_seq.empty()) {
                seq = parse_sequence(read_file(c_seq), *th.sig);
            } else {
                std::cerr << "check needs --task or --seq\n";
                return 2;
            }
            UnityReport rep = unified(th, seq);
            std::cout << report_to_string(rep);
            return rep.makes_sense() ? 0 : 1;
        }
        if (sv->parsed())
            return cmd_solve(s_task, s_mode, s_templates, s_time, s_nodes, seed, threads, s_out,
                             s_report, s_nocover, s_noconcept, s_nospatial, s_nocostmin, s_beta,
                             verbose);
        if (ev->parsed()) {
            std::vector<ApperceptionTask> tasks;
            for (const auto& entry : fs::directory_iterator(e_suite)) {
                if (entry.path().extension() == ".task")
                    tasks.push_back(parse_task(read_file(entry.path().string())));
            }
            std::sort(tasks.begin(), tasks.end(),
                      [](const auto& a, const auto& b) { return a.name < b.name; });
            if (tasks.empty()) {
                std::cerr << "no .task files in " << e_suite << "\n";
                return 1;
            }
            SuiteConfig cfg;
            cfg.systems.clear();
            for (auto& tok : CLI::detail::split(e_systems, ',')) cfg.systems.push_back(tok);
            cfg.threads = threads;
            cfg.seed = seed;
            cfg.template_dir = e_suite;
            if (e_time > 0)
                cfg.solve.budget.time_limit =
                    std::chrono::milliseconds(std::int64_t(e_time * 1000.0));
            if (!e_kind.empty()) cfg.force_kind = kind_from_string(e_kind);
            if (!e_mislabel.empty())
                for (auto& tok : CLI::detail::split(e_mislabel, ','))
                    cfg.mislabel_fractions.push_back(std::stod(tok));
            SuiteResult res = run_suite(tasks, cfg);
            write_file(e_out, records_csv(res.records));
            write_file(e_out + ".summary.csv", summaries_csv(res.summaries));
            std::cout << records_csv(res.records);
            return 0;
        }
        if (es->parsed()) {
            auto tmpls = parse_templates(read_file(es_template));
            for (const auto& tmpl : tmpls) {
                auto e = grounding_estimate(tmpl, es_steps);
                std::cout << "template " << tmpl.name << "\n";
                std::cout << "  ground_atoms " << e.n_ground_atoms << "\n";
                std::cout << "  unground_atoms " << e.n_unground_atoms << "\n";
                std::cout << "  substitutions " << e.n_substitutions << "\n";
                std::cout << "  holds " << e.holds << "\n";
                std::cout << "  eval_atom " << e.eval_atom << "\n";
                std::cout << "  eval_body " << e.eval_body << "\n";
                std::cout << "  total_atoms " << e.total_atoms << "\n";
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
