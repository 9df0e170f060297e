#include "appc/domains.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "appc/text.hpp"

namespace appc {

SensorySequence ApperceptionTask::full_sequence() const {
    SensorySequence s = visible;
    for (const auto& [tm, atom] : hidden) {
        if (tm < 1) throw std::logic_error("hidden atom before step 1");
        if (tm > s.steps.size()) s.steps.resize(tm);
        s.steps[tm - 1].push_back(atom);
    }
    s.normalize();
    return s;
}

std::string kind_to_string(ApperceptionTask::Kind k) {
    switch (k) {
        case ApperceptionTask::Prediction: return "prediction";
        case ApperceptionTask::Retrodiction: return "retrodiction";
        case ApperceptionTask::Imputation: return "imputation";
    }
    return "prediction";
}

ApperceptionTask::Kind kind_from_string(const std::string& s) {
    if (s == "prediction") return ApperceptionTask::Prediction;
    if (s == "retrodiction") return ApperceptionTask::Retrodiction;
    if (s == "imputation") return ApperceptionTask::Imputation;
    throw std::invalid_argument("unknown task kind: " + s);
}

// --- task text format ---

namespace {

std::string strip(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

ApperceptionTask parse_task(const std::string& text) {
    // signature lines are collected first, everything else second
    std::istringstream is(text);
    std::string raw;
    std::ostringstream sig_lines;
    std::vector<std::string> rest;
    while (std::getline(is, raw)) {
        auto pos = raw.find('#');
        std::string line = strip(pos == std::string::npos ? raw : raw.substr(0, pos));
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string kw;
        ls >> kw;
        if (kw == "type" || kw == "object" || kw == "pred" || kw == "var")
            sig_lines << line << "\n";
        else
            rest.push_back(line);
    }
    Theory sig_holder = parse_theory(sig_lines.str());

    ApperceptionTask t;
    t.sig = sig_holder.sig;
    const Signature& sig = *t.sig;
    std::ostringstream seq_lines;
    std::vector<std::string> hidden_lines;
    for (const auto& line : rest) {
        std::istringstream ls(line);
        std::string kw;
        ls >> kw;
        if (kw == "task") {
            ls >> t.name;
        } else if (kw == "kind") {
            std::string k;
            ls >> k;
            t.kind = kind_from_string(k);
        } else if (kw == "template") {
            std::string v;
            std::getline(ls, v);
            v = strip(v);
            t.template_file = (v == "auto") ? "" : v;
        } else if (kw == "bg") {
            std::string v;
            std::getline(ls, v);
            Atom a = parse_atom(strip(v), sig);
            if (!a.ground) throw std::invalid_argument("background atoms must be ground");
            t.background.push_back(a);
        } else if (kw == "at") {
            seq_lines << line << "\n";
        } else if (kw == "hidden") {
            hidden_lines.push_back(line);
        } else {
            throw std::invalid_argument("unknown task directive: " + kw);
        }
    }
    t.visible = parse_sequence(seq_lines.str(), sig);
    for (const auto& line : hidden_lines) {
        // hidden T { a(...) b(...) } shares the sequence-line grammar
        std::string as_at = "at" + line.substr(6);
        SensorySequence h = parse_sequence(as_at, sig);
        for (std::size_t i = 0; i < h.steps.size(); ++i)
            for (const auto& a : h.steps[i]) t.hidden.emplace_back(i + 1, a);
    }
    std::sort(t.hidden.begin(), t.hidden.end());
    std::sort(t.background.begin(), t.background.end());
    // hidden atoms are disjoint from visible atoms at the same step
    for (const auto& [tm, a] : t.hidden) {
        if (tm <= t.visible.steps.size()) {
            const auto& st = t.visible.steps[tm - 1];
            if (std::binary_search(st.begin(), st.end(), a))
                throw std::invalid_argument("hidden atom also visible at step " + std::to_string(tm));
        }
    }
    return t;
}

std::string serialize_task(const ApperceptionTask& t) {
    const Signature& sig = *t.sig;
    std::ostringstream os;
    if (!t.name.empty()) os << "task " << t.name << "\n";
    os << "kind " << kind_to_string(t.kind) << "\n";
    os << "template " << (t.template_file.empty() ? "auto" : t.template_file) << "\n";
    // signature block reuses the theory serializer's leading section
    Theory holder;
    holder.sig = t.sig;
    os << serialize_theory(holder);
    auto bg = t.background;
    std::sort(bg.begin(), bg.end());
    for (const auto& a : bg) os << "bg " << atom_to_string(sig, a) << "\n";
    os << serialize_sequence(t.visible, sig);
    std::map<std::size_t, std::vector<Atom>> hid;
    for (const auto& [tm, a] : t.hidden) hid[tm].push_back(a);
    for (auto& [tm, atoms] : hid) {
        std::sort(atoms.begin(), atoms.end());
        os << "hidden " << tm << " {";
        for (const auto& a : atoms) os << " " << atom_to_string(sig, a);
        os << " }\n";
    }
    return os.str();
}

// --- ECA ---

std::vector<bool> eca_next_row(int rule, const std::vector<bool>& row) {
    int n = int(row.size());
    std::vector<bool> next(n);
    for (int i = 0; i < n; ++i) {
        int l = row[(i - 1 + n) % n] ? 1 : 0;
        int c = row[i] ? 1 : 0;
        int r = row[(i + 1) % n] ? 1 : 0;
        int pattern = (l << 2) | (c << 1) | r;
        next[i] = (rule >> pattern) & 1;
    }
    return next;
}

namespace {

SignaturePtr eca_signature(int cells) {
    Signature::Builder b;
    b.type("cell");
    for (int i = 1; i <= cells; ++i) b.object("c" + std::to_string(i), "cell");
    b.pred("on", {"cell"}).pred("off", {"cell"});
    return b.build();
}

}  // namespace

EcaSequence eca_generate(int rule, int cells, int steps, const std::vector<bool>& init) {
    if (rule < 0 || rule > 255) throw std::invalid_argument("ECA rule must be 0..255");
    if (cells < 2) throw std::invalid_argument("ECA needs at least 2 cells");
    if (int(init.size()) != cells) throw std::invalid_argument("init length must equal cell count");
    if (steps < 1) throw std::invalid_argument("steps must be >= 1");

    EcaSequence out;
    out.sig = eca_signature(cells);
    const Signature& sig = *out.sig;
    auto on = *sig.find_pred("on");
    auto off = *sig.find_pred("off");

    std::vector<bool> row = init;
    for (int t = 0; t < steps; ++t) {
        std::vector<Atom> st;
        for (int i = 0; i < cells; ++i) {
            ObjectId o = *sig.find_object("c" + std::to_string(i + 1));
            st.push_back(make_ground_atom(sig, row[i] ? on : off, {o}));
        }
        out.seq.steps.push_back(std::move(st));
        row = eca_next_row(rule, row);
    }
    out.seq.normalize();
    return out;
}

std::vector<Template> eca_templates(int cells) {
    Signature::Builder b;
    b.type("cell");
    for (int i = 1; i <= cells; ++i) b.object("c" + std::to_string(i), "cell");
    b.pred("on", {"cell"}).pred("off", {"cell"}).pred("r", {"cell", "cell"});
    b.var("x", "cell").var("y", "cell").var("z", "cell");
    auto sig = b.build();

    std::vector<Template> out;
    int idx = 0;
    for (auto [ns, nc, nb] : {std::tuple{0, 1, 1}, {0, 2, 5}, {0, 4, 5}}) {
        Template t;
        t.sig = sig;
        t.n_static = ns;
        t.n_causal = nc;
        t.n_body = nb;
        t.name = "eca" + std::to_string(cells) + "_" + std::to_string(++idx);
        out.push_back(std::move(t));
    }
    return out;
}

// --- Seek Whence ---

namespace {

const char* kLetters = "abcdef";

SignaturePtr sw_signature(bool with_cells, int n_cells) {
    Signature::Builder b;
    b.type("sensor").type("letter");
    b.object("s", "sensor");
    for (int i = 0; i < 6; ++i) b.object(std::string("l") + kLetters[i], "letter");
    b.pred("value", {"sensor", "letter"}).pred("succ", {"letter", "letter"});
    b.var("x", "sensor").var("l", "letter").var("l2", "letter");
    if (with_cells) {
        b.type("cell");
        for (int i = 1; i <= n_cells; ++i) b.object("c" + std::to_string(i), "cell");
        b.pred("part", {"sensor", "cell"}).pred("p", {"cell", "letter"});
        b.pred("q1", {"cell"}).pred("q2", {"cell"}).pred("r", {"cell", "cell"});
        b.var("y", "cell").var("y2", "cell");
    }
    return b.build();
}

std::vector<Atom> succ_chain(const Signature& sig) {
    std::vector<Atom> out;
    PredId succ = *sig.find_pred("succ");
    for (int i = 0; i < 6; ++i) {
        ObjectId a = *sig.find_object(std::string("l") + kLetters[i]);
        ObjectId b = *sig.find_object(std::string("l") + kLetters[(i + 1) % 6]);
        out.push_back(make_ground_atom(sig, succ, {a, b}));
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

ApperceptionTask seek_whence_task(const std::string& letters) {
    if (letters.empty()) throw std::invalid_argument("empty letter sequence");
    for (char c : letters)
        if (c < 'a' || c > 'f') throw std::invalid_argument("letters must be a..f");

    ApperceptionTask t;
    t.name = "sw_" + letters;
    t.kind = ApperceptionTask::Prediction;
    t.sig = sw_signature(false, 0);
    const Signature& sig = *t.sig;
    PredId value = *sig.find_pred("value");
    ObjectId s = *sig.find_object("s");

    for (std::size_t i = 0; i < letters.size(); ++i) {
        Atom a = make_ground_atom(sig, value, {s, *sig.find_object(std::string("l") + letters[i])});
        if (i + 1 < letters.size())
            t.visible.steps.push_back({a});
        else {
            t.visible.steps.resize(letters.size());  // final step visible-empty
            t.hidden.emplace_back(letters.size(), a);
        }
    }
    t.visible.normalize();
    t.background = succ_chain(sig);
    return t;
}

std::vector<Template> seek_whence_templates() {
    std::vector<Template> out;
    {
        Template t;
        t.sig = sw_signature(false, 0);
        t.n_static = 0;
        t.n_causal = 1;
        t.n_body = 2;
        t.name = "sw1";
        out.push_back(std::move(t));
    }
    {
        Template t;
        t.sig = sw_signature(true, 2);
        t.n_static = 1;
        t.n_causal = 2;
        t.n_body = 4;
        t.name = "sw2";
        out.push_back(std::move(t));
    }
    {
        Template t;
        t.sig = sw_signature(true, 3);
        t.n_static = 1;
        t.n_causal = 2;
        t.n_body = 4;
        t.name = "sw3";
        out.push_back(std::move(t));
    }
    {
        Template t;
        t.sig = sw_signature(true, 3);
        t.n_static = 1;
        t.n_causal = 3;
        t.n_body = 4;
        t.name = "sw4";
        out.push_back(std::move(t));
    }
    return out;
}

// --- rhythms and tunes ---

namespace {

SignaturePtr rhythm_signature(const std::vector<std::string>& sensors) {
    Signature::Builder b;
    b.type("sensor").type("loudness");
    for (const auto& s : sensors) b.object(s, "sensor");
    for (int i = 0; i <= 3; ++i) b.object("l" + std::to_string(i), "loudness");
    b.pred("v", {"sensor", "loudness"});
    b.pred("succ", {"loudness", "loudness"});
    b.pred("maxl", {"loudness"}).pred("minl", {"loudness"}).pred("midl", {"loudness"});
    b.pred("r", {"sensor", "sensor"});
    b.var("s", "sensor").var("g", "loudness").var("g2", "loudness");
    return b.build();
}

}  // namespace

ApperceptionTask rhythm_tune_task(const std::vector<NoteEvent>& events,
                                  const std::vector<std::string>& sensors, int steps) {
    if (steps < 1) throw std::invalid_argument("steps must be >= 1");
    ApperceptionTask t;
    t.kind = ApperceptionTask::Prediction;
    t.name = "rhythm";
    t.sig = rhythm_signature(sensors);
    const Signature& sig = *t.sig;
    PredId v = *sig.find_pred("v");

    std::map<std::string, std::vector<bool>> pressed;
    for (const auto& s : sensors) pressed[s] = std::vector<bool>(steps, false);
    for (const auto& e : events) {
        if (e.time < 1 || e.time > steps) throw std::invalid_argument("event time out of range");
        auto it = pressed.find(canonical_name(e.note));
        if (it == pressed.end()) throw std::invalid_argument("unknown note sensor: " + e.note);
        it->second[e.time - 1] = true;
    }

    std::vector<std::vector<Atom>> rows(steps);
    for (const auto& s : sensors) {
        int level = 0;
        ObjectId so = *sig.find_object(s);
        for (int tm = 0; tm < steps; ++tm) {
            level = pressed[s][tm] ? 3 : std::max(0, level - 1);
            rows[tm].push_back(
                make_ground_atom(sig, v, {so, *sig.find_object("l" + std::to_string(level))}));
        }
    }
    t.visible.steps.assign(steps, {});
    for (int tm = 0; tm < steps; ++tm) {
        if (tm + 1 < steps)
            t.visible.steps[tm] = rows[tm];
        else
            for (const auto& a : rows[tm]) t.hidden.emplace_back(tm + 1, a);
    }
    t.visible.normalize();

    PredId succ = *sig.find_pred("succ");
    for (int i = 0; i <= 3; ++i) {
        ObjectId a = *sig.find_object("l" + std::to_string(i));
        ObjectId b = *sig.find_object("l" + std::to_string((i + 1) % 4));
        t.background.push_back(make_ground_atom(sig, succ, {a, b}));
    }
    t.background.push_back(make_ground_atom(sig, *sig.find_pred("maxl"), {*sig.find_object("l3")}));
    t.background.push_back(make_ground_atom(sig, *sig.find_pred("minl"), {*sig.find_object("l0")}));
    t.background.push_back(make_ground_atom(sig, *sig.find_pred("midl"), {*sig.find_object("l1")}));
    t.background.push_back(make_ground_atom(sig, *sig.find_pred("midl"), {*sig.find_object("l2")}));
    PredId r = *sig.find_pred("r");
    for (std::size_t i = 0; i < sensors.size(); ++i) {
        ObjectId a = *sig.find_object(sensors[i]);
        ObjectId b = *sig.find_object(sensors[(i + 1) % sensors.size()]);
        t.background.push_back(make_ground_atom(sig, r, {a, b}));
    }
    std::sort(t.background.begin(), t.background.end());
    return t;
}

std::vector<Template> rhythm_templates(const std::vector<std::string>& sensors) {
    Signature::Builder b;
    b.type("sensor").type("loudness").type("finger");
    for (const auto& s : sensors) b.object(s, "sensor");
    for (int i = 0; i <= 3; ++i) b.object("l" + std::to_string(i), "loudness");
    b.object("f", "finger");
    b.pred("v", {"sensor", "loudness"}).pred("succ", {"loudness", "loudness"});
    b.pred("maxl", {"loudness"}).pred("minl", {"loudness"}).pred("midl", {"loudness"});
    b.pred("r", {"sensor", "sensor"}).pred("part", {"finger", "sensor"});
    b.pred("p1", {"sensor"}).pred("p2", {"sensor"});
    b.pred("q1", {"finger"}).pred("q2", {"finger"});
    b.var("s", "sensor").var("g", "loudness").var("g2", "loudness").var("f1", "finger");
    auto sig = b.build();

    std::vector<Template> out;
    int idx = 0;
    for (auto [ns, nc, nb] : {std::tuple{2, 3, 2}, {2, 4, 3}, {2, 5, 3}}) {
        Template t;
        t.sig = sig;
        t.n_static = ns;
        t.n_causal = nc;
        t.n_body = nb;
        t.name = "rhythm" + std::to_string(++idx);
        out.push_back(std::move(t));
    }
    return out;
}

// --- multi-modal binding ---

ApperceptionTask binding_generate(int rule, int cells, const std::vector<bool>& init,
                                  const std::vector<int>& touch_cells, int steps) {
    if (cells < 2) throw std::invalid_argument("binding needs at least 2 cells");
    for (int tc : touch_cells)
        if (tc < 1 || tc > cells) throw std::invalid_argument("touch cell out of range");

    Signature::Builder b;
    b.type("light").type("touch").type("grade");
    for (int i = 1; i <= cells; ++i) b.object("li" + std::to_string(i), "light");
    for (std::size_t i = 0; i < touch_cells.size(); ++i) b.object("t" + std::to_string(i + 1), "touch");
    for (int i = 0; i <= 3; ++i) b.object("g" + std::to_string(i), "grade");
    b.pred("black", {"light"}).pred("white", {"light"});
    b.pred("v", {"touch", "grade"});
    b.pred("succ", {"grade", "grade"});
    b.pred("maxg", {"grade"}).pred("ming", {"grade"}).pred("midg", {"grade"});
    auto sig_ptr = b.build();
    const Signature& sig = *sig_ptr;

    ApperceptionTask t;
    t.kind = ApperceptionTask::Prediction;
    t.name = "binding_r" + std::to_string(rule);
    t.sig = sig_ptr;

    PredId black = *sig.find_pred("black"), white = *sig.find_pred("white"), v = *sig.find_pred("v");
    std::vector<bool> row = init;
    std::vector<int> levels(touch_cells.size(), 0);
    std::vector<std::vector<Atom>> rows;
    for (int tm = 0; tm < steps; ++tm) {
        std::vector<Atom> st;
        for (int i = 0; i < cells; ++i) {
            ObjectId o = *sig.find_object("li" + std::to_string(i + 1));
            st.push_back(make_ground_atom(sig, row[i] ? black : white, {o}));
        }
        for (std::size_t j = 0; j < touch_cells.size(); ++j) {
            levels[j] = row[touch_cells[j] - 1] ? 3 : std::max(0, levels[j] - 1);
            ObjectId o = *sig.find_object("t" + std::to_string(j + 1));
            st.push_back(make_ground_atom(sig, v, {o, *sig.find_object("g" + std::to_string(levels[j]))}));
        }
        rows.push_back(std::move(st));
        row = eca_next_row(rule, row);
    }
    t.visible.steps.assign(steps, {});
    for (int tm = 0; tm < steps; ++tm) {
        if (tm + 1 < steps)
            t.visible.steps[tm] = rows[tm];
        else
            for (const auto& a : rows[tm]) t.hidden.emplace_back(tm + 1, a);
    }
    t.visible.normalize();

    PredId succ = *sig.find_pred("succ");
    for (int i = 0; i <= 3; ++i)
        t.background.push_back(make_ground_atom(
            sig, succ,
            {*sig.find_object("g" + std::to_string(i)), *sig.find_object("g" + std::to_string((i + 1) % 4))}));
    t.background.push_back(make_ground_atom(sig, *sig.find_pred("maxg"), {*sig.find_object("g3")}));
    t.background.push_back(make_ground_atom(sig, *sig.find_pred("ming"), {*sig.find_object("g0")}));
    t.background.push_back(make_ground_atom(sig, *sig.find_pred("midg"), {*sig.find_object("g1")}));
    t.background.push_back(make_ground_atom(sig, *sig.find_pred("midg"), {*sig.find_object("g2")}));
    std::sort(t.background.begin(), t.background.end());
    return t;
}

std::vector<Template> binding_templates(int cells, int touches) {
    Signature::Builder b;
    b.type("cell").type("light").type("touch").type("grade");
    for (int i = 1; i <= cells; ++i) b.object("c" + std::to_string(i), "cell");
    for (int i = 1; i <= cells; ++i) b.object("li" + std::to_string(i), "light");
    for (int i = 1; i <= touches; ++i) b.object("t" + std::to_string(i), "touch");
    for (int i = 0; i <= 3; ++i) b.object("g" + std::to_string(i), "grade");
    b.pred("black", {"light"}).pred("white", {"light"});
    b.pred("v", {"touch", "grade"}).pred("p", {"touch", "grade"});
    b.pred("succ", {"grade", "grade"});
    b.pred("maxg", {"grade"}).pred("ming", {"grade"}).pred("midg", {"grade"});
    b.pred("on", {"cell"}).pred("off", {"cell"}).pred("r", {"cell", "cell"});
    b.pred("inl", {"light", "cell"}).pred("int", {"touch", "cell"});
    b.var("c", "cell").var("c2", "cell").var("c3", "cell");
    b.var("x", "touch").var("y", "light").var("g", "grade").var("g2", "grade");
    auto sig = b.build();

    std::vector<Template> out;
    Template t;
    t.sig = sig;
    t.n_static = 4;
    t.n_causal = 4;
    t.n_body = 4;
    t.name = "binding1";
    out.push_back(std::move(t));
    return out;
}

// --- occlusion ---

ApperceptionTask occlusion_generate(int width, int height, const std::vector<Mover>& movers,
                                    int steps) {
    if (width < 1 || height < 1) throw std::invalid_argument("bad grid size");
    if (steps < 1) throw std::invalid_argument("steps must be >= 1");
    std::vector<bool> row_used(height + 1, false);
    for (const auto& m : movers) {
        if (m.row < 1 || m.row > height) throw std::invalid_argument("mover row out of range");
        if (m.start_col < 1 || m.start_col > width) throw std::invalid_argument("mover column out of range");
        if (m.direction != 1 && m.direction != -1) throw std::invalid_argument("direction must be +-1");
        if (m.speed < 0) throw std::invalid_argument("negative speed");
        if (row_used[m.row]) throw std::invalid_argument("one mover per row");
        row_used[m.row] = true;
    }

    Signature::Builder b;
    b.type("cell").type("mover");
    for (int x = 1; x <= width; ++x)
        for (int y = 1; y <= height; ++y)
            b.object("c" + std::to_string(x) + "_" + std::to_string(y), "cell");
    for (std::size_t i = 0; i < movers.size(); ++i) b.object("m" + std::to_string(i + 1), "mover");
    b.pred("in", {"mover", "cell"});
    b.pred("right", {"cell", "cell"}).pred("below", {"cell", "cell"});
    auto sig_ptr = b.build();
    const Signature& sig = *sig_ptr;

    ApperceptionTask t;
    t.kind = ApperceptionTask::Imputation;
    t.name = "occlusion";
    t.sig = sig_ptr;
    PredId in = *sig.find_pred("in");

    auto cell = [&](int x, int y) {
        return *sig.find_object("c" + std::to_string(x) + "_" + std::to_string(y));
    };

    t.visible.steps.assign(steps, {});
    std::vector<int> cols(movers.size());
    for (std::size_t i = 0; i < movers.size(); ++i) cols[i] = movers[i].start_col - 1;
    for (int tm = 0; tm < steps; ++tm) {
        for (std::size_t i = 0; i < movers.size(); ++i) {
            bool occluded = false;
            for (std::size_t j = 0; j < movers.size(); ++j)
                if (j != i && cols[j] == cols[i] && movers[j].row > movers[i].row) occluded = true;
            Atom a = make_ground_atom(
                sig, in,
                {*sig.find_object("m" + std::to_string(i + 1)), cell(cols[i] + 1, movers[i].row)});
            if (occluded)
                t.hidden.emplace_back(tm + 1, a);
            else
                t.visible.steps[tm].push_back(a);
        }
        for (std::size_t i = 0; i < movers.size(); ++i)
            cols[i] = ((cols[i] + movers[i].direction * movers[i].speed) % width + width) % width;
    }
    t.visible.normalize();
    std::sort(t.hidden.begin(), t.hidden.end());

    PredId right = *sig.find_pred("right"), below = *sig.find_pred("below");
    for (int x = 1; x <= width; ++x)
        for (int y = 1; y <= height; ++y) {
            t.background.push_back(make_ground_atom(sig, right, {cell(x, y), cell(x % width + 1, y)}));
            t.background.push_back(make_ground_atom(sig, below, {cell(x, y), cell(x, y % height + 1)}));
        }
    std::sort(t.background.begin(), t.background.end());
    return t;
}

std::vector<Template> occlusion_templates(int width, int height, int movers) {
    Signature::Builder b;
    b.type("cell").type("mover");
    for (int x = 1; x <= width; ++x)
        for (int y = 1; y <= height; ++y)
            b.object("c" + std::to_string(x) + "_" + std::to_string(y), "cell");
    for (int i = 1; i <= movers; ++i) b.object("m" + std::to_string(i), "mover");
    b.pred("in", {"mover", "cell"});
    b.pred("right", {"cell", "cell"}).pred("below", {"cell", "cell"});
    b.pred("p1", {"mover"}).pred("p2", {"mover"}).pred("p3", {"mover"}).pred("p4", {"mover"});
    b.var("m", "mover").var("c", "cell").var("c2", "cell");
    auto sig = b.build();

    std::vector<Template> out;
    int idx = 0;
    for (auto [ns, nc, nb] : {std::tuple{0, 2, 3}, {0, 4, 4}}) {
        Template t;
        t.sig = sig;
        t.n_static = ns;
        t.n_causal = nc;
        t.n_body = nb;
        t.name = "occl" + std::to_string(++idx);
        out.push_back(std::move(t));
    }
    return out;
}

}  // namespace appc
