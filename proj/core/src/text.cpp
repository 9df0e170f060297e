#include "appc/text.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace appc {

namespace {

std::string strip(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& line) {
    auto pos = line.find('#');
    return strip(pos == std::string::npos ? line : line.substr(0, pos));
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

// Splits "a(x,y), b(x)" on commas at paren depth 0.
std::vector<std::string> split_atoms(const std::string& s) {
    std::vector<std::string> out;
    int depth = 0;
    std::string cur;
    for (char c : s) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == ',' && depth == 0) {
            out.push_back(strip(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!strip(cur).empty()) out.push_back(strip(cur));
    return out;
}

struct ParsedAtomText {
    std::string pred;
    std::vector<std::string> args;
};

ParsedAtomText split_atom_text(const std::string& text, int line_no) {
    auto open = text.find('(');
    auto close = text.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open)
        throw std::invalid_argument("line " + std::to_string(line_no) + ": malformed atom: " + text);
    ParsedAtomText out;
    out.pred = strip(text.substr(0, open));
    std::string inner = text.substr(open + 1, close - open - 1);
    std::istringstream is(inner);
    std::string arg;
    while (std::getline(is, arg, ',')) {
        arg = strip(arg);
        if (arg.empty())
            throw std::invalid_argument("line " + std::to_string(line_no) + ": empty atom argument");
        out.args.push_back(arg);
    }
    if (out.args.empty())
        throw std::invalid_argument("line " + std::to_string(line_no) + ": atom with no arguments");
    return out;
}

Atom parse_atom_at(const std::string& text, const Signature& sig, int line_no) {
    auto p = split_atom_text(text, line_no);
    try {
        return make_atom(sig, p.pred, p.args);
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument("line " + std::to_string(line_no) + ": " + e.what());
    }
}

Constraint parse_constraint_line(const std::string& kw, const std::vector<std::string>& names,
                                 const Signature& sig, int line_no) {
    Constraint c;
    c.kind = kw == "xor" ? Constraint::XorUnary
             : kw == "xor2" ? Constraint::XorBinary
                            : Constraint::ExistsUnique;
    for (const auto& n : names) {
        auto p = sig.find_pred(canonical_name(n));
        if (!p)
            throw std::invalid_argument("line " + std::to_string(line_no) + ": unknown predicate: " + n);
        c.preds.push_back(*p);
    }
    std::sort(c.preds.begin(), c.preds.end());
    try {
        validate_constraint(sig, c);
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument("line " + std::to_string(line_no) + ": " + e.what());
    }
    return c;
}

struct DeclLines {
    Signature::Builder builder;
    bool any = false;

    // Returns true when the line was a signature declaration.
    bool consume(const std::vector<std::string>& toks, const std::string& line, int line_no) {
        const std::string& kw = toks[0];
        if (kw == "type") {
            if (toks.size() != 2) throw std::invalid_argument("line " + std::to_string(line_no) + ": type NAME");
            builder.type(toks[1]);
        } else if (kw == "object") {
            if (toks.size() != 3)
                throw std::invalid_argument("line " + std::to_string(line_no) + ": object NAME TYPE");
            builder.object(toks[1], toks[2]);
        } else if (kw == "pred") {
            auto rest = strip(line.substr(line.find("pred") + 4));
            auto p = split_atom_text(rest, line_no);
            builder.pred(p.pred, p.args);
        } else if (kw == "var") {
            if (toks.size() != 3)
                throw std::invalid_argument("line " + std::to_string(line_no) + ": var NAME TYPE");
            builder.var(toks[1], toks[2]);
        } else {
            return false;
        }
        any = true;
        return true;
    }
};

}  // namespace

Atom parse_atom(const std::string& text, const Signature& sig) {
    return parse_atom_at(strip(text), sig, 0);
}

Rule parse_rule_line(const std::string& line, const Signature& sig) {
    // body ('->' | '>>') head
    auto arrow = line.find("->");
    auto causes = line.find(">>");
    Rule r;
    std::size_t pos;
    std::size_t len = 2;
    if (causes != std::string::npos && (arrow == std::string::npos || causes < arrow)) {
        r.kind = Rule::Causal;
        pos = causes;
    } else if (arrow != std::string::npos) {
        r.kind = Rule::Static;
        pos = arrow;
    } else {
        throw std::invalid_argument("rule without '->' or '>>': " + line);
    }
    std::string body_text = strip(line.substr(0, pos));
    std::string head_text = strip(line.substr(pos + len));
    for (const auto& a : split_atoms(body_text)) r.body.push_back(parse_atom_at(a, sig, 0));
    r.head = parse_atom_at(head_text, sig, 0);
    std::sort(r.body.begin(), r.body.end());
    validate_rule(sig, r);
    return r;
}

std::string rule_to_string(const Signature& sig, const Rule& r) {
    std::string s = "rule ";
    for (std::size_t i = 0; i < r.body.size(); ++i) {
        if (i) s += ", ";
        s += atom_to_string(sig, r.body[i]);
    }
    s += r.kind == Rule::Causal ? " >> " : " -> ";
    s += atom_to_string(sig, r.head);
    return s;
}

std::string constraint_to_string(const Signature& sig, const Constraint& c) {
    std::string s = c.kind == Constraint::XorUnary ? "xor"
                    : c.kind == Constraint::XorBinary ? "xor2"
                                                      : "unique";
    for (PredId p : c.preds) {
        s += ' ';
        s += sig.pred(p).name;
    }
    return s;
}

Theory parse_theory(const std::string& text) {
    std::istringstream is(text);
    std::string raw;
    int line_no = 0;

    DeclLines decls;
    std::vector<std::pair<int, std::string>> body_lines;
    while (std::getline(is, raw)) {
        ++line_no;
        auto line = strip_comment(raw);
        if (line.empty()) continue;
        auto toks = split_ws(line);
        if (!decls.consume(toks, line, line_no)) body_lines.emplace_back(line_no, line);
    }

    Theory t;
    t.sig = decls.builder.build();
    const Signature& sig = *t.sig;
    for (const auto& [no, line] : body_lines) {
        auto toks = split_ws(line);
        const std::string& kw = toks[0];
        if (kw == "init") {
            auto rest = strip(line.substr(line.find("init") + 4));
            Atom a = parse_atom_at(rest, sig, no);
            if (!a.ground)
                throw std::invalid_argument("line " + std::to_string(no) + ": init atom must be ground");
            t.inits.push_back(a);
        } else if (kw == "rule") {
            auto rest = strip(line.substr(line.find("rule") + 4));
            try {
                t.rules.push_back(parse_rule_line(rest, sig));
            } catch (const std::invalid_argument& e) {
                throw std::invalid_argument("line " + std::to_string(no) + ": " + e.what());
            }
        } else if (kw == "xor" || kw == "xor2" || kw == "unique") {
            std::vector<std::string> names(toks.begin() + 1, toks.end());
            t.constraints.push_back(parse_constraint_line(kw, names, sig, no));
        } else {
            throw std::invalid_argument("line " + std::to_string(no) + ": unknown directive: " + kw);
        }
    }
    t.normalize();
    validate_theory(t);
    return t;
}

std::string serialize_theory(const Theory& t) {
    const Signature& sig = *t.sig;
    std::ostringstream os;
    for (TypeId i = 0; i < TypeId(sig.num_types()); ++i) os << "type " << sig.type_name(i) << "\n";
    for (ObjectId o = 0; o < ObjectId(sig.num_objects()); ++o)
        os << "object " << sig.object(o).name << " " << sig.type_name(sig.object(o).type) << "\n";
    for (PredId p = 0; p < PredId(sig.num_preds()); ++p) {
        os << "pred " << sig.pred(p).name << "(";
        const auto& ats = sig.pred(p).arg_types;
        for (std::size_t i = 0; i < ats.size(); ++i) os << (i ? "," : "") << sig.type_name(ats[i]);
        os << ")\n";
    }
    for (VarId v = 0; v < VarId(sig.num_vars()); ++v)
        os << "var " << sig.var(v).name << " " << sig.type_name(sig.var(v).type) << "\n";
    Theory c = t;
    c.normalize();
    for (const auto& a : c.inits) os << "init " << atom_to_string(sig, a) << "\n";
    for (const auto& r : c.rules) os << rule_to_string(sig, r) << "\n";
    for (const auto& k : c.constraints) os << constraint_to_string(sig, k) << "\n";
    return os.str();
}

SensorySequence parse_sequence(const std::string& text, const Signature& sig) {
    std::istringstream is(text);
    std::string raw;
    int line_no = 0;
    std::vector<std::pair<std::size_t, std::vector<Atom>>> at_lines;
    while (std::getline(is, raw)) {
        ++line_no;
        auto line = strip_comment(raw);
        if (line.empty()) continue;
        auto toks = split_ws(line);
        if (toks[0] != "at")
            throw std::invalid_argument("line " + std::to_string(line_no) + ": expected 'at T { ... }'");
        if (toks.size() < 2)
            throw std::invalid_argument("line " + std::to_string(line_no) + ": missing time index");
        std::size_t tm = std::stoul(toks[1]);
        if (tm < 1) throw std::invalid_argument("line " + std::to_string(line_no) + ": time starts at 1");
        auto open = line.find('{');
        auto close = line.rfind('}');
        if (open == std::string::npos || close == std::string::npos || close < open)
            throw std::invalid_argument("line " + std::to_string(line_no) + ": missing braces");
        std::string inner = strip(line.substr(open + 1, close - open - 1));
        std::vector<Atom> atoms;
        // atoms are whitespace separated: on(c4) on(c5)
        std::size_t i = 0;
        while (i < inner.size()) {
            while (i < inner.size() && std::isspace(static_cast<unsigned char>(inner[i]))) ++i;
            if (i >= inner.size()) break;
            std::size_t j = inner.find(')', i);
            if (j == std::string::npos)
                throw std::invalid_argument("line " + std::to_string(line_no) + ": malformed atom list");
            Atom a = parse_atom_at(strip(inner.substr(i, j - i + 1)), sig, line_no);
            if (!a.ground)
                throw std::invalid_argument("line " + std::to_string(line_no) + ": sequence atoms must be ground");
            atoms.push_back(a);
            i = j + 1;
        }
        at_lines.emplace_back(tm, std::move(atoms));
    }
    SensorySequence s;
    std::size_t max_t = 0;
    for (const auto& [tm, _] : at_lines) max_t = std::max(max_t, tm);
    s.steps.resize(max_t);
    for (auto& [tm, atoms] : at_lines) {
        auto& step = s.steps[tm - 1];
        step.insert(step.end(), atoms.begin(), atoms.end());
    }
    s.normalize();
    return s;
}

std::string serialize_sequence(const SensorySequence& s, const Signature& sig) {
    std::ostringstream os;
    SensorySequence c = s;
    c.normalize();
    for (std::size_t t = 0; t < c.steps.size(); ++t) {
        os << "at " << (t + 1) << " {";
        for (const auto& a : c.steps[t]) os << " " << atom_to_string(sig, a);
        os << " }\n";
    }
    return os.str();
}

std::vector<Template> parse_templates(const std::string& text) {
    std::istringstream is(text);
    std::string raw;
    int line_no = 0;

    struct Block {
        std::string name;
        DeclLines decls;
        int n_static = 0, n_causal = 0, n_body = 1;
    };
    std::vector<Block> blocks;
    while (std::getline(is, raw)) {
        ++line_no;
        auto line = strip_comment(raw);
        if (line.empty()) continue;
        auto toks = split_ws(line);
        if (toks[0] == "template") {
            Block b;
            b.name = toks.size() > 1 ? toks[1] : ("t" + std::to_string(blocks.size() + 1));
            blocks.push_back(std::move(b));
            continue;
        }
        if (blocks.empty())
            throw std::invalid_argument("line " + std::to_string(line_no) +
                                        ": template file must start with a 'template' line");
        Block& b = blocks.back();
        if (toks[0] == "nstatic" || toks[0] == "ncausal" || toks[0] == "nbody") {
            if (toks.size() != 2)
                throw std::invalid_argument("line " + std::to_string(line_no) + ": " + toks[0] + " N");
            int v = std::stoi(toks[1]);
            if (toks[0] == "nstatic") b.n_static = v;
            else if (toks[0] == "ncausal") b.n_causal = v;
            else b.n_body = v;
        } else if (!b.decls.consume(toks, line, line_no)) {
            throw std::invalid_argument("line " + std::to_string(line_no) + ": unknown directive: " + toks[0]);
        }
    }
    std::vector<Template> out;
    for (auto& b : blocks) {
        Template t;
        t.name = b.name;
        t.sig = b.decls.builder.build();
        t.n_static = b.n_static;
        t.n_causal = b.n_causal;
        t.n_body = b.n_body;
        validate_template(t);
        out.push_back(std::move(t));
    }
    if (out.empty()) throw std::invalid_argument("template file contains no templates");
    return out;
}

std::string serialize_template(const Template& t) {
    const Signature& sig = *t.sig;
    std::ostringstream os;
    os << "template " << (t.name.empty() ? "t1" : t.name) << "\n";
    for (TypeId i = 0; i < TypeId(sig.num_types()); ++i) os << "type " << sig.type_name(i) << "\n";
    for (ObjectId o = 0; o < ObjectId(sig.num_objects()); ++o)
        os << "object " << sig.object(o).name << " " << sig.type_name(sig.object(o).type) << "\n";
    for (PredId p = 0; p < PredId(sig.num_preds()); ++p) {
        os << "pred " << sig.pred(p).name << "(";
        const auto& ats = sig.pred(p).arg_types;
        for (std::size_t i = 0; i < ats.size(); ++i) os << (i ? "," : "") << sig.type_name(ats[i]);
        os << ")\n";
    }
    for (VarId v = 0; v < VarId(sig.num_vars()); ++v)
        os << "var " << sig.var(v).name << " " << sig.type_name(sig.var(v).type) << "\n";
    os << "nstatic " << t.n_static << "\n";
    os << "ncausal " << t.n_causal << "\n";
    os << "nbody " << t.n_body << "\n";
    return os.str();
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write file: " + path);
    f << content;
}

}  // namespace appc
