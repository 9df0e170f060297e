#pragma once

#include <string>
#include <vector>

#include "appc/lang.hpp"

namespace appc {

// Line-oriented text formats ('#' starts a comment):
//   type cell
//   object c1 cell
//   pred on(cell)
//   pred r(cell,cell)
//   var x cell
//   init on(c6)
//   rule p1(x) >> p2(x)            causal
//   rule r(x,y), on(x) -> on(y)    static, comma-separated body
//   xor on off
//   xor2 r s
//   unique r
// Sequences: at 3 { on(c4) on(c5) }
// Parsing then serializing is the identity on the canonical form.

Theory parse_theory(const std::string& text);
std::string serialize_theory(const Theory& t);

SensorySequence parse_sequence(const std::string& text, const Signature& sig);
std::string serialize_sequence(const SensorySequence& s, const Signature& sig);

// Template files hold one or more blocks, each opened by a `template NAME`
// line, followed by signature lines and the bounds `nstatic/ncausal/nbody`.
std::vector<Template> parse_templates(const std::string& text);
std::string serialize_template(const Template& t);

Atom parse_atom(const std::string& text, const Signature& sig);

Rule parse_rule_line(const std::string& line, const Signature& sig);
std::string rule_to_string(const Signature& sig, const Rule& r);
std::string constraint_to_string(const Signature& sig, const Constraint& c);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace appc
