#pragma once

// Shared test fixtures and the independent oracles the suites check
// against: a naive structural matcher, a removal-based dominator oracle, a
// breadth-first rewriting oracle for value sets, and a small DOT syntax
// checker. These deliberately do not reuse the engine's dispatch path.

#include <cctype>
#include <deque>
#include <optional>
#include <set>
#include <string>

#include "pulltab/canon.hpp"
#include "pulltab/generators.hpp"
#include "pulltab/linear.hpp"
#include "pulltab/program.hpp"
#include "pulltab/rewrite.hpp"
#include "pulltab/strategies.hpp"

namespace testsupport {

using namespace pulltab;

struct Ctx {
  Allocator alloc;
  Program program;

  explicit Ctx(const std::string& text) : program(Program::load(text, alloc)) {}

  Graph parse(const std::string& text, bool adhoc = false) {
    Signature sig = program.signature();
    ParseOptions opts;
    opts.allow_undeclared = adhoc;
    return parse_linear(text, sig, alloc, opts);
  }

  // Instantiates the rhs of the nullary `main` rule.
  Graph entry_main() {
    RulePtr m = program.main_rule();
    Graph g;
    NodeId id = alloc.fresh_node();
    Node n;
    n.symbol = m->op;
    g.put(id, std::move(n));
    g.set_root(id);
    return rewrite_step(g, id, *m, alloc);
  }
};

inline Ctx base_ctx() { return Ctx(base_program_text()); }

inline NodeId find_node(const Graph& g, const std::string& symbol) {
  for (NodeId id : preorder(g))
    if (!g.node(id).is_var() && g.node(id).symbol->name == symbol) return id;
  throw Error("no node labeled '" + symbol + "'");
}

inline std::set<std::string> value_keys(const Outcome& o) {
  std::set<std::string> keys;
  for (const Graph& v : o.values) keys.insert(print_linear(v));
  return keys;
}

inline std::set<std::string> canon_keys(const std::vector<Graph>& graphs) {
  std::set<std::string> keys;
  for (const Graph& g : graphs) keys.insert(canonicalize(g));
  return keys;
}

// --- naive structural matcher (oracle for definitional-tree dispatch) ----

inline bool naive_match(const Graph& g, NodeId gn, const Graph& pat, NodeId pn,
                        std::map<std::string, NodeId>& binding) {
  const Node& p = pat.node(pn);
  if (p.is_var()) {
    auto [it, fresh] = binding.emplace(p.var, gn);
    return fresh || it->second == gn;
  }
  const Node& n = g.node(gn);
  if (n.is_var() || n.symbol->name != p.symbol->name) return false;
  for (std::size_t i = 0; i < p.succs.size(); ++i)
    if (!naive_match(g, n.succs[i], pat, p.succs[i], binding)) return false;
  return true;
}

inline std::vector<RulePtr> naive_matching_rules(const Program& prog, const Graph& g,
                                                 NodeId at) {
  std::vector<RulePtr> out;
  const Node& n = g.node(at);
  if (n.is_var() || !n.is_op()) return out;
  for (const RulePtr& r : prog.rules_of(n.symbol->name)) {
    std::map<std::string, NodeId> binding;
    if (naive_match(g, at, r->lhs, r->lhs.root(), binding)) out.push_back(r);
  }
  return out;
}

// --- removal-based dominator oracle --------------------------------------

// x dominates n iff every root-to-n path contains x, i.e. removing x
// disconnects n. This is the all-paths intersection without enumerating
// paths.
inline bool oracle_dominates(const Graph& g, NodeId x, NodeId n) {
  if (x == n) return true;
  std::set<NodeId> seen;
  std::deque<NodeId> queue;
  if (g.root() != x) {
    queue.push_back(g.root());
    seen.insert(g.root());
  }
  while (!queue.empty()) {
    NodeId cur = queue.front();
    queue.pop_front();
    if (cur == n) return false;
    for (NodeId s : g.node(cur).succs) {
      if (s == x || seen.count(s)) continue;
      seen.insert(s);
      queue.push_back(s);
    }
  }
  return true;
}

inline NodeId oracle_immediate_dominator(const Graph& g, NodeId n) {
  std::vector<NodeId> proper;
  for (const auto& [id, node] : g.nodes()) {
    (void)node;
    if (id != n && oracle_dominates(g, id, n)) proper.push_back(id);
  }
  for (NodeId d : proper) {
    bool least = true;
    for (NodeId other : proper)
      if (!oracle_dominates(g, other, d)) least = false;
    if (least) return d;
  }
  throw Error("oracle found no dominator");
}

// --- breadth-first rewriting oracle for value sets ------------------------

// Ground truth by exhaustive interleaving of single rewrite steps (no
// pull-tabs). Identifiers stay one-to-one along pure rewriting, so every
// path is a consistent computation.
inline std::optional<std::set<std::string>> oracle_values(const Program& prog,
                                                          const Graph& g, Allocator& alloc,
                                                          std::size_t state_cap = 50000) {
  std::set<std::string> seen{canonicalize(g)};
  std::set<std::string> values;
  std::deque<Graph> queue{g};
  while (!queue.empty()) {
    Graph cur = std::move(queue.front());
    queue.pop_front();
    if (is_value(cur)) values.insert(print_linear(cur));
    for (const StepPlan& plan : applicable_steps(prog, cur)) {
      Graph next = rewrite_step(cur, plan.at, *plan.rule, alloc);
      if (!seen.insert(canonicalize(next)).second) continue;
      if (seen.size() > state_cap) return std::nullopt;
      queue.push_back(std::move(next));
    }
  }
  return values;
}

// --- DOT syntax checker ----------------------------------------------------

// Accepts the digraph subset the exporter emits: a header, node statements
// with a quoted label attribute, and edge statements.
inline bool dot_syntax_ok(const std::string& text) {
  std::size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  auto word = [&]() -> std::string {
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      ++pos;
    return text.substr(start, pos - start);
  };
  auto expect = [&](char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  };
  if (word() != "digraph") return false;
  if (word().empty()) return false;
  if (!expect('{')) return false;
  for (;;) {
    skip_ws();
    if (pos < text.size() && text[pos] == '}') {
      ++pos;
      break;
    }
    if (word().empty()) return false;  // node id
    skip_ws();
    if (pos + 1 < text.size() && text[pos] == '-' && text[pos + 1] == '>') {
      pos += 2;
      if (word().empty()) return false;  // edge head
    }
    skip_ws();
    if (pos < text.size() && text[pos] == '[') {
      ++pos;
      if (word() != "label") return false;
      if (!expect('=')) return false;
      skip_ws();
      if (pos >= text.size() || text[pos] != '"') return false;
      ++pos;
      while (pos < text.size() && text[pos] != '"') {
        if (text[pos] == '\\') ++pos;
        ++pos;
      }
      if (pos >= text.size()) return false;
      ++pos;  // closing quote
      if (!expect(']')) return false;
    }
    if (!expect(';')) return false;
  }
  skip_ws();
  return pos == text.size();
}

}  // namespace testsupport
