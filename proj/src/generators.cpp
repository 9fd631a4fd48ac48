#include "pulltab/generators.hpp"

#include <algorithm>

namespace pulltab {

const std::string& base_program_text() {
  static const std::string text = R"(-- bits and naturals with a partial operation and a coin
data Bit = 0 | 1
data Nat = z | s/1

flip 0 = 1
flip 1 = 0
notb 0 = 1
notb 1 = 0
andb 0 y = 0
andb 1 y = y
coin = 0 ? 1

add z y = y
add (s x) y = s (add x y)
dbl z = z
dbl (s x) = s (s (dbl x))
half z = z
half (s z) = z
half (s (s x)) = s (half x)
pred (s x) = x
)";
  return text;
}

namespace {

struct GraphGen {
  const Program& p;
  Allocator& alloc;
  std::mt19937_64& rng;
  const GraphGenOptions& opts;

  Graph g;
  std::vector<NodeId> pool;                 // finished nodes, reusable shares
  std::vector<ChoiceId> issued_choice_ids;  // for duplicate-id decoration
  int choices_made = 0;

  // Fixed symbol menus keep generation deterministic across platforms.
  std::vector<SymbolPtr> nullary_ctors, other_ctors, operations;

  GraphGen(const Program& prog, Allocator& a, std::mt19937_64& r, const GraphGenOptions& o)
      : p(prog), alloc(a), rng(r), opts(o) {
    for (const SymbolPtr& sym : prog.signature().all()) {
      if (sym->kind == SymbolKind::Constructor) {
        (sym->arity == 0 ? nullary_ctors : other_ctors).push_back(sym);
      } else if (sym->kind == SymbolKind::Operation) {
        if (!prog.rules_of(sym->name).empty()) operations.push_back(sym);
      }
    }
  }

  bool coin_flip(double prob) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < prob;
  }

  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
  }

  NodeId fresh(Node node) {
    NodeId id = alloc.fresh_node();
    g.put(id, std::move(node));
    pool.push_back(id);
    return id;
  }

  NodeId gen(int depth) {
    if (!pool.empty() && coin_flip(opts.share_p)) return pick(pool);
    if (depth > 0 && choices_made < opts.max_choices && coin_flip(opts.choice_p)) {
      ++choices_made;
      Node n;
      n.symbol = p.signature().choice_symbol();
      n.succs = {gen(depth - 1), gen(depth - 1)};
      if (!issued_choice_ids.empty() && coin_flip(opts.dup_choice_id_p)) {
        n.choice = pick(issued_choice_ids);
      } else {
        n.choice = alloc.fresh_choice();
        issued_choice_ids.push_back(*n.choice);
      }
      return fresh(std::move(n));
    }
    if (depth > 0 && opts.allow_ops && !operations.empty() && coin_flip(opts.op_p)) {
      Node n;
      n.symbol = pick(operations);
      for (int i = 0; i < n.symbol->arity; ++i) n.succs.push_back(gen(depth - 1));
      return fresh(std::move(n));
    }
    if (depth > 0 && !other_ctors.empty() && coin_flip(0.5)) {
      Node n;
      n.symbol = pick(other_ctors);
      for (int i = 0; i < n.symbol->arity; ++i) n.succs.push_back(gen(depth - 1));
      return fresh(std::move(n));
    }
    Node n;
    n.symbol = pick(nullary_ctors);
    return fresh(std::move(n));
  }

  Graph run() {
    g.set_root(gen(opts.max_depth));
    Graph out = subgraph(g, g.root());
    validate(out, /*require_ground=*/true);
    return out;
  }
};

}  // namespace

Graph random_graph(const Program& p, Allocator& alloc, std::mt19937_64& rng,
                   const GraphGenOptions& opts) {
  GraphGen gen{p, alloc, rng, opts};
  return gen.run();
}

namespace {

// Random terminating programs: a single data group `data V = va | vb | vu/1`
// and stratified operations g0, g1, ... where the rules of g_i call only
// g_j with j > i.
struct ProgramGen {
  Allocator& alloc;
  std::mt19937_64& rng;
  const ProgramGenOptions& opts;

  ParsedProgram parsed;
  SymbolPtr va, vb, vu;
  std::vector<SymbolPtr> ops;

  ProgramGen(Allocator& a, std::mt19937_64& r, const ProgramGenOptions& o)
      : alloc(a), rng(r), opts(o) {
    va = parsed.signature.declare("va", SymbolKind::Constructor, 0);
    vb = parsed.signature.declare("vb", SymbolKind::Constructor, 0);
    vu = parsed.signature.declare("vu", SymbolKind::Constructor, 1);
    parsed.signature.add_group("V", {"va", "vb", "vu"});
  }

  bool coin_flip(double prob) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < prob;
  }

  std::size_t below(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  }

  // Random rhs term into `space`; may reference `vars` and operations with
  // index > level.
  NodeId rhs_term(Graph& space, const std::vector<NodeId>& vars, std::size_t level,
                  int depth) {
    double r = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    if (depth <= 0 || r < 0.35) {
      if (!vars.empty() && coin_flip(0.5)) return vars[below(vars.size())];
      Node n;
      n.symbol = coin_flip(0.5) ? va : vb;
      NodeId id = alloc.fresh_node();
      space.put(id, std::move(n));
      return id;
    }
    if (r < 0.5) {  // choice
      Node n;
      n.symbol = parsed.signature.choice_symbol();
      n.succs = {rhs_term(space, vars, level, depth - 1),
                 rhs_term(space, vars, level, depth - 1)};
      n.choice = alloc.fresh_choice();
      NodeId id = alloc.fresh_node();
      space.put(id, std::move(n));
      return id;
    }
    if (r < 0.7 && level + 1 < ops.size()) {  // call a later operation
      std::size_t callee = level + 1 + below(ops.size() - level - 1);
      Node n;
      n.symbol = ops[callee];
      for (int i = 0; i < n.symbol->arity; ++i)
        n.succs.push_back(rhs_term(space, vars, callee, depth - 1));
      NodeId id = alloc.fresh_node();
      space.put(id, std::move(n));
      return id;
    }
    Node n;  // unary constructor keeps terms interesting
    n.symbol = vu;
    n.succs = {rhs_term(space, vars, level, depth - 1)};
    NodeId id = alloc.fresh_node();
    space.put(id, std::move(n));
    return id;
  }

  void make_rules(std::size_t level) {
    SymbolPtr op = ops[level];
    // Dispatch on the first argument over a nonempty subset of {va,vb,vu};
    // missing constructors become exempt cases (possible failures).
    std::vector<SymbolPtr> cases = {va, vb, vu};
    std::shuffle(cases.begin(), cases.end(), rng);
    std::size_t keep = 1 + below(cases.size());
    cases.resize(keep);
    int index = 0;
    for (const SymbolPtr& c : cases) {
      Rule rule;
      rule.op = op;
      rule.index = index++;
      rule.origin = "generated";

      Graph lhs;
      std::vector<NodeId> vars;
      NodeId root = alloc.fresh_node();
      Node head;
      head.symbol = op;
      // First argument: the dispatch pattern.
      NodeId parg = alloc.fresh_node();
      Node pat;
      pat.symbol = c;
      for (int i = 0; i < c->arity; ++i) {
        NodeId v = alloc.fresh_node();
        Node var;
        var.var = "x" + std::to_string(i);
        lhs.put(v, std::move(var));
        pat.succs.push_back(v);
      }
      lhs.put(parg, std::move(pat));
      head.succs.push_back(parg);
      for (int i = 1; i < op->arity; ++i) {
        NodeId v = alloc.fresh_node();
        Node var;
        var.var = "y" + std::to_string(i);
        lhs.put(v, std::move(var));
        head.succs.push_back(v);
      }
      lhs.put(root, std::move(head));
      lhs.set_root(root);
      rule.lhs = lhs;
      rule.display = op->name + " " + c->name + (op->arity > 1 ? " y1" : "") + " = ...";

      // Rhs may use the pattern variables, as rhs var nodes by name.
      Graph space;
      std::vector<NodeId> rhs_vars;
      for (const auto& [id, node] : lhs.nodes()) {
        if (!node.is_var()) continue;
        NodeId v = alloc.fresh_node();
        Node var;
        var.var = node.var;
        space.put(v, std::move(var));
        rhs_vars.push_back(v);
      }
      NodeId rhs_root = rhs_term(space, rhs_vars, level, opts.max_rhs_depth);
      space.set_root(rhs_root);
      rule.rhs = subgraph(space, rhs_root);
      validate(rule.rhs);
      parsed.rules.push_back(std::make_shared<Rule>(std::move(rule)));
    }
  }

  std::pair<Program, Graph> run() {
    int n = std::max(1, opts.operations);
    for (int i = 0; i < n; ++i) {
      int arity = coin_flip(0.4) ? 2 : 1;
      ops.push_back(parsed.signature.declare("g" + std::to_string(i),
                                             SymbolKind::Operation, arity));
    }
    for (std::size_t i = 0; i < ops.size(); ++i) make_rules(i);
    Program prog = Program::compile(std::move(parsed), alloc);

    // Ground entry with sharing, biased toward calling early operations.
    // Top-level decorations must be one-to-one.
    GraphGenOptions gopts;
    gopts.max_depth = opts.entry_depth;
    gopts.choice_p = 0.15;
    gopts.share_p = 0.3;
    gopts.op_p = 0.5;
    gopts.dup_choice_id_p = 0.0;
    std::mt19937_64 sub(rng());
    Graph entry = random_graph(prog, alloc, sub, gopts);
    return {std::move(prog), std::move(entry)};
  }
};

}  // namespace

std::pair<Program, Graph> random_program(Allocator& alloc, std::mt19937_64& rng,
                                         const ProgramGenOptions& opts) {
  ProgramGen gen{alloc, rng, opts};
  return gen.run();
}

}  // namespace pulltab
