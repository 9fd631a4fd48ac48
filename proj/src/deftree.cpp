#include "pulltab/deftree.hpp"

#include <algorithm>
#include <sstream>

#include "pulltab/linear.hpp"

namespace pulltab {
namespace {

// Structural equality modulo a bijective renaming of variables. Both sides
// are pattern trees.
bool variant_walk(const Graph& a, NodeId na, const Graph& b, NodeId nb,
                  std::map<std::string, std::string>& fwd,
                  std::map<std::string, std::string>& bwd) {
  const Node& x = a.node(na);
  const Node& y = b.node(nb);
  if (x.is_var() != y.is_var()) return false;
  if (x.is_var()) {
    auto f = fwd.find(x.var);
    auto g = bwd.find(y.var);
    if (f == fwd.end() && g == bwd.end()) {
      fwd[x.var] = y.var;
      bwd[y.var] = x.var;
      return true;
    }
    return f != fwd.end() && g != bwd.end() && f->second == y.var && g->second == x.var;
  }
  if (x.symbol->name != y.symbol->name) return false;
  for (std::size_t i = 0; i < x.succs.size(); ++i)
    if (!variant_walk(a, x.succs[i], b, y.succs[i], fwd, bwd)) return false;
  return true;
}

bool is_variant(const Graph& a, const Graph& b) {
  std::map<std::string, std::string> fwd, bwd;
  return variant_walk(a, a.root(), b, b.root(), fwd, bwd);
}

// Variable positions of a pattern tree, preorder (leftmost-outermost first).
void var_positions(const Graph& g, NodeId at, std::vector<int>& path,
                   std::vector<std::vector<int>>& out) {
  const Node& n = g.node(at);
  if (n.is_var()) {
    out.push_back(path);
    return;
  }
  for (int i = 0; i < static_cast<int>(n.succs.size()); ++i) {
    path.push_back(i);
    var_positions(g, n.succs[static_cast<std::size_t>(i)], path, out);
    path.pop_back();
  }
}

struct TreeBuilder {
  const SymbolPtr& op;
  const Signature& sig;
  Allocator& alloc;
  int next_var = 0;

  Graph fresh_var_graph() {
    Graph g;
    NodeId id = alloc.fresh_node();
    Node n;
    n.var = "_p" + std::to_string(next_var++);
    g.put(id, std::move(n));
    g.set_root(id);
    return g;
  }

  // The generic pattern op(x1, ..., xk).
  Graph generic_pattern() {
    Graph g;
    NodeId root = alloc.fresh_node();
    Node head;
    head.symbol = op;
    for (int i = 0; i < op->arity; ++i) {
      NodeId v = alloc.fresh_node();
      Node var;
      var.var = "_p" + std::to_string(next_var++);
      g.put(v, std::move(var));
      head.succs.push_back(v);
    }
    g.put(root, std::move(head));
    g.set_root(root);
    return g;
  }

  // Refine `pattern` at the variable position `path` with ctor(v1...vm).
  Graph refine(const Graph& pattern, const std::vector<int>& path, const SymbolPtr& ctor) {
    NodeId at = node_at_path(pattern, pattern.root(), path);
    Graph repl;
    NodeId root = alloc.fresh_node();
    Node head;
    head.symbol = ctor;
    for (int i = 0; i < ctor->arity; ++i) {
      NodeId v = alloc.fresh_node();
      Node var;
      var.var = "_p" + std::to_string(next_var++);
      repl.put(v, std::move(var));
      head.succs.push_back(v);
    }
    repl.put(root, std::move(head));
    repl.set_root(root);
    return replace_at(pattern, at, repl);
  }

  std::unique_ptr<DefTree> build(Graph pattern, const std::vector<RulePtr>& rules) {
    auto tree = std::make_unique<DefTree>();
    tree->pattern = pattern;
    if (rules.empty()) {
      tree->kind = DefTree::Kind::Exempt;
      return tree;
    }
    for (const RulePtr& r : rules) {
      if (is_variant(pattern, r->lhs)) {
        if (rules.size() > 1)
          throw NotInductivelySequentialError(
              op->name, "left-hand sides overlap (" + r->display + ")");
        tree->kind = DefTree::Kind::Leaf;
        tree->rule = r;
        return tree;
      }
    }
    std::vector<std::vector<int>> positions;
    std::vector<int> path;
    var_positions(pattern, pattern.root(), path, positions);
    // Leftmost position where every rule carries a constructor.
    const std::vector<int>* inductive = nullptr;
    for (const auto& p : positions) {
      bool all_ctor = true;
      for (const RulePtr& r : rules) {
        NodeId at = node_at_path(r->lhs, r->lhs.root(), p);
        if (!r->lhs.node(at).is_ctor()) {
          all_ctor = false;
          break;
        }
      }
      if (all_ctor) {
        inductive = &p;
        break;
      }
    }
    if (!inductive)
      throw NotInductivelySequentialError(op->name, "no inductive position for {" +
                                                        rule_list(rules) + "}");
    tree->kind = DefTree::Kind::Branch;
    tree->position = *inductive;

    std::map<std::string, std::vector<RulePtr>> by_ctor;
    for (const RulePtr& r : rules) {
      NodeId at = node_at_path(r->lhs, r->lhs.root(), *inductive);
      by_ctor[r->lhs.node(at).symbol->name].push_back(r);
    }
    // Whole data group when all observed constructors share one; the extra
    // members become exempt children.
    std::vector<std::string> cases;
    const std::vector<std::string>* group = sig.group_of(by_ctor.begin()->first);
    bool homogeneous = group != nullptr;
    if (group)
      for (const auto& [name, _] : by_ctor)
        homogeneous = homogeneous &&
                      std::find(group->begin(), group->end(), name) != group->end();
    if (homogeneous) {
      cases = *group;
    } else {
      for (const auto& [name, _] : by_ctor) cases.push_back(name);
    }
    for (const std::string& name : cases) {
      SymbolPtr ctor = sig.lookup(name);
      Graph refined = refine(pattern, *inductive, ctor);
      auto it = by_ctor.find(name);
      tree->children[name] =
          build(std::move(refined), it == by_ctor.end() ? std::vector<RulePtr>{} : it->second);
    }
    return tree;
  }

  static std::string rule_list(const std::vector<RulePtr>& rules) {
    std::string out;
    for (const RulePtr& r : rules) {
      if (!out.empty()) out += "; ";
      out += r->display;
    }
    return out;
  }
};

}  // namespace

std::unique_ptr<DefTree> build_tree(const SymbolPtr& op, const std::vector<RulePtr>& rules,
                                    const Signature& sig, Allocator& alloc) {
  for (const RulePtr& r : rules)
    if (r->op->name != op->name)
      throw Error("rule '" + r->display + "' does not belong to operation '" + op->name + "'");
  TreeBuilder b{op, sig, alloc};
  return b.build(b.generic_pattern(), rules);
}

void collect_leaves(const DefTree& t, std::vector<const DefTree*>& out) {
  switch (t.kind) {
    case DefTree::Kind::Leaf:
    case DefTree::Kind::Exempt:
      out.push_back(&t);
      break;
    case DefTree::Kind::Branch:
      for (const auto& [_, child] : t.children) collect_leaves(*child, out);
      break;
  }
}

std::string tree_to_string(const DefTree& t, int indent) {
  std::ostringstream out;
  std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  switch (t.kind) {
    case DefTree::Kind::Leaf:
      out << pad << "rule " << t.rule->display << "\n";
      break;
    case DefTree::Kind::Exempt:
      out << pad << "exempt " << print_linear(t.pattern) << "\n";
      break;
    case DefTree::Kind::Branch: {
      out << pad << "branch " << print_linear(t.pattern) << " at";
      for (int i : t.position) out << " " << (i + 1);
      out << "\n";
      for (const auto& [name, child] : t.children) {
        out << pad << " case " << name << ":\n" << tree_to_string(*child, indent + 1);
      }
      break;
    }
  }
  return out.str();
}

}  // namespace pulltab
