#include "pulltab/rewrite.hpp"

#include <sstream>

namespace pulltab {

std::string step_to_string(const Step& s) {
  std::ostringstream out;
  out << (s.kind == StepKind::Rewrite ? "rewrite" : "pulltab");
  out << " @" << to_string(s.node);
  if (s.rule) {
    out << " [";
    if (s.rule->is_choice_rule())
      out << "?/C" << s.rule->choice_alt;
    else
      out << s.rule->op->name << "." << s.rule->index;
    out << "]";
  }
  if (s.choice) out << " id=" << to_string(*s.choice);
  return out.str();
}

namespace {

bool match_walk(const Graph& g, NodeId gn, const Graph& pat, NodeId pn,
                std::map<std::string, NodeId>& binding) {
  const Node& p = pat.node(pn);
  if (p.is_var()) {
    auto [it, fresh] = binding.emplace(p.var, gn);
    return fresh || it->second == gn;
  }
  const Node& n = g.node(gn);
  if (n.is_var()) return false;
  if (n.symbol->name != p.symbol->name) return false;
  for (std::size_t i = 0; i < p.succs.size(); ++i)
    if (!match_walk(g, n.succs[i], pat, p.succs[i], binding)) return false;
  return true;
}

}  // namespace

std::optional<std::map<std::string, NodeId>> match_rule(const Graph& g, NodeId at,
                                                        const Rule& rule) {
  std::map<std::string, NodeId> binding;
  if (!match_walk(g, at, rule.lhs, rule.lhs.root(), binding)) return std::nullopt;
  return binding;
}

Graph rewrite_step(const Graph& g, NodeId at, const Rule& rule, Allocator& alloc) {
  auto binding = match_rule(g, at, rule);
  if (!binding)
    throw Error("rule '" + rule.display + "' does not match at " + to_string(at) +
                " (dispatch must precede rewriting)");

  const Graph& rhs = rule.rhs;
  const Node& rhs_root_node = rhs.node(rhs.root());
  // A bare-variable rhs replaces the redex with the matched subexpression.
  if (rhs_root_node.is_var())
    return replace_at(g, at, subgraph(g, binding->at(rhs_root_node.var)));

  // Instantiate: fresh ids for constructed nodes, bindings for variables.
  std::map<NodeId, NodeId> inst;  // rhs template node -> instance node
  for (const auto& [id, node] : rhs.nodes())
    inst[id] = node.is_var() ? binding->at(node.var) : alloc.fresh_node();

  Graph h;
  h.set_root(inst.at(rhs.root()));
  for (const auto& [id, node] : rhs.nodes()) {
    if (node.is_var()) continue;  // shared from g
    Node copy;
    copy.symbol = node.symbol;
    copy.succs = node.succs;
    for (NodeId& s : copy.succs) s = inst.at(s);
    if (node.is_choice()) copy.choice = alloc.fresh_choice();
    h.put(inst.at(id), std::move(copy));
  }
  // Matched argument nodes are shared with g, not copied; replace_at merges
  // over g, so only the constructed nodes need to be present in h.
  return replace_at(g, at, h);
}

Graph reduce_choice(const Graph& g, NodeId choice_node, int alt) {
  const Node& n = g.node(choice_node);
  if (!n.is_choice()) throw Error("node " + to_string(choice_node) + " is not a choice");
  if (alt != 1 && alt != 2) throw Error("choice alternative must be 1 or 2");
  return replace_at(g, choice_node, subgraph(g, n.succs[static_cast<std::size_t>(alt - 1)]));
}

HeadResult head_step(const Program& p, const Graph& g, NodeId focus) {
  const Node& n = g.node(focus);
  if (n.is_var()) throw Error("variable node in evaluated expression");
  if (n.is_ctor()) return {HeadResult::Kind::Value, focus, std::nullopt};
  if (n.is_choice()) return {HeadResult::Kind::ChoiceAtRoot, focus, std::nullopt};

  const DefTree* t = p.tree(n.symbol->name);
  if (!t)  // no rules at all
    return {HeadResult::Kind::Failure, focus, std::nullopt};
  for (;;) {
    switch (t->kind) {
      case DefTree::Kind::Leaf: {
        StepPlan plan;
        plan.kind = StepKind::Rewrite;
        plan.at = focus;
        plan.rule = t->rule;
        return {HeadResult::Kind::Needs, focus, plan};
      }
      case DefTree::Kind::Exempt:
        return {HeadResult::Kind::Failure, focus, std::nullopt};
      case DefTree::Kind::Branch: {
        NodeId arg = node_at_path(g, focus, t->position);
        const Node& an = g.node(arg);
        if (an.is_var()) throw Error("variable node in evaluated expression");
        if (an.is_op()) return head_step(p, g, arg);  // needed subcomputation
        if (an.is_choice()) {
          // Pull the choice above its predecessor on the dispatch path.
          std::vector<int> parent_path(t->position.begin(), t->position.end() - 1);
          StepPlan plan;
          plan.kind = StepKind::PullTab;
          plan.at = node_at_path(g, focus, parent_path);
          plan.source_index = t->position.back();
          plan.source = arg;
          return {HeadResult::Kind::Needs, focus, plan};
        }
        auto it = t->children.find(an.symbol->name);
        if (it == t->children.end())
          return {HeadResult::Kind::Failure, focus, std::nullopt};
        t = it->second.get();
        break;
      }
    }
  }
}

std::optional<Focus> next_focus(const Graph& g) {
  std::set<NodeId> visited;
  std::vector<std::tuple<NodeId, NodeId, int>> stack;  // node, parent, index
  stack.emplace_back(g.root(), g.root(), -1);
  while (!stack.empty()) {
    auto [id, parent, index] = stack.back();
    stack.pop_back();
    if (!visited.insert(id).second) continue;
    const Node& n = g.node(id);
    if (n.is_op() || n.is_choice()) {
      Focus f;
      f.node = id;
      f.parent = parent;
      f.index = index;
      f.at_root = (id == g.root());
      return f;
    }
    for (int i = static_cast<int>(n.succs.size()) - 1; i >= 0; --i)
      stack.emplace_back(n.succs[static_cast<std::size_t>(i)], id, i);
  }
  return std::nullopt;
}

bool is_value(const Graph& g) {
  for (const auto& [id, node] : g.nodes())
    if (!node.is_ctor()) return false;
  return true;
}

std::vector<StepPlan> applicable_steps(const Program& p, const Graph& g) {
  std::vector<StepPlan> out;
  for (NodeId id : preorder(g)) {
    const Node& n = g.node(id);
    if (n.is_choice()) {
      for (int alt = 1; alt <= 2; ++alt) {
        StepPlan plan;
        plan.kind = StepKind::Rewrite;
        plan.at = id;
        plan.rule = p.choice_rule(alt);
        out.push_back(plan);
      }
      continue;
    }
    if (!n.is_op()) continue;
    // Local dispatch only: the step exists iff the tree walk ends in a
    // leaf without leaving this node.
    const DefTree* t = p.tree(n.symbol->name);
    while (t && t->kind == DefTree::Kind::Branch) {
      NodeId arg = node_at_path(g, id, t->position);
      const Node& an = g.node(arg);
      if (!an.is_ctor()) {
        t = nullptr;
        break;
      }
      auto it = t->children.find(an.symbol->name);
      t = it == t->children.end() ? nullptr : it->second.get();
    }
    if (t && t->kind == DefTree::Kind::Leaf) {
      StepPlan plan;
      plan.kind = StepKind::Rewrite;
      plan.at = id;
      plan.rule = t->rule;
      out.push_back(plan);
    }
  }
  return out;
}

}  // namespace pulltab
