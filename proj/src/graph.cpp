#include "pulltab/graph.hpp"

#include <algorithm>
#include <sstream>

namespace pulltab {

std::string to_string(NodeId n) {
  return "n" + std::to_string(n.value);
}

std::string to_string(ChoiceId c) {
  return std::to_string(c.value);
}

std::string Node::label_key() const {
  if (is_var()) return "$" + var;
  return symbol->name + "/" + std::to_string(symbol->arity);
}

Signature::Signature() {
  choice_ = std::make_shared<Symbol>(Symbol{"?", SymbolKind::Choice, 2});
  pair_ = std::make_shared<Symbol>(Symbol{"(,)", SymbolKind::Constructor, 2});
  symbols_["?"] = choice_;
  symbols_["(,)"] = pair_;
}

SymbolPtr Signature::declare(const std::string& name, SymbolKind kind, int arity) {
  auto it = symbols_.find(name);
  if (it != symbols_.end()) {
    if (it->second->kind != kind || it->second->arity != arity)
      throw ParseError("symbol '" + name + "' redeclared with different kind or arity");
    return it->second;
  }
  auto sym = std::make_shared<Symbol>(Symbol{name, kind, arity});
  symbols_[name] = sym;
  return sym;
}

SymbolPtr Signature::lookup(const std::string& name) const {
  auto it = symbols_.find(name);
  return it == symbols_.end() ? nullptr : it->second;
}

SymbolPtr Signature::ensure(const std::string& name, int arity) {
  if (auto sym = lookup(name)) {
    if (sym->arity != arity)
      throw ParseError("arity mismatch for '" + name + "': declared " +
                       std::to_string(sym->arity) + ", used with " + std::to_string(arity));
    return sym;
  }
  return declare(name, SymbolKind::Constructor, arity);
}

void Signature::add_group(const std::string& group, const std::vector<std::string>& members) {
  groups_[group] = members;
  for (const auto& m : members) ctor_group_[m] = group;
}

const std::vector<std::string>* Signature::group_of(const std::string& ctor) const {
  auto it = ctor_group_.find(ctor);
  if (it == ctor_group_.end()) return nullptr;
  auto g = groups_.find(it->second);
  return g == groups_.end() ? nullptr : &g->second;
}

std::vector<SymbolPtr> Signature::all() const {
  std::vector<SymbolPtr> out;
  out.reserve(symbols_.size());
  for (const auto& [_, sym] : symbols_) out.push_back(sym);
  return out;
}

const Node& Graph::node(NodeId n) const {
  auto it = nodes_.find(n);
  if (it == nodes_.end())
    throw GraphError("node " + to_string(n) + " not in graph");
  return it->second;
}

std::vector<NodeId> preorder(const Graph& g) {
  std::vector<NodeId> order;
  std::set<NodeId> done;      // fully expanded
  std::set<NodeId> on_stack;  // being expanded; a revisit here is a cycle
  // Explicit stack of (node, next-successor-index) frames.
  std::vector<std::pair<NodeId, std::size_t>> stack;
  if (g.size() == 0) return order;
  stack.emplace_back(g.root(), 0);
  on_stack.insert(g.root());
  order.push_back(g.root());
  while (!stack.empty()) {
    auto& [id, idx] = stack.back();
    const Node& n = g.node(id);
    if (idx >= n.succs.size()) {
      on_stack.erase(id);
      done.insert(id);
      stack.pop_back();
      continue;
    }
    NodeId child = n.succs[idx++];
    if (on_stack.count(child))
      throw GraphError("cycle detected through node " + to_string(child));
    if (done.count(child)) continue;
    order.push_back(child);
    stack.emplace_back(child, 0);
    on_stack.insert(child);
  }
  return order;
}

void validate(const Graph& g, bool require_ground) {
  if (g.size() == 0) throw GraphError("empty graph");
  if (!g.contains(g.root())) throw GraphError("root not in node set");
  std::map<std::string, NodeId> var_nodes;
  for (const auto& [id, node] : g.nodes()) {
    int arity = node.is_var() ? 0 : node.symbol->arity;
    if (static_cast<int>(node.succs.size()) != arity)
      throw GraphError("node " + to_string(id) + " (" + node.label_key() +
                       ") has " + std::to_string(node.succs.size()) + " successors");
    for (NodeId s : node.succs)
      if (!g.contains(s))
        throw GraphError("dangling successor " + to_string(s) + " of " + to_string(id));
    if (node.is_var()) {
      if (require_ground)
        throw GraphError("variable '" + node.var + "' in ground graph");
      auto [it, fresh] = var_nodes.emplace(node.var, id);
      if (!fresh)
        throw GraphError("variable '" + node.var + "' labels two nodes");
    }
    if (node.is_choice() != node.choice.has_value())
      throw GraphError("choice decoration mismatch on node " + to_string(id));
  }
  // preorder throws on cycles and visits exactly the reachable nodes.
  std::vector<NodeId> order = preorder(g);
  if (order.size() != g.size())
    throw GraphError("unreachable nodes present (" + std::to_string(g.size()) +
                     " stored, " + std::to_string(order.size()) + " reachable)");
}

std::set<NodeId> reachable_from(const Graph& g, NodeId start) {
  std::set<NodeId> seen;
  std::vector<NodeId> todo{start};
  while (!todo.empty()) {
    NodeId id = todo.back();
    todo.pop_back();
    if (!seen.insert(id).second) continue;
    for (NodeId s : g.node(id).succs) todo.push_back(s);
  }
  return seen;
}

std::map<NodeId, std::vector<NodeId>> predecessors(const Graph& g) {
  std::map<NodeId, std::vector<NodeId>> preds;
  for (const auto& [id, node] : g.nodes()) {
    preds.try_emplace(id);
    for (NodeId s : node.succs) preds[s].push_back(id);
  }
  return preds;
}

Graph subgraph(const Graph& g, NodeId n) {
  if (!g.contains(n)) throw GraphError("subgraph root " + to_string(n) + " not in graph");
  Graph out;
  out.set_root(n);
  for (NodeId id : reachable_from(g, n)) out.put(id, g.node(id));
  return out;
}

Graph replace_at(const Graph& g, NodeId at, const Graph& h) {
  if (!g.contains(at)) throw GraphError("replacement target " + to_string(at) + " not in graph");
  // Merge h over g, checking that shared ids agree.
  Graph redirected;
  redirected.set_root(at == g.root() ? h.root() : g.root());
  for (const auto& [id, node] : g.nodes()) redirected.put(id, node);
  for (const auto& [id, node] : h.nodes()) {
    if (g.contains(id)) {
      const Node& old = g.node(id);
      if (old.label_key() != node.label_key() || old.succs != node.succs ||
          old.choice != node.choice)
        throw GraphError("replacement disagrees with graph on shared node " + to_string(id));
    }
    redirected.put(id, node);
  }
  // Redirect every edge into `at` to h's root, then drop what became
  // unreachable.
  std::vector<std::pair<NodeId, Node>> rewritten;
  for (const auto& [id, node] : redirected.nodes()) {
    Node copy = node;
    for (NodeId& s : copy.succs)
      if (s == at) s = h.root();
    rewritten.emplace_back(id, std::move(copy));
  }
  for (auto& [id, node] : rewritten) redirected.put(id, std::move(node));
  std::set<NodeId> keep = reachable_from(redirected, redirected.root());
  Graph out;
  out.set_root(redirected.root());
  for (NodeId id : keep) out.put(id, redirected.node(id));
  return out;
}

Graph clone_graph(const Graph& g, Allocator& alloc, std::map<NodeId, NodeId>* mapping) {
  std::map<NodeId, NodeId> map;
  for (const auto& [id, _] : g.nodes()) map[id] = alloc.fresh_node();
  Graph out;
  out.set_root(map.at(g.root()));
  for (const auto& [id, node] : g.nodes()) {
    Node copy = node;
    for (NodeId& s : copy.succs) s = map.at(s);
    out.put(map.at(id), std::move(copy));
  }
  if (mapping) *mapping = std::move(map);
  return out;
}

NodeId node_at_path(const Graph& g, NodeId from, const std::vector<int>& path) {
  NodeId cur = from;
  for (int i : path) {
    const Node& n = g.node(cur);
    if (i < 0 || i >= static_cast<int>(n.succs.size()))
      throw GraphError("path index " + std::to_string(i) + " out of range at " + to_string(cur));
    cur = n.succs[static_cast<std::size_t>(i)];
  }
  return cur;
}

}  // namespace pulltab
