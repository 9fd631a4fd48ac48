#include "pulltab/pulltab_step.hpp"

namespace pulltab {

Graph pull_tab(const Graph& g, NodeId target, int source_index, Allocator& alloc) {
  const Node& t = g.node(target);
  if (t.is_choice())
    throw GraphError("pull-tab target " + to_string(target) + " is a choice");
  if (source_index < 0 || source_index >= static_cast<int>(t.succs.size()))
    throw GraphError("pull-tab source index " + std::to_string(source_index) +
                     " out of range");
  NodeId source = t.succs[static_cast<std::size_t>(source_index)];
  const Node& s = g.node(source);
  if (!s.is_choice())
    throw GraphError("pull-tab source " + to_string(source) + " is not a choice");

  Graph h;
  NodeId copies[2];
  for (int j = 0; j < 2; ++j) {
    Node c;
    c.symbol = t.symbol;
    c.succs = t.succs;
    c.succs[static_cast<std::size_t>(source_index)] = s.succs[static_cast<std::size_t>(j)];
    copies[j] = alloc.fresh_node();
    h.put(copies[j], std::move(c));
  }
  Node hoisted;
  hoisted.symbol = s.symbol;
  hoisted.succs = {copies[0], copies[1]};
  hoisted.choice = s.choice;  // the identifier moves with its source
  NodeId hoisted_id = alloc.fresh_node();
  h.put(hoisted_id, std::move(hoisted));
  h.set_root(hoisted_id);
  return replace_at(g, target, h);
}

}  // namespace pulltab
