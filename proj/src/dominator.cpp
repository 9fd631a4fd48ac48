#include "pulltab/dominator.hpp"

#include <algorithm>
#include <map>

namespace pulltab {

NodeId immediate_dominator(const Graph& g, NodeId n) {
  if (n == g.root()) throw GraphError("the root has no proper dominator");
  if (!g.contains(n)) throw GraphError("node " + to_string(n) + " not in graph");

  // Reverse postorder from the root.
  std::vector<NodeId> postorder;
  {
    std::vector<std::pair<NodeId, std::size_t>> stack{{g.root(), 0}};
    std::set<NodeId> pushed{g.root()};
    while (!stack.empty()) {
      auto& [id, idx] = stack.back();
      const Node& node = g.node(id);
      if (idx >= node.succs.size()) {
        postorder.push_back(id);
        stack.pop_back();
        continue;
      }
      NodeId child = node.succs[idx++];
      if (pushed.count(child)) continue;
      pushed.insert(child);
      stack.emplace_back(child, 0);
    }
  }
  std::vector<NodeId> rpo(postorder.rbegin(), postorder.rend());
  std::map<NodeId, std::size_t> rpo_index;
  for (std::size_t i = 0; i < rpo.size(); ++i) rpo_index[rpo[i]] = i;

  std::map<NodeId, std::vector<NodeId>> preds = predecessors(g);

  // Cooper-Harvey-Kennedy: intersect along idom chains. One pass suffices
  // on a DAG processed in reverse postorder, but iterate to be safe.
  std::map<NodeId, NodeId> idom;
  idom[g.root()] = g.root();
  auto intersect = [&](NodeId a, NodeId b) {
    while (a != b) {
      while (rpo_index.at(a) > rpo_index.at(b)) a = idom.at(a);
      while (rpo_index.at(b) > rpo_index.at(a)) b = idom.at(b);
    }
    return a;
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (NodeId v : rpo) {
      if (v == g.root()) continue;
      NodeId best{};
      bool have = false;
      for (NodeId p : preds.at(v)) {
        if (!idom.count(p)) continue;
        best = have ? intersect(best, p) : p;
        have = true;
      }
      if (!have) continue;
      auto it = idom.find(v);
      if (it == idom.end() || it->second != best) {
        idom[v] = best;
        changed = true;
      }
    }
  }
  auto it = idom.find(n);
  if (it == idom.end()) throw GraphError("node " + to_string(n) + " unreachable from root");
  return it->second;
}

}  // namespace pulltab
