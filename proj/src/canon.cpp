#include "pulltab/canon.hpp"

#include <map>
#include <sstream>

namespace pulltab {

std::string canonicalize(const Graph& g) {
  std::vector<NodeId> order = preorder(g);
  std::map<NodeId, std::size_t> ordinal;
  for (std::size_t i = 0; i < order.size(); ++i) ordinal[order[i]] = i;

  std::map<ChoiceId, std::size_t> choice_ordinal;
  std::ostringstream out;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Node& n = g.node(order[i]);
    if (i) out << ";";
    out << i << ":" << n.label_key();
    if (!n.succs.empty()) {
      out << "(";
      for (std::size_t k = 0; k < n.succs.size(); ++k) {
        if (k) out << ",";
        out << ordinal.at(n.succs[k]);
      }
      out << ")";
    }
    if (n.choice) {
      auto it = choice_ordinal.find(*n.choice);
      if (it == choice_ordinal.end())
        it = choice_ordinal.emplace(*n.choice, choice_ordinal.size()).first;
      out << "@" << it->second;
    }
  }
  return out.str();
}

bool graphs_equal(const Graph& a, const Graph& b) {
  return canonicalize(a) == canonicalize(b);
}

}  // namespace pulltab
