#include "pulltab/dot.hpp"

#include <map>
#include <sstream>

namespace pulltab {
namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string dot_export(const Graph& g) {
  std::vector<NodeId> order = preorder(g);
  std::map<NodeId, std::size_t> ordinal;
  for (std::size_t i = 0; i < order.size(); ++i) ordinal[order[i]] = i;

  std::ostringstream out;
  out << "digraph g {\n";
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Node& n = g.node(order[i]);
    std::string label;
    if (n.is_var())
      label = n.var;
    else if (n.is_choice())
      label = "? [" + to_string(*n.choice) + "]";
    else
      label = n.symbol->name;
    out << "  v" << i << " [label=" << quote(label) << "];\n";
  }
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Node& n = g.node(order[i]);
    for (std::size_t k = 0; k < n.succs.size(); ++k)
      out << "  v" << i << " -> v" << ordinal.at(n.succs[k]) << " [label=" << quote(std::to_string(k + 1)) << "];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace pulltab
