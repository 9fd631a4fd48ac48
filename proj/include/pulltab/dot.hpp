#pragma once

#include <string>

#include "pulltab/graph.hpp"

namespace pulltab {

// GraphViz digraph of g. Nodes are numbered by preorder ordinal, choice
// nodes are annotated with their identifier, and successor order is encoded
// by edge labels 1..k.
std::string dot_export(const Graph& g);

}  // namespace pulltab
