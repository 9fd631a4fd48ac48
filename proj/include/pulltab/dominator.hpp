#pragma once

#include "pulltab/graph.hpp"

namespace pulltab {

// Least proper dominator of n in the rooted DAG: every root-to-n path
// contains it, and it dominates no other proper dominator of n. Iterative
// dataflow over reverse postorder. Throws GraphError when n is the root or
// unreachable.
NodeId immediate_dominator(const Graph& g, NodeId n);

}  // namespace pulltab
