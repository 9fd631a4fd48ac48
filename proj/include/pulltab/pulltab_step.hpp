#pragma once

#include "pulltab/graph.hpp"

namespace pulltab {

// The pull-tab transformation. `target` must not be choice-labeled and its
// source_index-th successor must be a choice with alternatives t1, t2. Two
// fresh copies of the target are built, one per alternative (all other
// successors shared), and a fresh choice node carrying the source's
// identifier replaces the target. Exactly three fresh nodes are allocated
// and no fresh choice identifier is created.
Graph pull_tab(const Graph& g, NodeId target, int source_index, Allocator& alloc);

}  // namespace pulltab
