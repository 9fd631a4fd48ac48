#pragma once

// Canonical forms: two graphs get the same canonical key iff they are equal
// modulo a renaming of nodes and a bijective renaming of choice identifiers.

#include <string>

#include "pulltab/graph.hpp"

namespace pulltab {

// Depth-first traversal from the root in successor order, numbering nodes
// at first visit; one `ordinal:label(children)[@choice-ordinal]` entry per
// node. Deterministic; throws GraphError on cycles.
std::string canonicalize(const Graph& g);

bool graphs_equal(const Graph& a, const Graph& b);

}  // namespace pulltab
