#pragma once

// The represented set of a decorated graph: every consistent settlement of
// its reachable choices, obtained by reducing outermost choices first and
// skipping choices erased along the way. Members may still contain
// operation redexes; only choice steps are made.

#include <vector>

#include "pulltab/graph.hpp"
#include "pulltab/program.hpp"
#include "pulltab/rewrite.hpp"

namespace pulltab {

// One alternative per reachable identifier; at most 2^k settlements for k
// distinct identifiers. Results are deduplicated modulo renaming and
// ordered by canonical form. Throws when k is unreasonably large.
std::vector<Graph> represented_set(const Graph& g);

// Applies the pull-tab at (target, source_index) and checks that the
// represented set is unchanged, as exact set equality modulo renaming.
bool check_pulltab_invariance(const Graph& g, NodeId target, int source_index,
                              Allocator& alloc);

enum class CheckStatus { Holds, Inconclusive, Fails };

// For a non-choice rewrite step g -> g': (1) every member of R_g rewrites
// to some member of R_g' and (2) every member of R_g' is reached from some
// member of R_g. Searches are breadth-first over all applicable steps up to
// `bound` step depth (and a state cap); running into either limit makes the
// claim inconclusive rather than failed.
CheckStatus check_nonchoice_invariance(const Program& p, const Graph& g,
                                       const StepPlan& step, Allocator& alloc,
                                       int bound = 50, std::size_t state_cap = 20000);

}  // namespace pulltab
