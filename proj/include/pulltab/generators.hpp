#pragma once

// Seeded random graphs and programs for the property suites and the
// verification CLI. Everything here is deterministic for a fixed seed.

#include <random>
#include <utility>

#include "pulltab/graph.hpp"
#include "pulltab/program.hpp"

namespace pulltab {

// A small LOIS program over bits and naturals used as the default universe
// for random graphs: total and partial operations, structural recursion,
// and a non-deterministic coin.
const std::string& base_program_text();

struct GraphGenOptions {
  int max_depth = 5;
  double share_p = 0.25;         // reuse a finished node (builds sharing)
  double choice_p = 0.2;         // label a position with `?`
  double op_p = 0.35;            // label a position with an operation
  int max_choices = 4;
  double dup_choice_id_p = 0.25; // give a new choice an already-used id
  bool allow_ops = true;
};

// A well-formed ground graph over the program's signature.
Graph random_graph(const Program& p, Allocator& alloc, std::mt19937_64& rng,
                   const GraphGenOptions& opts = {});

struct ProgramGenOptions {
  int operations = 4;     // beyond the generated entry expression
  int max_rhs_depth = 3;
  int entry_depth = 4;
};

// A random terminating LOIS program (operations call only later operations,
// so there is no recursion) plus a ground entry expression with sharing.
std::pair<Program, Graph> random_program(Allocator& alloc, std::mt19937_64& rng,
                                         const ProgramGenOptions& opts = {});

}  // namespace pulltab
