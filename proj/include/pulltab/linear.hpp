#pragma once

// Linear notation for graphs: `expr ::= [name ':'] symbol ['(' expr {',' expr} ')']`.
// A node name, once bound, may appear bare to denote sharing. Infix symbols
// are written prefix, so the pair constructor is applied as `(,)(a, b)`.
// Choice nodes may pin an identifier with a `?_tok` suffix; equal tokens in
// one parse share one identifier. Names and pins are local to a single parse.

#include <string>

#include "pulltab/graph.hpp"

namespace pulltab {

struct ParseOptions {
  // Auto-declare unknown symbols as constructors (ad-hoc graphs); when
  // false, unknown symbols are errors.
  bool allow_undeclared = true;
  // Reject variable-style graphs (top-level computation states are ground).
  bool require_ground = false;
};

Graph parse_linear(const std::string& text, Signature& sig, Allocator& alloc,
                   const ParseOptions& opts = {});

// Inverse of parse_linear up to renaming of nodes and choice identifiers.
// Names are emitted only for nodes with in-degree >= 2, as n<k> where k is
// the node's preorder ordinal; choice nodes print their identifier's
// first-occurrence ordinal as a `?_k` suffix.
std::string print_linear(const Graph& g);

}  // namespace pulltab
