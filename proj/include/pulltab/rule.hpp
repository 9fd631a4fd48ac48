#pragma once

#include <memory>
#include <string>

#include "pulltab/graph.hpp"

namespace pulltab {

// A rewrite rule. Left-hand sides are rooted by the rule's operation with
// constructor/variable arguments; right-hand sides may share nodes (one
// variable name labels one node per graph, so sharing through variables is
// call-time choice by construction). Choice identifiers stored on rhs
// template nodes are placeholders; instantiation allocates fresh ones.
struct Rule {
  SymbolPtr op;
  Graph lhs;
  Graph rhs;
  int index = 0;       // ordinal among the operation's rules
  int choice_alt = 0;  // 1 or 2 for the built-in choice rules, else 0
  std::string origin;  // "line 12" or "builtin"
  std::string display;

  bool is_choice_rule() const { return choice_alt != 0; }
};

using RulePtr = std::shared_ptr<const Rule>;

}  // namespace pulltab
