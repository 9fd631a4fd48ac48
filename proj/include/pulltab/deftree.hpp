#pragma once

// Definitional trees: the hierarchical dispatch structure that guides
// needed evaluation. Branch nodes refine the pattern at one inductive
// position per constructor; leaves hold a rule; exempt nodes mark
// constructor cases no rule covers.

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "pulltab/graph.hpp"
#include "pulltab/rule.hpp"

namespace pulltab {

struct NotInductivelySequentialError : Error {
  std::string op;
  NotInductivelySequentialError(std::string op_name, const std::string& why)
      : Error("operation '" + op_name + "' is not inductively sequential: " + why),
        op(std::move(op_name)) {}
};

struct DefTree {
  enum class Kind { Branch, Leaf, Exempt };

  Kind kind = Kind::Exempt;
  Graph pattern;

  // Branch: successor path from the pattern root to the inductive position,
  // plus one child per constructor (children absent from the map are
  // treated as exempt at dispatch).
  std::vector<int> position;
  std::map<std::string, std::unique_ptr<DefTree>> children;

  // Leaf.
  RulePtr rule;
};

// Builds the definitional tree of `op` from its rules; all rules must be
// rooted by `op`. Throws NotInductivelySequentialError when no inductive
// position exists or when left-hand sides overlap.
std::unique_ptr<DefTree> build_tree(const SymbolPtr& op, const std::vector<RulePtr>& rules,
                                    const Signature& sig, Allocator& alloc);

// Leaves and exempt nodes of the tree, preorder.
void collect_leaves(const DefTree& t, std::vector<const DefTree*>& out);

std::string tree_to_string(const DefTree& t, int indent = 0);

}  // namespace pulltab
