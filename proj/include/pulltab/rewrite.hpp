#pragma once

// Single rewrite steps with decoration maintenance, plus needed-redex
// search to head normal form guided by definitional trees.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pulltab/graph.hpp"
#include "pulltab/program.hpp"
#include "pulltab/rule.hpp"

namespace pulltab {

enum class StepKind { Rewrite, PullTab };

// A step that could be taken but has not been applied yet.
struct StepPlan {
  StepKind kind = StepKind::Rewrite;
  NodeId at;              // redex root (rewrite) or pull-tab target
  RulePtr rule;           // rewrite only
  int source_index = -1;  // pull-tab: which successor of `at` is the choice
  NodeId source;          // pull-tab: the choice node
};

// One applied step, as recorded in traces.
struct Step {
  StepKind kind = StepKind::Rewrite;
  NodeId node;
  RulePtr rule;                   // rewrite only
  std::optional<ChoiceId> choice;  // set for choice steps and pull-tabs

  bool is_choice_step() const { return kind == StepKind::Rewrite && rule && rule->is_choice_rule(); }
};

std::string step_to_string(const Step& s);

struct HeadResult {
  enum class Kind { Value, Failure, ChoiceAtRoot, Needs };
  Kind kind = Kind::Value;
  NodeId node;                  // constructor node / failed node / choice node
  std::optional<StepPlan> plan;  // Needs only
};

// Head-normal-form dispatch at `focus`: constructor nodes are values,
// choice nodes surface as ChoiceAtRoot, and operation nodes walk their
// definitional tree. A needed operation argument is dispatched recursively;
// a needed choice argument yields a pull-tab plan targeting the choice's
// predecessor on the dispatch path. Exempt dispatch is Failure.
HeadResult head_step(const Program& p, const Graph& g, NodeId focus);

// g[at <- rhs instance]. The lhs must match at `at` (dispatch must have
// resolved this; a mismatch is a logic error and throws). Matched argument
// nodes are shared into the instance, rhs-constructed nodes get fresh ids,
// and every new choice node gets a fresh identifier.
Graph rewrite_step(const Graph& g, NodeId at, const Rule& rule, Allocator& alloc);

// Reduces the choice node to its alternative (1 or 2) without a program.
Graph reduce_choice(const Graph& g, NodeId choice_node, int alt);

// Leftmost-outermost node labeled by an operation or the choice symbol, in
// preorder, with the parent edge through which it was first reached.
struct Focus {
  NodeId node;
  NodeId parent;  // meaningful when !at_root
  int index = -1;
  bool at_root = false;
};
std::optional<Focus> next_focus(const Graph& g);

// True when g is a constructor normal form.
bool is_value(const Graph& g);

// All rewrite steps available anywhere in g: definitional-tree dispatch at
// every operation node whose inductive arguments are constructor-resolved,
// plus both choice rules at every choice node. Deterministic order.
std::vector<StepPlan> applicable_steps(const Program& p, const Graph& g);

// Matches `rule.lhs` against g at `at`; returns variable bindings (variable
// name -> matched node) or nullopt.
std::optional<std::map<std::string, NodeId>> match_rule(const Graph& g, NodeId at,
                                                        const Rule& rule);

}  // namespace pulltab
