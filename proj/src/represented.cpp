#include "pulltab/represented.hpp"

#include <algorithm>
#include <deque>

#include "pulltab/canon.hpp"
#include "pulltab/pulltab_step.hpp"

namespace pulltab {
namespace {

std::optional<NodeId> first_choice(const Graph& g) {
  for (NodeId id : preorder(g))
    if (g.node(id).is_choice()) return id;
  return std::nullopt;
}

std::vector<ChoiceId> reachable_choice_ids(const Graph& g) {
  std::vector<ChoiceId> ids;
  for (NodeId id : preorder(g)) {
    const Node& n = g.node(id);
    if (!n.is_choice()) continue;
    if (std::find(ids.begin(), ids.end(), *n.choice) == ids.end())
      ids.push_back(*n.choice);
  }
  return ids;
}

std::set<std::string> canonical_set(const std::vector<Graph>& graphs) {
  std::set<std::string> out;
  for (const Graph& g : graphs) out.insert(canonicalize(g));
  return out;
}

}  // namespace

std::vector<Graph> represented_set(const Graph& g) {
  std::vector<ChoiceId> ids = reachable_choice_ids(g);
  if (ids.size() > 16)
    throw Error("represented_set: " + std::to_string(ids.size()) +
                " distinct identifiers is too many to enumerate");
  std::map<std::string, Graph> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << ids.size()); ++mask) {
    std::map<ChoiceId, int> assignment;
    for (std::size_t i = 0; i < ids.size(); ++i)
      assignment[ids[i]] = (mask >> i) & 1 ? 2 : 1;
    Graph h = g;
    // Outermost choices first; identifiers erased by earlier reductions
    // simply never come up again.
    while (auto c = first_choice(h))
      h = reduce_choice(h, *c, assignment.at(*h.node(*c).choice));
    out.emplace(canonicalize(h), std::move(h));
  }
  std::vector<Graph> result;
  result.reserve(out.size());
  for (auto& [key, graph] : out) result.push_back(std::move(graph));
  return result;
}

bool check_pulltab_invariance(const Graph& g, NodeId target, int source_index,
                              Allocator& alloc) {
  Graph g2 = pull_tab(g, target, source_index, alloc);
  return canonical_set(represented_set(g)) == canonical_set(represented_set(g2));
}

namespace {

// Bounded breadth-first closure under all applicable steps.
struct Closure {
  std::map<std::string, Graph> seen;  // canonical -> state
  bool complete = false;              // exhausted without hitting a limit

  Closure(const Program& p, const Graph& start, Allocator& alloc, int bound,
          std::size_t state_cap) {
    std::deque<std::pair<Graph, int>> queue;
    queue.emplace_back(start, 0);
    seen.emplace(canonicalize(start), start);
    bool capped = false;
    while (!queue.empty()) {
      auto [g, depth] = std::move(queue.front());
      queue.pop_front();
      if (depth >= bound) {
        capped = true;
        continue;
      }
      for (const StepPlan& plan : applicable_steps(p, g)) {
        Graph next = rewrite_step(g, plan.at, *plan.rule, alloc);
        std::string key = canonicalize(next);
        if (seen.count(key)) continue;
        if (seen.size() >= state_cap) {
          capped = true;
          break;
        }
        seen.emplace(key, next);
        queue.emplace_back(std::move(next), depth + 1);
      }
      if (capped && seen.size() >= state_cap) break;
    }
    complete = !capped;
  }
};

}  // namespace

CheckStatus check_nonchoice_invariance(const Program& p, const Graph& g,
                                       const StepPlan& step, Allocator& alloc,
                                       int bound, std::size_t state_cap) {
  if (step.kind != StepKind::Rewrite || !step.rule || step.rule->is_choice_rule())
    throw Error("check_nonchoice_invariance expects a non-choice rewrite step");
  Graph g2 = rewrite_step(g, step.at, *step.rule, alloc);

  std::vector<Graph> r1 = represented_set(g);
  std::vector<Graph> r2 = represented_set(g2);
  std::set<std::string> targets = canonical_set(r2);

  bool unresolved = false;
  bool all_complete = true;
  std::set<std::string> reached;  // members of R_g' hit by some closure
  for (const Graph& e : r1) {
    Closure closure(p, e, alloc, bound, state_cap);
    all_complete = all_complete && closure.complete;
    bool found = false;
    for (const auto& [key, state] : closure.seen) {
      (void)state;
      if (targets.count(key)) {
        found = true;
        reached.insert(key);
      }
    }
    if (!found) {
      if (closure.complete) return CheckStatus::Fails;  // claim (1) refuted
      unresolved = true;  // a witness may lie beyond the bound
    }
  }
  bool missing = false;
  for (const std::string& t : targets)
    if (!reached.count(t)) missing = true;
  if (missing) {
    if (all_complete) return CheckStatus::Fails;  // claim (2) refuted
    unresolved = true;
  }
  return unresolved ? CheckStatus::Inconclusive : CheckStatus::Holds;
}

}  // namespace pulltab
