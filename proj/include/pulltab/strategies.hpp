#pragma once

// The four evaluation strategies. Each enumerates the value set of a ground
// expression under a global step budget:
//
//   backtrack — depth-first; needed choices are reduced in place, the other
//               alternative is explored after the first completes.
//   copy      — a needed choice clones the entire context; both strands are
//               interleaved breadth-first.
//   bubble    — a needed choice clones only the region up to its immediate
//               proper dominator and hoists a fresh choice there.
//   pulltab   — needed choices are pulled up one predecessor at a time;
//               choices at the root are reduced consistently via a ledger,
//               and a failed alternative commits its sibling without any
//               further cloning.

#include <functional>
#include <map>
#include <optional>
#include <span>

#include "pulltab/graph.hpp"
#include "pulltab/program.hpp"
#include "pulltab/rewrite.hpp"

namespace pulltab {

enum class StrategyKind { Backtrack, Copy, Bubble, PullTab };

std::string to_string(StrategyKind k);
std::optional<StrategyKind> strategy_from_name(const std::string& name);

struct StrategyConfig {
  StrategyKind kind = StrategyKind::PullTab;
  std::uint64_t max_steps = 10000;
  std::optional<std::uint64_t> max_values;
  // Enforce call-time choice via the ledger. Disabling is legal only for
  // pulltab; it reproduces the mixed-alternative anomaly.
  bool consistency = true;
  // Evaluate a choice's left alternative to head normal form before pulling
  // it; a failing alternative then commits the sibling with zero cloning.
  bool hnf_before_pull = true;
  bool keep_traces = false;
  // Called on the seed and on every state a strand produces.
  std::function<void(const Graph&)> observer;
};

// Per-strand record of committed choice decisions; write-once per id.
using Ledger = std::map<ChoiceId, int>;

struct RunStats {
  std::uint64_t steps = 0;
  std::uint64_t rewrite_steps = 0;
  std::uint64_t pulltab_steps = 0;
  std::uint64_t nodes_allocated = 0;
  std::uint64_t nodes_cloned = 0;
  std::uint64_t strands_forked = 0;
  std::uint64_t strands_failed = 0;
  std::uint64_t leaves = 0;

  std::string to_string() const;  // key=value lines
};

struct Outcome {
  std::vector<Graph> values;  // constructor normal forms, deduped, sorted
  std::uint64_t failures = 0;
  bool exhausted = false;  // some branch hit the step budget
  RunStats stats;
  std::vector<std::vector<Step>> traces;  // one per finished strand
};

Outcome run(const Program& p, const Graph& g, const StrategyConfig& cfg, Allocator& alloc);

Outcome run_backtrack(const Program& p, const Graph& g, StrategyConfig cfg, Allocator& alloc);
Outcome run_copy(const Program& p, const Graph& g, StrategyConfig cfg, Allocator& alloc);
Outcome run_bubble(const Program& p, const Graph& g, StrategyConfig cfg, Allocator& alloc);
Outcome run_pulltab(const Program& p, const Graph& g, StrategyConfig cfg, Allocator& alloc);

// True iff all choice steps at nodes sharing an identifier use the same rule.
bool check_consistency(std::span<const Step> trace);

}  // namespace pulltab
