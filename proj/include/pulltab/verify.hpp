#pragma once

// Executable property suites behind the `verify` CLI subcommand and the
// acceptance tests: parallel moves, invariance of the represented set by
// pull-tab and non-choice steps, and four-way strategy equivalence.

#include <cstdint>
#include <string>
#include <vector>

#include "pulltab/graph.hpp"

namespace pulltab {

// Watches states for decoration violations: once a node id has been seen
// with a label and (for choices) an identifier, every later state must
// agree. Also the executable face of the allocation discipline: a reused
// node id would show up as a relabeling.
class DecorationMonitor {
 public:
  void observe(const Graph& g);

  // Node ids are unique within one allocator session; graphs from different
  // sessions may reuse ids legitimately. Call this when a new session (a
  // fresh Allocator) starts; cumulative counters are kept.
  void begin_session();

  std::uint64_t states() const { return states_; }
  std::uint64_t violations() const { return violations_; }
  const std::vector<std::string>& notes() const { return notes_; }

 private:
  std::map<NodeId, std::string> label_seen_;
  std::map<NodeId, ChoiceId> id_seen_;
  std::uint64_t states_ = 0;
  std::uint64_t violations_ = 0;
  std::vector<std::string> notes_;
};

struct SuiteResult {
  std::string name;
  int cases = 0;
  int passed = 0;
  int failed = 0;
  int inconclusive = 0;
  std::vector<std::string> notes;

  bool ok() const { return failed == 0; }
  std::string to_string() const;
};

// Two redexes at distinct nodes commute modulo renaming, with the
// erased-redex no-op convention.
SuiteResult verify_parallel_moves(int cases, std::uint64_t seed,
                                  DecorationMonitor* monitor = nullptr);

// A pull-tab step leaves the represented set unchanged.
SuiteResult verify_pulltab_invariance(int cases, std::uint64_t seed,
                                      DecorationMonitor* monitor = nullptr);

// A non-choice rewrite step maps represented sets onto each other along
// rewriting, both directions, within a bounded search.
SuiteResult verify_nonchoice_invariance(int cases, std::uint64_t seed,
                                        DecorationMonitor* monitor = nullptr);

// All four strategies agree on the value set of random terminating
// programs; pulltab traces stay consistent; an independent breadth-first
// rewriting oracle agrees where it completes.
SuiteResult verify_theorem_equivalence(int cases, std::uint64_t seed,
                                       DecorationMonitor* monitor = nullptr);

}  // namespace pulltab
